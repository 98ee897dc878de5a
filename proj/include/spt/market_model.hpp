#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spt/core.hpp"

namespace spt {

/// Raw market panel: a time grid with per-stock capitalizations and book
/// values. Prices equal capitalizations (one share outstanding per stock).
///
/// Book values are RCLL: the value stored at a step applies from that step
/// onward. `book_update_flags[s]` marks a discontinuity of the book path at
/// step s; unflagged book variation (synthetic smooth book paths) is treated
/// as continuous finite variation.
struct MarketSeries {
    std::vector<double> times;               // strictly increasing, years
    std::vector<std::string> labels;         // optional per-step date strings
    Matrix caps;                             // S[step][stock] > 0
    Matrix books;                            // b[step][stock] > 0
    std::vector<std::uint8_t> book_update_flags;

    std::size_t steps() const { return caps.rows(); }
    std::size_t stocks() const { return caps.cols(); }

    /// Throws NonPositiveInput / GridTooShort / BadDimensions / LengthMismatch
    /// when the invariants fail.
    void validate() const;
};

/// Derived weight paths: market weights mu, relative book values beta,
/// market-to-book ratios rho = mu/beta, and the minimal monotone
/// decomposition beta = g - h built by the running-positive/negative-part
/// recurrences g(t_l) = g(t_{l-1}) + (d beta)^+, h(t_l) = h(t_{l-1}) + (d beta)^-.
struct WeightPath {
    std::vector<double> times;
    std::vector<std::string> labels;
    Matrix mu;
    Matrix beta;
    Matrix rho;
    Matrix g;
    Matrix h;
    std::vector<std::uint8_t> jump_flags;    // copied from MarketSeries

    std::size_t steps() const { return mu.rows(); }
    std::size_t stocks() const { return mu.cols(); }
    bool has_jumps() const;

    /// Left limit (t-) accessors: previous step's value at flagged steps.
    double beta_left(std::size_t step, std::size_t i) const {
        return beta(left_index(jump_flags, step), i);
    }
    double g_left(std::size_t step, std::size_t i) const {
        return g(left_index(jump_flags, step), i);
    }
    double h_left(std::size_t step, std::size_t i) const {
        return h(left_index(jump_flags, step), i);
    }
    /// rho(t-) = mu(t)/beta(t-); mu itself is continuous.
    double rho_left(std::size_t step, std::size_t i) const {
        return mu(step, i) / beta_left(step, i);
    }
};

/// Builds the full derived path set from a validated series.
WeightPath compute_weights(const MarketSeries& series);

struct RhoBounds {
    double m = 0.0;
    double M = 0.0;
};

/// Observed bounds of rho over the whole path, widened by a safety factor so
/// the strict inequalities m < rho < M hold on the path (factor 1 returns the
/// exact min/max).
RhoBounds rho_bounds(const WeightPath& path, double safety_factor = 2.0);

/// Smallest beta over the whole path (used to pick the universal lower bound
/// delta of the modified generators).
double min_beta(const WeightPath& path);

} // namespace spt
