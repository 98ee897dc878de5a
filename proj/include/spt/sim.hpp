#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "spt/core.hpp"
#include "spt/market_model.hpp"
#include "spt/strategy.hpp"

namespace spt {

enum class BookMode { continuous, annual_jump };

/// Synthetic-market configuration. Capitalizations follow a log-Euler
/// geometric scheme (positivity by construction); books are either smooth
/// positive finite-variation paths or piecewise-constant with flagged jumps
/// every `book_update_interval` steps. Output is deterministic per seed.
struct SimConfig {
    std::size_t d = 2;
    std::size_t n_steps = 1000;
    double dt = 1e-3;                 // years
    std::vector<double> drifts;       // per stock; empty = zeros
    Matrix vol_matrix;                // d x f factor loadings; empty = 0.2 I
    BookMode book_mode = BookMode::continuous;
    std::vector<double> book_drift;   // per stock; empty = zeros
    std::uint64_t seed = 1;

    std::vector<double> init_caps;    // empty = all 1.0
    std::vector<double> init_books;   // empty = all 1.0
    std::size_t book_update_interval = 0; // 0 = one update per ~year (1/dt steps)
    double book_jump_vol = 0.10;      // lognormal jump size, annual_jump mode
    double book_cycle_amp = 0.05;     // sine modulation size, continuous mode

    void validate() const;            // throws BadCovariance / BadConfig
};

MarketSeries simulate(const SimConfig& config);

/// Keeps every `factor`-th step of a series (step 0 first). A coarse step is
/// flagged when any dropped fine step inside it was flagged. Used for grid
/// refinement studies on a single underlying path.
MarketSeries coarsen(const MarketSeries& series, std::size_t factor);

/// Share-level replication of stored holdings through the self-financing
/// recurrence (with the jump-correction sum for RCLL auxiliary paths),
/// compared against the strategy's closed-form wealth.
struct OraclePath {
    std::vector<double> replicated_wealth;
    std::vector<double> closed_form_wealth;
    double max_abs_gap = 0.0;
};

OraclePath replicate(const StrategyPath& sp, const WeightPath& path);

/// Deterministic standard-normal stream: explicit Box-Muller over mt19937_64
/// uniforms, so output does not depend on the stdlib's distribution code.
class NormalSampler {
public:
    explicit NormalSampler(std::uint64_t seed) : rng_(seed) {}
    double next();

private:
    double uniform01(); // in (0, 1]
    std::mt19937_64 rng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace spt
