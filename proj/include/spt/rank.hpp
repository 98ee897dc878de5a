#pragma once

#include <functional>
#include <span>
#include <string>

#include "spt/core.hpp"
#include "spt/gamma.hpp"
#include "spt/market_model.hpp"
#include "spt/strategy.hpp"

namespace spt {

/// Per-step descending ranking of a d-vector series with the lexicographic
/// tie rule (at equal values the smaller stock index gets the better rank).
struct RankFrame {
    Matrix ranked;        // ranked(l, k) = value of rank k at step l, non-increasing in k
    IndexMatrix perm;     // perm(l, k) = stock index occupying rank k
    IndexMatrix inv_perm; // inv_perm(l, i) = rank of stock i
    std::size_t two_way_tie_steps = 0;   // steps with at least one exact tie
    std::size_t three_way_tie_steps = 0; // steps with a triple tie (degeneracy warning)

    std::size_t steps() const { return ranked.rows(); }
    std::size_t stocks() const { return ranked.cols(); }
    double tie_step_fraction() const {
        return steps() ? static_cast<double>(two_way_tie_steps) / steps() : 0.0;
    }
    bool degeneracy_warning() const { return three_way_tie_steps > 0; }
};

RankFrame rank_path(const Matrix& values);

/// Cumulative local times at zero of the adjacent-rank gap processes
/// nu_[k] - nu_[k+1], k = 1..d-1.
///
/// Increments come from the discrete ranked-dynamics identity: the change of
/// the k-th ranked value splits into the change of the stock occupying that
/// rank plus half the local-time increments of the two adjacent gaps. Solving
/// that triangular system gives dL_k = 2 * [sum of the k largest values now
/// minus the current value of the k stocks that were largest one step ago],
/// which is nonnegative by construction, vanishes whenever the top-k set is
/// unchanged, and converges to the Tanaka local time of the gap (crossings of
/// finite-variation paths contribute O(dt) only).
struct LocalTimeSet {
    Matrix L;                  // L(l, k-1) = cumulative local time of gap k
    double clamp_total = 0.0;  // magnitude of negative rounding clamped away

    std::size_t steps() const { return L.rows(); }
    std::size_t gaps() const { return L.cols(); }
};

LocalTimeSet estimate_local_times(const RankFrame& frame);

/// Generating function of the ranked vector (descending order).
struct RankGeneratorSpec {
    std::string name;
    std::function<double(std::span<const double>)> value;
    std::function<void(std::span<const double>, std::span<double>)> grad; // D_k G
    std::function<void(std::span<const double>, Matrix&)> hess;           // optional

    void hessian(std::span<const double> nu, Matrix& out) const;
};

/// Gamma ledger for rank-based generation on the ranked market-to-book
/// ratios (f_i = mu_i / beta_i). `gamma` is the telescoped definition via the
/// rank trading strategy; `expanded_gamma` re-derives it from the ranked
/// dynamics: the aux integral against d(beta), the quadratic-covariation term
/// and the two adjacent-gap local-time integrals. Their agreement is the
/// reconciliation check.
struct RankGammaLedger {
    std::vector<double> gamma;
    std::vector<double> aux_integral_term;
    std::vector<double> qv_term;
    std::vector<double> local_time_term; // both local-time integrals combined
    std::vector<double> expanded_gamma;  // sum of the three terms above
    std::vector<double> g_values;        // G(ranked state) per step
    double max_reconciliation_gap = 0.0;

    std::size_t steps() const { return gamma.size(); }
};

/// Requires a continuous auxiliary path (throws JumpsNotSupported otherwise)
/// and `frame`/`lt` built from the rho path.
RankGammaLedger ranked_gamma(const RankGeneratorSpec& spec, const WeightPath& path,
                             const RankFrame& frame, const LocalTimeSet& lt);

StrategyPath rank_additive_strategy(const RankGeneratorSpec& spec, const WeightPath& path,
                                    const RankFrame& frame, const LocalTimeSet& lt);
StrategyPath rank_multiplicative_strategy(const RankGeneratorSpec& spec, const WeightPath& path,
                                          const RankFrame& frame, const LocalTimeSet& lt);

} // namespace spt
