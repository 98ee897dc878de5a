#pragma once

#include <span>
#include <vector>

#include "spt/backtest.hpp"
#include "spt/core.hpp"
#include "spt/market_model.hpp"
#include "spt/rank.hpp"

namespace spt {

/// Per-rebalance attribution of the relative return into a size part (DC,
/// weight ratios ranked by capitalization) and a value part (MBRC, weight
/// ratios ranked by market-to-book). One period spans one grid step.
struct AttributionReport {
    std::vector<double> dc;            // dc[l] covers (t_l, t_{l+1}]
    std::vector<double> mbrc;
    Matrix w;                          // weight ratios by size, per step
    Matrix v;                          // weight ratios by market-to-book rank
    std::vector<double> lt_correction; // local-time term of the frozen-ratio
                                       // comparison portfolio (diagnostic only)
};

/// DC over one period: log of sum_k w_k(t0) mu_(k)(t1) with
/// w_k(t0) = pi_{p_{t0}(k)}(t0) / mu_(k)(t0).
double distributional_component(std::span<const double> pi_t0, std::span<const double> mu_t0,
                                std::span<const double> mu_t1,
                                std::span<const std::size_t> size_perm_t0,
                                std::span<const double> ranked_mu_t1);

/// MBRC over one period: log of sum_k v_k(t0) mu_{r_{t1}(k)}(t1) with
/// v_k(t0) = pi_{r_{t0}(k)}(t0) / mu_{r_{t0}(k)}(t0).
double mtb_ratio_component(std::span<const double> pi_t0, std::span<const double> mu_t0,
                           std::span<const double> mu_t1,
                           std::span<const std::size_t> rho_perm_t0,
                           std::span<const std::size_t> rho_perm_t1);

/// Runs both components over every consecutive step pair of a backtest.
/// `mu_frame` ranks the market weights, `rho_frame` the market-to-book
/// ratios; both must cover the same steps as the path.
AttributionReport attribute_series(const BacktestResult& result, const WeightPath& path,
                                   const RankFrame& mu_frame, const RankFrame& rho_frame);

} // namespace spt
