#include "spt/attribution.hpp"

#include <cmath>
#include <string>

#include "spt/errors.hpp"

namespace spt {

double distributional_component(std::span<const double> pi_t0, std::span<const double> mu_t0,
                                std::span<const double> mu_t1,
                                std::span<const std::size_t> size_perm_t0,
                                std::span<const double> ranked_mu_t1) {
    const std::size_t d = pi_t0.size();
    if (mu_t0.size() != d || mu_t1.size() != d || size_perm_t0.size() != d ||
        ranked_mu_t1.size() != d)
        throw LengthMismatch("attribution inputs disagree in dimension");
    double acc = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
        const std::size_t stock = size_perm_t0[k];
        const double mu_rank_t0 = mu_t0[stock]; // mu_(k)(t0) by definition of the permutation
        if (!(mu_rank_t0 > 0.0)) throw DegenerateWeights("zero ranked market weight");
        acc += pi_t0[stock] / mu_rank_t0 * ranked_mu_t1[k];
    }
    return std::log(acc);
}

double mtb_ratio_component(std::span<const double> pi_t0, std::span<const double> mu_t0,
                           std::span<const double> mu_t1,
                           std::span<const std::size_t> rho_perm_t0,
                           std::span<const std::size_t> rho_perm_t1) {
    const std::size_t d = pi_t0.size();
    if (mu_t0.size() != d || mu_t1.size() != d || rho_perm_t0.size() != d ||
        rho_perm_t1.size() != d)
        throw LengthMismatch("attribution inputs disagree in dimension");
    double acc = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
        const std::size_t at_t0 = rho_perm_t0[k];
        const std::size_t at_t1 = rho_perm_t1[k];
        if (!(mu_t0[at_t0] > 0.0)) throw DegenerateWeights("zero market weight");
        acc += pi_t0[at_t0] / mu_t0[at_t0] * mu_t1[at_t1];
    }
    return std::log(acc);
}

AttributionReport attribute_series(const BacktestResult& result, const WeightPath& path,
                                   const RankFrame& mu_frame, const RankFrame& rho_frame) {
    const std::size_t n = path.steps();
    const std::size_t d = path.stocks();
    if (result.weights_used.rows() != n || result.weights_used.cols() != d)
        throw LengthMismatch("backtest result does not match the path");
    if (mu_frame.steps() != n || rho_frame.steps() != n)
        throw LengthMismatch("rank frames do not match the path");

    AttributionReport rep;
    rep.dc.assign(n - 1, 0.0);
    rep.mbrc.assign(n - 1, 0.0);
    rep.lt_correction.assign(n - 1, 0.0);
    rep.w = Matrix(n, d);
    rep.v = Matrix(n, d);

    for (std::size_t l = 0; l < n; ++l) {
        for (std::size_t k = 0; k < d; ++k) {
            const std::size_t by_size = mu_frame.perm(l, k);
            const std::size_t by_rho = rho_frame.perm(l, k);
            rep.w(l, k) = result.weights_used(l, by_size) / path.mu(l, by_size);
            rep.v(l, k) = result.weights_used(l, by_rho) / path.mu(l, by_rho);
        }
    }

    const LocalTimeSet mu_lt = estimate_local_times(mu_frame);
    for (std::size_t l = 0; l + 1 < n; ++l) {
        rep.dc[l] = distributional_component(result.weights_used.row(l), path.mu.row(l),
                                             path.mu.row(l + 1), mu_frame.perm.row(l),
                                             mu_frame.ranked.row(l + 1));
        rep.mbrc[l] = mtb_ratio_component(result.weights_used.row(l), path.mu.row(l),
                                          path.mu.row(l + 1), rho_frame.perm.row(l),
                                          rho_frame.perm.row(l + 1));
        // Local-time correction of the frozen-ratio portfolio over the
        // period; its generator value at t_l is sum_k pi_k = 1.
        double corr = 0.0;
        for (std::size_t k = 0; k + 1 < d; ++k)
            corr += 0.5 * (rep.w(l, k + 1) - rep.w(l, k)) *
                    (mu_lt.L(l + 1, k) - mu_lt.L(l, k));
        rep.lt_correction[l] = corr;
    }
    return rep;
}

} // namespace spt
