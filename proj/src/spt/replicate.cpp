// Brute-force self-financing replication. Kept apart from the generation
// engine on purpose: this unit only ever sees stored holdings, so its wealth
// recurrence is an independent check on the closed-form identities.

#include <cmath>

#include "spt/errors.hpp"
#include "spt/sim.hpp"

namespace spt {

OraclePath replicate(const StrategyPath& sp, const WeightPath& path) {
    const std::size_t n = path.steps();
    const std::size_t d = path.stocks();
    if (sp.holdings.rows() != n || sp.holdings.cols() != d)
        throw LengthMismatch("strategy and path have different shapes");

    OraclePath oracle;
    oracle.replicated_wealth.assign(n, 0.0);
    oracle.closed_form_wealth = sp.closed_form_wealth;

    // The position rebalanced at the close of step l-1 is carried across
    // (t_{l-1}, t_l]; a book update at step l-1 lets the wealth absorb the
    // jump sum_i(dtheta_i * mu_i) before the step.
    double v = 0.0;
    for (std::size_t i = 0; i < d; ++i) v += sp.holdings(0, i) * path.mu(0, i);
    oracle.replicated_wealth[0] = v;
    oracle.max_abs_gap = std::abs(v - oracle.closed_form_wealth[0]);

    for (std::size_t l = 1; l < n; ++l) {
        double gain = 0.0, jump = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            gain += sp.holdings_post(l - 1, i) * (path.mu(l, i) - path.mu(l - 1, i));
            jump += (sp.holdings_post(l - 1, i) - sp.holdings(l - 1, i)) * path.mu(l - 1, i);
        }
        v += gain + jump;
        oracle.replicated_wealth[l] = v;
        oracle.max_abs_gap =
            std::max(oracle.max_abs_gap, std::abs(v - oracle.closed_form_wealth[l]));
    }
    return oracle;
}

} // namespace spt
