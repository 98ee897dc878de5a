#pragma once

#include <cstddef>
#include <optional>

#include "spt/gamma.hpp"
#include "spt/generator.hpp"
#include "spt/market_model.hpp"

namespace spt {

enum class StrategyKind { additive, multiplicative };

/// A functionally generated trading strategy evaluated along a path.
///
/// Holdings are stored twice per step: `holdings` is the (left-continuous)
/// position valued at the step itself, and `holdings_post` is the position
/// right after the step's book update and rebalance. The two rows differ only
/// at flagged steps. `holdings_post[l]` is the predictable integrand over
/// (t_l, t_{l+1}] — this is what a trader actually holds across the step.
struct StrategyPath {
    StrategyKind kind = StrategyKind::additive;
    Matrix theta;           // gradient part: D_{mu_i}G at the left-limit state
    Matrix theta_post;      // same at the right-continuous state
    Matrix holdings;        // phi (additive) or psi (multiplicative)
    Matrix holdings_post;
    std::vector<double> wealth;             // sum_i holdings * mu, per step
    std::vector<double> closed_form_wealth; // G + Gamma form (see kind)
    std::vector<double> defect_q;           // Q of the generating part (theta / eta)
    std::vector<double> defect_c;           // defect of balance, sum mu*theta - G(t-)
    GammaLedger ledger;
    double max_abs_defect_q = 0.0;
    double max_identity_gap = 0.0;    // max |wealth - closed_form_wealth|
    /// Max defect of self-financibility of the final holdings. This equals
    /// the largest deviation between the closed-form wealth and the wealth a
    /// share-level replication of these holdings produces, and shrinks under
    /// grid refinement.
    double self_financing_gap = 0.0;

    std::size_t steps() const { return wealth.size(); }
    std::size_t stocks() const { return theta.cols(); }
};

/// Additively generated strategy: holdings phi with wealth G + Gamma
/// (continuous aux) or G(t-) + Gamma^c (RCLL aux, balance required).
StrategyPath additive_strategy(const GeneratorSpec& spec, const WeightPath& path);

/// Multiplicatively generated strategy: holdings psi with wealth
/// G * exp(int dGamma / G) (continuous) or the left-limit form under jumps.
/// Requires G > 0 along the path.
StrategyPath multiplicative_strategy(const GeneratorSpec& spec, const WeightPath& path);

/// Portfolio weights pi_i = holdings_i mu_i / sum_j holdings_j mu_j.
Matrix weights_from_strategy(const StrategyPath& sp, const WeightPath& path);

/// First step index at which the (nondecreasing) continuous Gamma part
/// exceeds g0 — the horizon from which the additively generated strategy is a
/// strong relative arbitrage versus the market. Throws NotMonotone if the
/// series decreases beyond 1e-12.
std::optional<std::size_t> arbitrage_certificate(const GammaLedger& ledger, double g0);

} // namespace spt
