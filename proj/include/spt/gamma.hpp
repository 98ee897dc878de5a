#pragma once

#include <vector>

#include "spt/generator.hpp"
#include "spt/market_model.hpp"

namespace spt {

/// Cumulative Gamma process of a generating function along a path, with its
/// sub-components. All series are per-step cumulative, starting at zero.
///
/// Discretization conventions:
///  - stochastic integrals use left-point (predictable) integrands: the
///    increment over (t_{l-1}, t_l] evaluates derivatives at the step-(l-1)
///    state and multiplies the step-l increment;
///  - quadratic covariation d<mu_i, mu_j> is the product of increments
///    dmu_i * dmu_j per step (realized covariation);
///  - g/h increments at flagged steps are jumps, all others are continuous.
///
/// `gamma` is the telescoped definition G(0) - G(t) + int sum D_{mu_i}G dmu_i.
/// `gamma_continuous` is the exact sum of the three named sub-components.
/// In continuous time gamma == gamma_continuous - jump_term; discretely the
/// two routes differ by an Ito-expansion remainder that vanishes under grid
/// refinement (and identically for generators quadratic in mu), reported as
/// `max_abs_ito_residual`.
struct GammaLedger {
    std::vector<double> gamma;                // telescoped definition
    std::vector<double> gamma_continuous;     // qv + gamma_int + xi_int
    std::vector<double> qv_term;              // -1/2 sum D^2 dmu dmu
    std::vector<double> gamma_integral_term;  // -sum D_{g_i}G dg^c
    std::vector<double> xi_integral_term;     // -sum D_{h_i}G dh^c
    std::vector<double> jump_term;            // sum of dG at flagged steps
    std::vector<double> g_values;             // G at each step (current state)
    std::vector<double> g_left_values;        // G at each step's left-limit state
    double max_abs_ito_residual = 0.0;

    std::size_t steps() const { return gamma.size(); }
};

/// Accumulates the Gamma ledger of `spec` along `path`. Runs a cheap
/// derivative self-check on a spread of path states first and throws
/// DerivativeMismatch when it fails; NaN/Inf anywhere aborts with
/// NumericalFailure naming the step.
GammaLedger accumulate_gamma(const GeneratorSpec& spec, const WeightPath& path,
                             bool precheck = true);

} // namespace spt
