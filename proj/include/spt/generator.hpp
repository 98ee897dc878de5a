#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "spt/core.hpp"
#include "spt/market_model.hpp"

namespace spt {

/// One evaluation point of a generating function: market weights plus the
/// monotone decomposition (g, h) of the auxiliary finite-variation path.
struct GenState {
    std::span<const double> mu;
    std::span<const double> g;
    std::span<const double> h;

    std::size_t size() const { return mu.size(); }
};

/// A generating function G(mu, g, h) with its first-order partials. The
/// mu-Hessian may be analytic or requested by central finite differences.
/// Aux partials left empty mean G does not depend on that argument.
struct GeneratorSpec {
    std::string name;

    std::function<double(const GenState&)> value;
    std::function<void(const GenState&, std::span<double>)> grad_mu;   // D_{mu_i} G
    std::function<void(const GenState&, Matrix&)> hess_mu;             // D^2_{mu_i,mu_j} G
    std::function<void(const GenState&, std::span<double>)> dG_dgamma; // D_{g_i} G
    std::function<void(const GenState&, std::span<double>)> dG_dxi;    // D_{h_i} G

    bool is_balanced = false;            // claims G = sum_i mu_i D_{mu_i} G
    bool requires_continuous_aux = false;

    bool has_aux_partials() const { return static_cast<bool>(dG_dgamma) || static_cast<bool>(dG_dxi); }
    bool has_analytic_hessian() const { return static_cast<bool>(hess_mu); }

    /// Hessian with finite-difference fallback (central differences of the
    /// analytic gradient, step 1e-6 * max(mu_i, 1e-8)).
    void hessian(const GenState& state, Matrix& out) const;

    /// Aux partials with zero fallback.
    void grad_gamma(const GenState& state, std::span<double> out) const;
    void grad_xi(const GenState& state, std::span<double> out) const;
};

/// View of one step of a WeightPath as an evaluation point. `aux_left` picks
/// the (t-) values of g and h (mu is continuous, so its left limit is the
/// current value).
GenState state_at(const WeightPath& path, std::size_t step, bool aux_left = false);

struct DerivativeCheckResult {
    double max_grad_rel_err = 0.0;    // analytic vs central-difference, mu gradient
    double max_aux_rel_err = 0.0;     // same for the g/h partials
    double max_balance_rel_err = 0.0; // |sum_i mu_i D_i G - G| / |G|
    bool grad_ok = false;
    bool balance_ok = false;
};

/// Compares declared derivatives against central finite differences and, for
/// specs claiming balance, checks G = sum mu_i D_{mu_i}G at each given state.
/// Tolerances: 1e-6 relative for gradients, 1e-9 relative for balance.
DerivativeCheckResult check_derivatives(const GeneratorSpec& spec,
                                        const std::vector<GenState>& states,
                                        double grad_tol = 1e-6,
                                        double balance_tol = 1e-9);

/// Convenience: checks the spec on a spread of states taken from a path.
DerivativeCheckResult check_derivatives_on_path(const GeneratorSpec& spec,
                                                const WeightPath& path,
                                                std::size_t max_states = 16);

/// Normalizes G so its value at `start` is one: division by G(0) when
/// positive, otherwise the G+1 shift (which loses balance).
GeneratorSpec normalize_at(const GeneratorSpec& spec, const WeightPath& path);

} // namespace spt
