#include "spt/generator.hpp"

#include <algorithm>
#include <cmath>

#include "spt/errors.hpp"

namespace spt {

namespace {

// Perturbs one coordinate of a state copy; used by all finite differences.
struct ScratchState {
    std::vector<double> mu, g, h;
    explicit ScratchState(const GenState& s)
        : mu(s.mu.begin(), s.mu.end()), g(s.g.begin(), s.g.end()), h(s.h.begin(), s.h.end()) {}
    GenState view() const { return {mu, g, h}; }
};

double fd_step(double x) { return 1e-6 * std::max(std::abs(x), 1e-8); }

// Probe step for verifying declared derivatives: coordinates sitting at or
// near zero (h at the start of a path) still need a step large enough to
// survive cancellation in the central difference.
double check_step(double x) { return 1e-6 * std::max(std::abs(x), 0.1); }

} // namespace

void GeneratorSpec::hessian(const GenState& state, Matrix& out) const {
    const std::size_t d = state.size();
    if (out.rows() != d || out.cols() != d) out = Matrix(d, d);
    if (hess_mu) {
        hess_mu(state, out);
        return;
    }
    // Central differences of the analytic gradient, column by column.
    ScratchState scratch(state);
    std::vector<double> gp(d), gm(d);
    for (std::size_t j = 0; j < d; ++j) {
        const double x = scratch.mu[j];
        const double eps = fd_step(x);
        scratch.mu[j] = x + eps;
        grad_mu(scratch.view(), gp);
        scratch.mu[j] = x - eps;
        grad_mu(scratch.view(), gm);
        scratch.mu[j] = x;
        for (std::size_t i = 0; i < d; ++i) out(i, j) = (gp[i] - gm[i]) / (2.0 * eps);
    }
}

void GeneratorSpec::grad_gamma(const GenState& state, std::span<double> out) const {
    if (dG_dgamma) {
        dG_dgamma(state, out);
    } else {
        std::fill(out.begin(), out.end(), 0.0);
    }
}

void GeneratorSpec::grad_xi(const GenState& state, std::span<double> out) const {
    if (dG_dxi) {
        dG_dxi(state, out);
    } else {
        std::fill(out.begin(), out.end(), 0.0);
    }
}

GenState state_at(const WeightPath& path, std::size_t step, bool aux_left) {
    const std::size_t aux = aux_left ? left_index(path.jump_flags, step) : step;
    return {path.mu.row(step), path.g.row(aux), path.h.row(aux)};
}

DerivativeCheckResult check_derivatives(const GeneratorSpec& spec,
                                        const std::vector<GenState>& states,
                                        double grad_tol, double balance_tol) {
    DerivativeCheckResult res;
    for (const GenState& s : states) {
        const std::size_t d = s.size();
        const double g0 = spec.value(s);
        if (!std::isfinite(g0))
            throw NumericalFailure("generator '" + spec.name + "' not finite at a check state");

        std::vector<double> grad(d);
        spec.grad_mu(s, grad);

        ScratchState scratch(s);
        // Error of one derivative block. Components are compared relatively,
        // with a floor at one percent of the block/value scale: below that the
        // central difference is dominated by cancellation noise (~1e-9 |G| at
        // the probe step used here), not by derivative information.
        const auto block_error = [&](std::vector<double>& coord, const std::vector<double>& analytic) {
            double block_scale = std::abs(g0);
            std::vector<double> fd(d);
            for (std::size_t i = 0; i < d; ++i) {
                const double x = coord[i];
                const double eps = check_step(x);
                coord[i] = x + eps;
                const double up = spec.value(scratch.view());
                coord[i] = x - eps;
                const double dn = spec.value(scratch.view());
                coord[i] = x;
                fd[i] = (up - dn) / (2.0 * eps);
                block_scale = std::max({block_scale, std::abs(analytic[i]), std::abs(fd[i])});
            }
            double err = 0.0;
            for (std::size_t i = 0; i < d; ++i)
                err = std::max(err, std::abs(analytic[i] - fd[i]) /
                                        std::max({std::abs(analytic[i]), std::abs(fd[i]),
                                                  1e-2 * block_scale, 1e-12}));
            return err;
        };

        res.max_grad_rel_err = std::max(res.max_grad_rel_err, block_error(scratch.mu, grad));
        if (spec.dG_dgamma) {
            std::vector<double> dg(d);
            spec.dG_dgamma(s, dg);
            res.max_aux_rel_err = std::max(res.max_aux_rel_err, block_error(scratch.g, dg));
        }
        if (spec.dG_dxi) {
            std::vector<double> dh(d);
            spec.dG_dxi(s, dh);
            res.max_aux_rel_err = std::max(res.max_aux_rel_err, block_error(scratch.h, dh));
        }
        if (spec.is_balanced) {
            double weighted = 0.0;
            for (std::size_t i = 0; i < d; ++i) weighted += s.mu[i] * grad[i];
            const double scale = std::max(std::abs(g0), 1e-300);
            res.max_balance_rel_err =
                std::max(res.max_balance_rel_err, std::abs(weighted - g0) / scale);
        }
    }
    res.grad_ok = res.max_grad_rel_err <= grad_tol && res.max_aux_rel_err <= grad_tol;
    res.balance_ok = !spec.is_balanced || res.max_balance_rel_err <= balance_tol;
    return res;
}

DerivativeCheckResult check_derivatives_on_path(const GeneratorSpec& spec,
                                                const WeightPath& path,
                                                std::size_t max_states) {
    const std::size_t n = path.steps();
    const std::size_t count = std::min(max_states, n);
    std::vector<GenState> states;
    states.reserve(count);
    for (std::size_t k = 0; k < count; ++k)
        states.push_back(state_at(path, k * (n - 1) / std::max<std::size_t>(count - 1, 1)));
    return check_derivatives(spec, states);
}

GeneratorSpec normalize_at(const GeneratorSpec& spec, const WeightPath& path) {
    const double g0 = spec.value(state_at(path, 0));
    if (!std::isfinite(g0))
        throw NumericalFailure("generator '" + spec.name + "' not finite at the start state");
    GeneratorSpec out = spec;
    out.name = spec.name + "/normalized";
    if (g0 > 0.0) {
        const auto base = spec; // copy closures by value
        out.value = [base, g0](const GenState& s) { return base.value(s) / g0; };
        out.grad_mu = [base, g0](const GenState& s, std::span<double> o) {
            base.grad_mu(s, o);
            for (double& v : o) v /= g0;
        };
        if (base.hess_mu)
            out.hess_mu = [base, g0](const GenState& s, Matrix& m) {
                base.hess_mu(s, m);
                for (double& v : m.data()) v /= g0;
            };
        if (base.dG_dgamma)
            out.dG_dgamma = [base, g0](const GenState& s, std::span<double> o) {
                base.dG_dgamma(s, o);
                for (double& v : o) v /= g0;
            };
        if (base.dG_dxi)
            out.dG_dxi = [base, g0](const GenState& s, std::span<double> o) {
                base.dG_dxi(s, o);
                for (double& v : o) v /= g0;
            };
    } else {
        const auto base = spec;
        out.value = [base](const GenState& s) { return base.value(s) + 1.0; };
        out.is_balanced = false; // the shift breaks the balance identity
    }
    return out;
}

} // namespace spt
