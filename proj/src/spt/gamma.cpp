#include "spt/gamma.hpp"

#include <cmath>
#include <string>

#include "spt/errors.hpp"

namespace spt {

namespace {

void require_finite(double v, const char* what, std::size_t step, const std::string& name) {
    if (!std::isfinite(v))
        throw NumericalFailure("generator '" + name + "': non-finite " + what + " at step " +
                               std::to_string(step));
}

} // namespace

GammaLedger accumulate_gamma(const GeneratorSpec& spec, const WeightPath& path, bool precheck) {
    const std::size_t n = path.steps();
    const std::size_t d = path.stocks();
    if (n < 2) throw GridTooShort("gamma accumulation needs at least 2 steps");

    if (precheck) {
        const auto check = check_derivatives_on_path(spec, path, 8);
        if (!check.grad_ok)
            throw DerivativeMismatch("generator '" + spec.name +
                                     "': declared derivatives disagree with finite differences "
                                     "(max rel err " +
                                     std::to_string(std::max(check.max_grad_rel_err,
                                                             check.max_aux_rel_err)) +
                                     ")");
        if (!check.balance_ok)
            throw DerivativeMismatch("generator '" + spec.name +
                                     "': balance claim fails numerically (rel err " +
                                     std::to_string(check.max_balance_rel_err) + ")");
    }

    GammaLedger led;
    led.gamma.assign(n, 0.0);
    led.gamma_continuous.assign(n, 0.0);
    led.qv_term.assign(n, 0.0);
    led.gamma_integral_term.assign(n, 0.0);
    led.xi_integral_term.assign(n, 0.0);
    led.jump_term.assign(n, 0.0);
    led.g_values.assign(n, 0.0);
    led.g_left_values.assign(n, 0.0);

    const double g_start = spec.value(state_at(path, 0));
    require_finite(g_start, "G", 0, spec.name);
    led.g_values[0] = g_start;
    led.g_left_values[0] = g_start;

    std::vector<double> grad(d), dgam(d), dxi(d);
    Matrix hess;

    // running accumulators
    double integral = 0.0; // int sum D_{mu_i}G dmu_i
    double qv = 0.0, gi = 0.0, xi = 0.0, jumps = 0.0;

    for (std::size_t l = 1; l < n; ++l) {
        const GenState prev = state_at(path, l - 1); // right-continuous state at l-1
        spec.grad_mu(prev, grad);
        spec.hessian(prev, hess);
        spec.grad_gamma(prev, dgam);
        spec.grad_xi(prev, dxi);

        const bool flagged = path.jump_flags[l] != 0;

        double dmu_int = 0.0, qv_inc = 0.0, gi_inc = 0.0, xi_inc = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            const double dmu_i = path.mu(l, i) - path.mu(l - 1, i);
            dmu_int += grad[i] * dmu_i;
            for (std::size_t j = 0; j < d; ++j) {
                const double dmu_j = path.mu(l, j) - path.mu(l - 1, j);
                qv_inc -= 0.5 * hess(i, j) * dmu_i * dmu_j;
            }
            if (!flagged) {
                gi_inc -= dgam[i] * (path.g(l, i) - path.g(l - 1, i));
                xi_inc -= dxi[i] * (path.h(l, i) - path.h(l - 1, i));
            }
        }

        const double g_now = spec.value(state_at(path, l));
        const double g_left = flagged ? spec.value(state_at(path, l, /*aux_left=*/true)) : g_now;
        require_finite(g_now, "G", l, spec.name);
        require_finite(g_left, "left-limit G", l, spec.name);
        require_finite(dmu_int, "dmu integrand", l, spec.name);
        require_finite(qv_inc, "qv increment", l, spec.name);
        require_finite(gi_inc + xi_inc, "aux increment", l, spec.name);

        integral += dmu_int;
        qv += qv_inc;
        gi += gi_inc;
        xi += xi_inc;
        if (flagged) jumps += g_now - g_left;

        led.g_values[l] = g_now;
        led.g_left_values[l] = g_left;
        led.gamma[l] = g_start - g_now + integral;
        led.qv_term[l] = qv;
        led.gamma_integral_term[l] = gi;
        led.xi_integral_term[l] = xi;
        led.gamma_continuous[l] = qv + gi + xi;
        led.jump_term[l] = jumps;

        const double residual = led.gamma[l] - (led.gamma_continuous[l] - led.jump_term[l]);
        led.max_abs_ito_residual = std::max(led.max_abs_ito_residual, std::abs(residual));
    }
    return led;
}

} // namespace spt
