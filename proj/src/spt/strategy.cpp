#include "spt/strategy.hpp"

#include <cmath>
#include <string>

#include "spt/errors.hpp"

namespace spt {

namespace {

void fill_theta(const GeneratorSpec& spec, const WeightPath& path, Matrix& theta,
                Matrix& theta_post) {
    const std::size_t n = path.steps();
    const std::size_t d = path.stocks();
    theta = Matrix(n, d);
    theta_post = Matrix(n, d);
    std::vector<double> grad(d);
    for (std::size_t l = 0; l < n; ++l) {
        spec.grad_mu(state_at(path, l), grad);
        for (std::size_t i = 0; i < d; ++i) theta_post(l, i) = grad[i];
        if (l > 0 && path.jump_flags[l]) {
            spec.grad_mu(state_at(path, l, /*aux_left=*/true), grad);
            for (std::size_t i = 0; i < d; ++i) theta(l, i) = grad[i];
        } else {
            for (std::size_t i = 0; i < d; ++i) theta(l, i) = grad[i];
        }
        for (std::size_t i = 0; i < d; ++i)
            if (!std::isfinite(theta(l, i)) || !std::isfinite(theta_post(l, i)))
                throw NumericalFailure("generator '" + spec.name +
                                       "': non-finite gradient at step " + std::to_string(l));
    }
}

// Defect of self-financibility of the stored holdings, including the jump
// sum over s < t required by the RCLL self-financing identity.
void fill_defect_q(const WeightPath& path, const Matrix& pos, const Matrix& pos_post,
                   std::vector<double>& q, double& max_abs) {
    const std::size_t n = path.steps();
    const std::size_t d = path.stocks();
    q.assign(n, 0.0);
    max_abs = 0.0;
    double v0 = 0.0;
    for (std::size_t i = 0; i < d; ++i) v0 += pos(0, i) * path.mu(0, i);
    double integral = 0.0, jump_sum = 0.0;
    for (std::size_t l = 1; l < n; ++l) {
        for (std::size_t i = 0; i < d; ++i) {
            integral += pos_post(l - 1, i) * (path.mu(l, i) - path.mu(l - 1, i));
            jump_sum += (pos_post(l - 1, i) - pos(l - 1, i)) * path.mu(l - 1, i);
        }
        double vl = 0.0;
        for (std::size_t i = 0; i < d; ++i) vl += pos(l, i) * path.mu(l, i);
        q[l] = vl - v0 - integral - jump_sum;
        max_abs = std::max(max_abs, std::abs(q[l]));
    }
}

void check_jump_preconditions(const GeneratorSpec& spec, const WeightPath& path) {
    if (!path.has_jumps()) return;
    if (spec.requires_continuous_aux)
        throw JumpsNotSupported("generator '" + spec.name +
                                "' requires a continuous auxiliary path but the series has "
                                "book jumps");
    if (!spec.is_balanced)
        throw UnbalancedWithJumps("generator '" + spec.name +
                                  "' is not balanced; jump-robust generation needs the balance "
                                  "identity G = sum mu_i D_i G");
}

} // namespace

StrategyPath additive_strategy(const GeneratorSpec& spec, const WeightPath& path) {
    check_jump_preconditions(spec, path);
    const bool jumps = path.has_jumps();
    const std::size_t n = path.steps();
    const std::size_t d = path.stocks();

    StrategyPath sp;
    sp.kind = StrategyKind::additive;
    sp.ledger = accumulate_gamma(spec, path);
    fill_theta(spec, path, sp.theta, sp.theta_post);

    sp.holdings = Matrix(n, d);
    sp.holdings_post = Matrix(n, d);
    sp.wealth.assign(n, 0.0);
    sp.closed_form_wealth.assign(n, 0.0);
    sp.defect_c.assign(n, 0.0);

    for (std::size_t l = 0; l < n; ++l) {
        double mu_theta = 0.0, mu_theta_post = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            mu_theta += path.mu(l, i) * sp.theta(l, i);
            mu_theta_post += path.mu(l, i) * sp.theta_post(l, i);
        }
        sp.defect_c[l] = mu_theta - sp.ledger.g_left_values[l];

        double base, base_post, closed;
        if (jumps) {
            // balanced RCLL form: phi = theta + Gamma^c
            base = sp.ledger.gamma_continuous[l];
            base_post = base;
            closed = sp.ledger.g_left_values[l] + sp.ledger.gamma_continuous[l];
        } else {
            // general continuous form: phi = Gamma + theta - C
            base = sp.ledger.gamma[l] - sp.defect_c[l];
            base_post = sp.ledger.gamma[l] - (mu_theta_post - sp.ledger.g_values[l]);
            closed = sp.ledger.g_values[l] + sp.ledger.gamma[l];
        }
        double v = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            sp.holdings(l, i) = sp.theta(l, i) + base;
            sp.holdings_post(l, i) = sp.theta_post(l, i) + base_post;
            v += sp.holdings(l, i) * path.mu(l, i);
        }
        sp.wealth[l] = v;
        sp.closed_form_wealth[l] = closed;
        sp.max_identity_gap = std::max(sp.max_identity_gap, std::abs(v - closed));
    }
    fill_defect_q(path, sp.theta, sp.theta_post, sp.defect_q, sp.max_abs_defect_q);
    std::vector<double> q_holdings;
    fill_defect_q(path, sp.holdings, sp.holdings_post, q_holdings, sp.self_financing_gap);
    return sp;
}

StrategyPath multiplicative_strategy(const GeneratorSpec& spec, const WeightPath& path) {
    check_jump_preconditions(spec, path);
    const bool jumps = path.has_jumps();
    const std::size_t n = path.steps();
    const std::size_t d = path.stocks();

    StrategyPath sp;
    sp.kind = StrategyKind::multiplicative;
    sp.ledger = accumulate_gamma(spec, path);

    for (std::size_t l = 0; l < n; ++l) {
        if (!(sp.ledger.g_values[l] > 0.0) || !(sp.ledger.g_left_values[l] > 0.0))
            throw NonPositiveG("generator '" + spec.name + "' is not positive at step " +
                               std::to_string(l));
    }
    fill_theta(spec, path, sp.theta, sp.theta_post);

    // K(t) = exp(int dGamma / G(s-)), left-point: increment over
    // (t_{l-1}, t_l] divides by G at the step-(l-1) right-continuous state.
    // Under jumps the integrator is the continuous Gamma part.
    std::vector<double> log_k(n, 0.0);
    const std::vector<double>& gam =
        jumps ? sp.ledger.gamma_continuous : sp.ledger.gamma;
    for (std::size_t l = 1; l < n; ++l)
        log_k[l] = log_k[l - 1] + (gam[l] - gam[l - 1]) / sp.ledger.g_values[l - 1];

    sp.holdings = Matrix(n, d);
    sp.holdings_post = Matrix(n, d);
    sp.wealth.assign(n, 0.0);
    sp.closed_form_wealth.assign(n, 0.0);
    sp.defect_c.assign(n, 0.0);

    Matrix eta(n, d), eta_post(n, d);
    for (std::size_t l = 0; l < n; ++l) {
        const double k = std::exp(log_k[l]);
        if (!std::isfinite(k))
            throw NumericalFailure("generator '" + spec.name +
                                   "': non-finite wealth factor at step " + std::to_string(l));
        double mu_eta = 0.0, mu_theta = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            eta(l, i) = sp.theta(l, i) * k;
            eta_post(l, i) = sp.theta_post(l, i) * k;
            mu_eta += eta(l, i) * path.mu(l, i);
            mu_theta += sp.theta(l, i) * path.mu(l, i);
        }
        sp.defect_c[l] = mu_theta - sp.ledger.g_left_values[l];

        double closed;
        if (jumps) {
            // balanced RCLL form: psi = eta
            closed = sp.ledger.g_left_values[l] * k;
            for (std::size_t i = 0; i < d; ++i) {
                sp.holdings(l, i) = eta(l, i);
                sp.holdings_post(l, i) = eta_post(l, i);
            }
        } else {
            // general continuous form: psi_i = G*K + eta_i - sum_j mu_j eta_j
            closed = sp.ledger.g_values[l] * k;
            const double shift = closed - mu_eta;
            for (std::size_t i = 0; i < d; ++i) {
                sp.holdings(l, i) = eta(l, i) + shift;
                sp.holdings_post(l, i) = eta_post(l, i) + shift;
            }
        }
        double v = 0.0;
        for (std::size_t i = 0; i < d; ++i) v += sp.holdings(l, i) * path.mu(l, i);
        sp.wealth[l] = v;
        sp.closed_form_wealth[l] = closed;
        sp.max_identity_gap = std::max(sp.max_identity_gap, std::abs(v - closed));
    }
    // Q is computed on eta: the RCLL multiplicative theorem asserts
    // Q^{eta,mu} == 0, so its discrete magnitude is pure discretization error.
    fill_defect_q(path, eta, eta_post, sp.defect_q, sp.max_abs_defect_q);
    std::vector<double> q_holdings;
    fill_defect_q(path, sp.holdings, sp.holdings_post, q_holdings, sp.self_financing_gap);
    return sp;
}

Matrix weights_from_strategy(const StrategyPath& sp, const WeightPath& path) {
    const std::size_t n = path.steps();
    const std::size_t d = path.stocks();
    if (sp.holdings.rows() != n || sp.holdings.cols() != d)
        throw LengthMismatch("strategy and path have different shapes");
    Matrix pi(n, d);
    for (std::size_t l = 0; l < n; ++l) {
        double denom = 0.0, abs_scale = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            const double v = sp.holdings(l, i) * path.mu(l, i);
            denom += v;
            abs_scale += std::abs(v);
        }
        if (denom == 0.0 || std::abs(denom) < 1e-14 * abs_scale)
            throw ZeroWealth("strategy wealth vanishes at step " + std::to_string(l));
        for (std::size_t i = 0; i < d; ++i)
            pi(l, i) = sp.holdings(l, i) * path.mu(l, i) / denom;
    }
    return pi;
}

std::optional<std::size_t> arbitrage_certificate(const GammaLedger& ledger, double g0) {
    const auto& gam = ledger.gamma_continuous;
    for (std::size_t l = 1; l < gam.size(); ++l)
        if (gam[l] < gam[l - 1] - 1e-12)
            throw NotMonotone("Gamma decreases by " + std::to_string(gam[l - 1] - gam[l]) +
                              " at step " + std::to_string(l));
    for (std::size_t l = 0; l < gam.size(); ++l)
        if (gam[l] > g0) return l;
    return std::nullopt;
}

} // namespace spt
