#include "spt/rank.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "spt/errors.hpp"

namespace spt {

RankFrame rank_path(const Matrix& values) {
    const std::size_t n = values.rows();
    const std::size_t d = values.cols();
    RankFrame frame;
    frame.ranked = Matrix(n, d);
    frame.perm = IndexMatrix(n, d);
    frame.inv_perm = IndexMatrix(n, d);

    std::vector<std::size_t> order(d);
    for (std::size_t l = 0; l < n; ++l) {
        for (double v : values.row(l))
            if (!std::isfinite(v))
                throw NumericalFailure("non-finite value in rank input at step " +
                                       std::to_string(l));
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (values(l, a) != values(l, b)) return values(l, a) > values(l, b);
            return a < b; // lexicographic tie rule
        });
        bool two_tie = false, three_tie = false;
        for (std::size_t k = 0; k < d; ++k) {
            frame.perm(l, k) = order[k];
            frame.inv_perm(l, order[k]) = k;
            frame.ranked(l, k) = values(l, order[k]);
            if (k > 0 && frame.ranked(l, k) == frame.ranked(l, k - 1)) {
                two_tie = true;
                if (k > 1 && frame.ranked(l, k) == frame.ranked(l, k - 2)) three_tie = true;
            }
        }
        if (two_tie) ++frame.two_way_tie_steps;
        if (three_tie) ++frame.three_way_tie_steps;
    }
    return frame;
}

LocalTimeSet estimate_local_times(const RankFrame& frame) {
    const std::size_t n = frame.steps();
    const std::size_t d = frame.stocks();
    if (n < 2) throw GridTooShort("local-time estimation needs at least 2 steps");

    LocalTimeSet lt;
    lt.L = Matrix(n, d - 1, 0.0);
    for (std::size_t l = 1; l < n; ++l) {
        // prefix = sum over the k best ranks of (value now) - (value now of the
        // stock that held that rank at the previous step)
        double prefix = 0.0;
        for (std::size_t k = 0; k + 1 < d; ++k) {
            const std::size_t was = frame.perm(l - 1, k);
            const double now_at_rank = frame.ranked(l, k);
            const double now_of_was = frame.ranked(l, frame.inv_perm(l, was));
            prefix += now_at_rank - now_of_was;
            double inc = 2.0 * prefix;
            if (inc < 0.0) { // rounding only; the exact quantity is >= 0
                lt.clamp_total += -inc;
                inc = 0.0;
            }
            lt.L(l, k) = lt.L(l - 1, k) + inc;
        }
    }
    return lt;
}

void RankGeneratorSpec::hessian(std::span<const double> nu, Matrix& out) const {
    const std::size_t d = nu.size();
    if (out.rows() != d || out.cols() != d) out = Matrix(d, d);
    if (hess) {
        hess(nu, out);
        return;
    }
    std::vector<double> x(nu.begin(), nu.end());
    std::vector<double> gp(d), gm(d);
    for (std::size_t j = 0; j < d; ++j) {
        const double v = x[j];
        const double eps = 1e-6 * std::max(std::abs(v), 1e-8);
        x[j] = v + eps;
        grad(x, gp);
        x[j] = v - eps;
        grad(x, gm);
        x[j] = v;
        for (std::size_t i = 0; i < d; ++i) out(i, j) = (gp[i] - gm[i]) / (2.0 * eps);
    }
}

namespace {

void require_rank_inputs(const WeightPath& path, const RankFrame& frame,
                         const LocalTimeSet& lt, const std::string& name) {
    if (path.has_jumps())
        throw JumpsNotSupported("rank generator '" + name +
                                "': ranked generation needs a continuous auxiliary path");
    if (frame.steps() != path.steps() || frame.stocks() != path.stocks())
        throw LengthMismatch("rank frame does not match the path");
    if (lt.steps() != path.steps() || lt.gaps() + 1 != path.stocks())
        throw LengthMismatch("local-time set does not match the path");
}

// theta_i = D_k G(nu) / beta_i for k the rank of stock i (market-to-book rank
// function f_i = mu_i / beta_i).
void rank_theta_row(const RankGeneratorSpec& spec, const WeightPath& path,
                    const RankFrame& frame, std::size_t l, std::vector<double>& grad,
                    std::span<double> theta) {
    const std::size_t d = path.stocks();
    spec.grad(frame.ranked.row(l), grad);
    for (std::size_t i = 0; i < d; ++i)
        theta[i] = grad[frame.inv_perm(l, i)] / path.beta(l, i);
}

RankGammaLedger build_rank_ledger(const RankGeneratorSpec& spec, const WeightPath& path,
                                  const RankFrame& frame, const LocalTimeSet& lt) {
    require_rank_inputs(path, frame, lt, spec.name);
    const std::size_t n = path.steps();
    const std::size_t d = path.stocks();

    RankGammaLedger led;
    led.gamma.assign(n, 0.0);
    led.aux_integral_term.assign(n, 0.0);
    led.qv_term.assign(n, 0.0);
    led.local_time_term.assign(n, 0.0);
    led.expanded_gamma.assign(n, 0.0);
    led.g_values.assign(n, 0.0);

    const double g0 = spec.value(frame.ranked.row(0));
    if (!std::isfinite(g0))
        throw NumericalFailure("rank generator '" + spec.name + "': non-finite value at step 0");
    led.g_values[0] = g0;

    std::vector<double> grad(d), theta(d);
    Matrix hess;
    double integral = 0.0, aux = 0.0, qv = 0.0, loc = 0.0;

    for (std::size_t l = 1; l < n; ++l) {
        rank_theta_row(spec, path, frame, l - 1, grad, theta);
        spec.hessian(frame.ranked.row(l - 1), hess);

        double dmu_int = 0.0;
        for (std::size_t i = 0; i < d; ++i)
            dmu_int += theta[i] * (path.mu(l, i) - path.mu(l - 1, i));
        integral += dmu_int;

        // aux integral: + sum_k D_k G * (rho_i / beta_i) dbeta_i, i at rank k
        for (std::size_t k = 0; k < d; ++k) {
            const std::size_t i = frame.perm(l - 1, k);
            aux += grad[k] * (path.rho(l - 1, i) / path.beta(l - 1, i)) *
                   (path.beta(l, i) - path.beta(l - 1, i));
        }
        // qv: -1/2 sum_{k,m} D2_{k,m} G dmu_i dmu_j / (beta_i beta_j)
        for (std::size_t k = 0; k < d; ++k) {
            const std::size_t i = frame.perm(l - 1, k);
            const double dmi = (path.mu(l, i) - path.mu(l - 1, i)) / path.beta(l - 1, i);
            for (std::size_t m = 0; m < d; ++m) {
                const std::size_t j = frame.perm(l - 1, m);
                const double dmj = (path.mu(l, j) - path.mu(l - 1, j)) / path.beta(l - 1, j);
                qv -= 0.5 * hess(k, m) * dmi * dmj;
            }
        }
        // local times: -1/2 sum_k D_k G dL_k + 1/2 sum_k D_k G dL_{k-1}
        //            =  1/2 sum_{k=1}^{d-1} (D_{k+1}G - D_k G) dL_k
        for (std::size_t k = 0; k + 1 < d; ++k) {
            const double dl = lt.L(l, k) - lt.L(l - 1, k);
            loc += 0.5 * (grad[k + 1] - grad[k]) * dl;
        }

        const double g_now = spec.value(frame.ranked.row(l));
        if (!std::isfinite(g_now) || !std::isfinite(integral))
            throw NumericalFailure("rank generator '" + spec.name +
                                   "': non-finite accumulation at step " + std::to_string(l));

        led.g_values[l] = g_now;
        led.gamma[l] = g0 - g_now + integral;
        led.aux_integral_term[l] = aux;
        led.qv_term[l] = qv;
        led.local_time_term[l] = loc;
        led.expanded_gamma[l] = aux + qv + loc;
        led.max_reconciliation_gap =
            std::max(led.max_reconciliation_gap, std::abs(led.gamma[l] - led.expanded_gamma[l]));
    }
    return led;
}

} // namespace

RankGammaLedger ranked_gamma(const RankGeneratorSpec& spec, const WeightPath& path,
                             const RankFrame& frame, const LocalTimeSet& lt) {
    return build_rank_ledger(spec, path, frame, lt);
}

StrategyPath rank_additive_strategy(const RankGeneratorSpec& spec, const WeightPath& path,
                                    const RankFrame& frame, const LocalTimeSet& lt) {
    const RankGammaLedger rled = build_rank_ledger(spec, path, frame, lt);
    const std::size_t n = path.steps();
    const std::size_t d = path.stocks();

    StrategyPath sp;
    sp.kind = StrategyKind::additive;
    sp.theta = Matrix(n, d);
    sp.theta_post = Matrix(n, d);
    sp.holdings = Matrix(n, d);
    sp.holdings_post = Matrix(n, d);
    sp.wealth.assign(n, 0.0);
    sp.closed_form_wealth.assign(n, 0.0);
    sp.defect_c.assign(n, 0.0);

    std::vector<double> grad(d), theta(d);
    for (std::size_t l = 0; l < n; ++l) {
        rank_theta_row(spec, path, frame, l, grad, theta);
        double mu_theta = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            sp.theta(l, i) = theta[i];
            sp.theta_post(l, i) = theta[i];
            mu_theta += theta[i] * path.mu(l, i);
        }
        sp.defect_c[l] = mu_theta - rled.g_values[l];
        const double base = rled.gamma[l] - sp.defect_c[l];
        double v = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            sp.holdings(l, i) = theta[i] + base;
            sp.holdings_post(l, i) = sp.holdings(l, i);
            v += sp.holdings(l, i) * path.mu(l, i);
        }
        sp.wealth[l] = v;
        sp.closed_form_wealth[l] = rled.g_values[l] + rled.gamma[l];
        sp.max_identity_gap =
            std::max(sp.max_identity_gap, std::abs(v - sp.closed_form_wealth[l]));
    }

    // Fold the rank ledger into the generic one for downstream consumers.
    sp.ledger.gamma = rled.gamma;
    sp.ledger.gamma_continuous = rled.gamma;
    sp.ledger.g_values = rled.g_values;
    sp.ledger.g_left_values = rled.g_values;
    sp.ledger.jump_term.assign(n, 0.0);
    sp.ledger.max_abs_ito_residual = rled.max_reconciliation_gap;

    // Q of theta and the self-financing gap of the final holdings.
    const auto defect = [&](const Matrix& pos, std::vector<double>& q, double& max_abs) {
        q.assign(n, 0.0);
        max_abs = 0.0;
        double v0 = 0.0;
        for (std::size_t i = 0; i < d; ++i) v0 += pos(0, i) * path.mu(0, i);
        double integral = 0.0;
        for (std::size_t l = 1; l < n; ++l) {
            for (std::size_t i = 0; i < d; ++i)
                integral += pos(l - 1, i) * (path.mu(l, i) - path.mu(l - 1, i));
            double vl = 0.0;
            for (std::size_t i = 0; i < d; ++i) vl += pos(l, i) * path.mu(l, i);
            q[l] = vl - v0 - integral;
            max_abs = std::max(max_abs, std::abs(q[l]));
        }
    };
    defect(sp.theta, sp.defect_q, sp.max_abs_defect_q);
    std::vector<double> scratch;
    defect(sp.holdings, scratch, sp.self_financing_gap);
    return sp;
}

StrategyPath rank_multiplicative_strategy(const RankGeneratorSpec& spec, const WeightPath& path,
                                          const RankFrame& frame, const LocalTimeSet& lt) {
    const RankGammaLedger rled = build_rank_ledger(spec, path, frame, lt);
    const std::size_t n = path.steps();
    const std::size_t d = path.stocks();
    for (std::size_t l = 0; l < n; ++l)
        if (!(rled.g_values[l] > 0.0))
            throw NonPositiveG("rank generator '" + spec.name + "' not positive at step " +
                               std::to_string(l));

    StrategyPath sp;
    sp.kind = StrategyKind::multiplicative;
    sp.theta = Matrix(n, d);
    sp.theta_post = Matrix(n, d);
    sp.holdings = Matrix(n, d);
    sp.holdings_post = Matrix(n, d);
    sp.wealth.assign(n, 0.0);
    sp.closed_form_wealth.assign(n, 0.0);
    sp.defect_c.assign(n, 0.0);

    std::vector<double> log_k(n, 0.0);
    for (std::size_t l = 1; l < n; ++l)
        log_k[l] = log_k[l - 1] + (rled.gamma[l] - rled.gamma[l - 1]) / rled.g_values[l - 1];

    Matrix eta(n, d);
    std::vector<double> grad(d), theta(d);
    for (std::size_t l = 0; l < n; ++l) {
        rank_theta_row(spec, path, frame, l, grad, theta);
        const double k_factor = std::exp(log_k[l]);
        double mu_eta = 0.0, mu_theta = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            sp.theta(l, i) = theta[i];
            sp.theta_post(l, i) = theta[i];
            eta(l, i) = theta[i] * k_factor;
            mu_eta += eta(l, i) * path.mu(l, i);
            mu_theta += theta[i] * path.mu(l, i);
        }
        sp.defect_c[l] = mu_theta - rled.g_values[l];
        const double closed = rled.g_values[l] * k_factor;
        const double shift = closed - mu_eta; // psi_i = G*K + eta_i - sum mu eta
        double v = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            sp.holdings(l, i) = eta(l, i) + shift;
            sp.holdings_post(l, i) = sp.holdings(l, i);
            v += sp.holdings(l, i) * path.mu(l, i);
        }
        sp.wealth[l] = v;
        sp.closed_form_wealth[l] = closed;
        sp.max_identity_gap = std::max(sp.max_identity_gap, std::abs(v - closed));
    }

    sp.ledger.gamma = rled.gamma;
    sp.ledger.gamma_continuous = rled.gamma;
    sp.ledger.g_values = rled.g_values;
    sp.ledger.g_left_values = rled.g_values;
    sp.ledger.jump_term.assign(n, 0.0);
    sp.ledger.max_abs_ito_residual = rled.max_reconciliation_gap;

    const auto defect = [&](const Matrix& pos, std::vector<double>& q, double& max_abs) {
        q.assign(n, 0.0);
        max_abs = 0.0;
        double v0 = 0.0;
        for (std::size_t i = 0; i < d; ++i) v0 += pos(0, i) * path.mu(0, i);
        double integral = 0.0;
        for (std::size_t l = 1; l < n; ++l) {
            for (std::size_t i = 0; i < d; ++i)
                integral += pos(l - 1, i) * (path.mu(l, i) - path.mu(l - 1, i));
            double vl = 0.0;
            for (std::size_t i = 0; i < d; ++i) vl += pos(l, i) * path.mu(l, i);
            q[l] = vl - v0 - integral;
            max_abs = std::max(max_abs, std::abs(q[l]));
        }
    };
    defect(eta, sp.defect_q, sp.max_abs_defect_q); // Q^{eta,mu}
    std::vector<double> scratch;
    defect(sp.holdings, scratch, sp.self_financing_gap);
    return sp;
}

} // namespace spt
