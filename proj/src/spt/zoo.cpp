#include "spt/zoo.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <sstream>

#include "spt/errors.hpp"

namespace spt {

namespace {

double state_beta(const GenState& s, std::size_t i) { return s.g[i] - s.h[i]; }
double state_rho(const GenState& s, std::size_t i) { return s.mu[i] / (s.g[i] - s.h[i]); }

std::vector<double> normalized(std::vector<double> w) {
    double sum = 0.0;
    for (double x : w) sum += x;
    for (double& x : w) x /= sum;
    return w;
}

// Descending order with the lexicographic tie rule, local to weight rules.
std::vector<std::size_t> descending_order(const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (v[a] != v[b]) return v[a] > v[b];
        return a < b;
    });
    return idx;
}

double get_param(const std::map<std::string, double>& params, const std::string& key,
                 std::optional<double> fallback = std::nullopt) {
    auto it = params.find(key);
    if (it != params.end()) return it->second;
    if (fallback) return *fallback;
    throw BadConfig("missing parameter '" + key + "'");
}

// Incremental ledger state shared by the additive-generated weight rules.
struct AdditiveRuleState {
    GeneratorSpec spec;
    double m = 0.0, M = 0.0, delta = 0.0;
    bool check_rho_bounds = false;
    bool check_delta = false;
    bool continuous_only = false;

    std::size_t next_step = 0; // ledger extended through next_step - 1
    double qv = 0.0, gi = 0.0, xi = 0.0;      // continuous Gamma parts
    double integral = 0.0;                    // int sum D_mu G dmu (definitional)
    double g_prev = 0.0;                      // G at the last extended step
    double g0 = 0.0;

    void reset() {
        next_step = 0;
        qv = gi = xi = integral = g_prev = g0 = 0.0;
    }
};

GenState view_state(const MarketView& view, std::size_t step, std::vector<double>& mu,
                    std::vector<double>& g, std::vector<double>& h, bool aux_left = false) {
    const std::size_t d = view.stocks();
    mu.resize(d);
    g.resize(d);
    h.resize(d);
    for (std::size_t i = 0; i < d; ++i) {
        mu[i] = view.mu(step, i);
        if (aux_left) {
            g[i] = view.g_left(step, i);
            h[i] = view.h_left(step, i);
        } else {
            g[i] = view.g(step, i);
            h[i] = view.h(step, i);
        }
    }
    return GenState{mu, g, h};
}

void check_step_bounds(const AdditiveRuleState& st, const MarketView& view, std::size_t step) {
    const std::size_t d = view.stocks();
    for (std::size_t i = 0; i < d; ++i) {
        if (st.check_rho_bounds) {
            const double r = view.rho(step, i);
            if (r < st.m || r > st.M)
                throw BoundsViolated("rho = " + std::to_string(r) + " outside [" +
                                     std::to_string(st.m) + ", " + std::to_string(st.M) +
                                     "] at step " + std::to_string(step));
        }
        if (st.check_delta && view.beta(step, i) < st.delta)
            throw DeltaViolated("beta below delta = " + std::to_string(st.delta) + " at step " +
                                std::to_string(step));
    }
    if (st.continuous_only && step > 0 && view.flagged(step))
        throw JumpsNotSupported("generator '" + st.spec.name +
                                "' requires continuous books; jump at step " +
                                std::to_string(step));
}

// Additively generated portfolio weights at the view's current step:
// phi = theta + Gamma^c (balanced, jump-safe) or Gamma + theta - C
// (continuous-only generators), then pi_i ~ phi_i * mu_i.
WeightRule make_additive_rule(AdditiveRuleState init) {
    auto st = std::make_shared<AdditiveRuleState>(std::move(init));
    return [st](const MarketView& view) {
        const std::size_t s = view.current();
        const std::size_t d = view.stocks();
        if (s + 1 < st->next_step) st->reset(); // rule reused on a fresh run

        std::vector<double> mu_a, g_a, h_a, mu_b, g_b, h_b;
        std::vector<double> grad(d), dgam(d), dxi(d);
        Matrix hess;

        for (std::size_t m = st->next_step; m <= s; ++m) {
            check_step_bounds(*st, view, m);
            if (m == 0) {
                const GenState s0 = view_state(view, 0, mu_a, g_a, h_a);
                st->g0 = st->spec.value(s0);
                st->g_prev = st->g0;
                continue;
            }
            const GenState prev = view_state(view, m - 1, mu_a, g_a, h_a);
            st->spec.grad_mu(prev, grad);
            st->spec.hessian(prev, hess);
            st->spec.grad_gamma(prev, dgam);
            st->spec.grad_xi(prev, dxi);
            const bool flagged = view.flagged(m);
            for (std::size_t i = 0; i < d; ++i) {
                const double dmu_i = view.mu(m, i) - view.mu(m - 1, i);
                st->integral += grad[i] * dmu_i;
                for (std::size_t j = 0; j < d; ++j)
                    st->qv -= 0.5 * hess(i, j) * dmu_i * (view.mu(m, j) - view.mu(m - 1, j));
                if (!flagged) {
                    st->gi -= dgam[i] * (view.g(m, i) - view.g(m - 1, i));
                    st->xi -= dxi[i] * (view.h(m, i) - view.h(m - 1, i));
                }
            }
            const GenState now = view_state(view, m, mu_b, g_b, h_b);
            st->g_prev = st->spec.value(now);
        }
        st->next_step = s + 1;

        // holdings at the current step
        const GenState left = view_state(view, s, mu_a, g_a, h_a, /*aux_left=*/true);
        st->spec.grad_mu(left, grad);
        const double g_left = st->spec.value(left);
        const double gamma_c = st->qv + st->gi + st->xi;

        std::vector<double> w(d);
        if (st->continuous_only) {
            // phi = Gamma + theta - C with the telescoped Gamma
            const double gamma_def = st->g0 - st->g_prev + st->integral;
            double mu_theta = 0.0;
            for (std::size_t i = 0; i < d; ++i) mu_theta += view.mu(s, i) * grad[i];
            const double base = gamma_def - (mu_theta - g_left);
            for (std::size_t i = 0; i < d; ++i) w[i] = (grad[i] + base) * view.mu(s, i);
        } else {
            // balanced, jump-safe: phi = theta(t-) + Gamma^c
            for (std::size_t i = 0; i < d; ++i) w[i] = (grad[i] + gamma_c) * view.mu(s, i);
        }
        return normalized(std::move(w));
    };
}

} // namespace

void ZooEntry::check_path(const WeightPath& path) const {
    const auto has = [&](const char* k) { return params.count(k) > 0; };
    if (has("m") && has("M")) {
        const double m = params.at("m"), M = params.at("M");
        if (!(0.0 < m && m < M)) throw BadConfig("need 0 < m < M for '" + name + "'");
        for (double r : path.rho.data())
            if (r < m || r > M)
                throw BoundsViolated("rho leaves [m, M] on this path for '" + name + "'");
    }
    if (has("delta")) {
        const double delta = params.at("delta");
        if (!(delta > 0.0)) throw BadConfig("delta must be positive for '" + name + "'");
        for (double b : path.beta.data())
            if (b < delta) throw DeltaViolated("beta drops below delta for '" + name + "'");
    }
    if (has_generator && generator.requires_continuous_aux && path.has_jumps())
        throw JumpsNotSupported("generator '" + name + "' requires continuous books");
}

ZooEntry market_portfolio() {
    ZooEntry e;
    e.name = "market";
    e.description = "capitalization weights";
    e.kind = ZooKind::direct_weight;
    return e;
}

ZooEntry equal_weight() {
    ZooEntry e;
    e.name = "equal_weight";
    e.description = "1/d in every stock";
    e.kind = ZooKind::direct_weight;
    return e;
}

ZooEntry book_value_generator() {
    ZooEntry e;
    e.name = "book_value";
    e.description = "invests proportionally to relative book values beta(t-)";
    e.kind = ZooKind::direct_weight;
    e.has_generator = true;
    e.normalize_at_start = true;

    GeneratorSpec& spec = e.generator;
    spec.name = "book_value";
    spec.is_balanced = true;
    spec.value = [](const GenState& s) {
        double lg = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            const double b = state_beta(s, i);
            lg += b * std::log(s.mu[i] / b);
        }
        return std::exp(lg);
    };
    spec.grad_mu = [spec_value = spec.value](const GenState& s, std::span<double> out) {
        const double G = spec_value(s);
        for (std::size_t i = 0; i < s.size(); ++i) out[i] = state_beta(s, i) / s.mu[i] * G;
    };
    spec.hess_mu = [spec_value = spec.value](const GenState& s, Matrix& out) {
        const double G = spec_value(s);
        const std::size_t d = s.size();
        for (std::size_t i = 0; i < d; ++i) {
            const double bi = state_beta(s, i);
            for (std::size_t j = 0; j < d; ++j) {
                const double bj = state_beta(s, j);
                out(i, j) = G * bi * bj / (s.mu[i] * s.mu[j]);
                if (i == j) out(i, j) -= G * bi / (s.mu[i] * s.mu[i]);
            }
        }
    };
    spec.dG_dgamma = [spec_value = spec.value](const GenState& s, std::span<double> out) {
        const double G = spec_value(s);
        for (std::size_t i = 0; i < s.size(); ++i)
            out[i] = (std::log(state_rho(s, i)) - 1.0) * G;
    };
    spec.dG_dxi = [spec_value = spec.value](const GenState& s, std::span<double> out) {
        const double G = spec_value(s);
        for (std::size_t i = 0; i < s.size(); ++i)
            out[i] = (1.0 - std::log(state_rho(s, i))) * G;
    };
    return e;
}

namespace {

// shared by the two power-weighted families
GeneratorSpec power_sum_rho_generator(double p) {
    GeneratorSpec spec;
    spec.name = "mtb_weighted(p=" + std::to_string(p) + ")";
    spec.is_balanced = true;
    spec.value = [p](const GenState& s) {
        double a = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) a += std::pow(state_rho(s, i), p);
        return std::pow(a, 1.0 / p);
    };
    spec.grad_mu = [p](const GenState& s, std::span<double> out) {
        double a = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) a += std::pow(state_rho(s, i), p);
        const double a_pow = std::pow(a, 1.0 / p - 1.0);
        for (std::size_t i = 0; i < s.size(); ++i)
            out[i] = a_pow * std::pow(state_rho(s, i), p - 1.0) / state_beta(s, i);
    };
    spec.hess_mu = [p](const GenState& s, Matrix& out) {
        const std::size_t d = s.size();
        double a = 0.0;
        for (std::size_t i = 0; i < d; ++i) a += std::pow(state_rho(s, i), p);
        const double a1 = std::pow(a, 1.0 / p - 1.0);
        const double a2 = std::pow(a, 1.0 / p - 2.0);
        for (std::size_t i = 0; i < d; ++i) {
            const double ri = std::pow(state_rho(s, i), p - 1.0) / state_beta(s, i);
            for (std::size_t j = 0; j < d; ++j) {
                const double rj = std::pow(state_rho(s, j), p - 1.0) / state_beta(s, j);
                out(i, j) = (1.0 - p) * a2 * ri * rj;
                if (i == j)
                    out(i, j) += (p - 1.0) * a1 * std::pow(state_rho(s, i), p - 2.0) /
                                 (state_beta(s, i) * state_beta(s, i));
            }
        }
    };
    spec.dG_dgamma = [p](const GenState& s, std::span<double> out) {
        double a = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) a += std::pow(state_rho(s, i), p);
        const double a1 = std::pow(a, 1.0 / p - 1.0);
        for (std::size_t i = 0; i < s.size(); ++i)
            out[i] = -a1 * std::pow(state_rho(s, i), p) / state_beta(s, i);
    };
    spec.dG_dxi = [p](const GenState& s, std::span<double> out) {
        double a = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) a += std::pow(state_rho(s, i), p);
        const double a1 = std::pow(a, 1.0 / p - 1.0);
        for (std::size_t i = 0; i < s.size(); ++i)
            out[i] = a1 * std::pow(state_rho(s, i), p) / state_beta(s, i);
    };
    return spec;
}

} // namespace

ZooEntry mtb_weighted_portfolio(double p) {
    ZooEntry e;
    e.name = "mtb_weighted";
    e.params["p"] = p;
    e.kind = ZooKind::direct_weight;
    if (p == 0.0) {
        e.description = "equal-weight alias (p = 0 limit)";
        return e;
    }
    e.description = "weights rho(t-)^p, tilting toward low market-to-book for small p";
    e.has_generator = true;
    e.normalize_at_start = true;
    e.generator = power_sum_rho_generator(p);
    return e;
}

ZooEntry diversity_weighted_portfolio(double p) {
    ZooEntry e;
    e.name = "diversity_weighted";
    e.params["p"] = p;
    e.kind = ZooKind::direct_weight;
    e.description = p == 0.0 ? "equal-weight alias (p = 0 limit)"
                             : "weights mu^p, tilting toward small stocks for p < 1";
    return e;
}

ZooEntry modified_book_value_generator(double m, double M) {
    if (!(0.0 < m && m < M)) throw BadConfig("need 0 < m < M");
    ZooEntry e;
    e.name = "modified_book_value";
    e.description = "book-value generator damped so Gamma^c is nondecreasing";
    e.kind = ZooKind::additive_generated;
    e.params["m"] = m;
    e.params["M"] = M;
    e.has_generator = true;

    GeneratorSpec& spec = e.generator;
    spec.name = "modified_book_value";
    spec.is_balanced = true;
    const double log_m = std::log(m), log_M = std::log(M);
    spec.value = [log_m, log_M](const GenState& s) {
        double lg = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            const double b = state_beta(s, i);
            lg += b * std::log(s.mu[i] / b) + (1.0 - log_M) * s.g[i] + (log_m - 1.0) * s.h[i];
        }
        return std::exp(lg);
    };
    spec.grad_mu = [value = spec.value](const GenState& s, std::span<double> out) {
        const double G = value(s);
        for (std::size_t i = 0; i < s.size(); ++i) out[i] = state_beta(s, i) / s.mu[i] * G;
    };
    spec.hess_mu = [value = spec.value](const GenState& s, Matrix& out) {
        const double G = value(s);
        const std::size_t d = s.size();
        for (std::size_t i = 0; i < d; ++i) {
            const double bi = state_beta(s, i);
            for (std::size_t j = 0; j < d; ++j) {
                const double bj = state_beta(s, j);
                out(i, j) = G * bi * bj / (s.mu[i] * s.mu[j]);
                if (i == j) out(i, j) -= G * bi / (s.mu[i] * s.mu[i]);
            }
        }
    };
    spec.dG_dgamma = [value = spec.value, log_M](const GenState& s, std::span<double> out) {
        const double G = value(s);
        for (std::size_t i = 0; i < s.size(); ++i)
            out[i] = (std::log(state_rho(s, i)) - log_M) * G;
    };
    spec.dG_dxi = [value = spec.value, log_m](const GenState& s, std::span<double> out) {
        const double G = value(s);
        for (std::size_t i = 0; i < s.size(); ++i)
            out[i] = (log_m - std::log(state_rho(s, i))) * G;
    };
    return e;
}

ZooEntry modified_mtb_generator(double p, double delta) {
    if (p == 0.0) throw BadConfig("p must be nonzero");
    if (!(delta > 0.0)) throw BadConfig("delta must be positive");
    ZooEntry e;
    e.name = "modified_mtb";
    e.description = "market-to-book power generator damped so Gamma^c is nondecreasing";
    e.kind = ZooKind::additive_generated;
    e.params["p"] = p;
    e.params["delta"] = delta;
    e.has_generator = true;

    GeneratorSpec& spec = e.generator;
    spec.name = "modified_mtb(p=" + std::to_string(p) + ")";
    spec.is_balanced = true;
    const auto s_of = [delta](const GenState& s, std::size_t i) {
        return state_rho(s, i) * s.g[i] * std::exp(-s.h[i] / delta);
    };
    spec.value = [p, s_of](const GenState& s) {
        double a = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) a += std::pow(s_of(s, i), p);
        return std::pow(a, 1.0 / p);
    };
    spec.grad_mu = [p, s_of](const GenState& s, std::span<double> out) {
        double a = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) a += std::pow(s_of(s, i), p);
        const double a1 = std::pow(a, 1.0 / p - 1.0);
        for (std::size_t i = 0; i < s.size(); ++i)
            out[i] = a1 * std::pow(s_of(s, i), p) / s.mu[i];
    };
    spec.hess_mu = [p, s_of](const GenState& s, Matrix& out) {
        const std::size_t d = s.size();
        double a = 0.0;
        for (std::size_t i = 0; i < d; ++i) a += std::pow(s_of(s, i), p);
        const double a1 = std::pow(a, 1.0 / p - 1.0);
        const double a2 = std::pow(a, 1.0 / p - 2.0);
        for (std::size_t i = 0; i < d; ++i) {
            const double si = std::pow(s_of(s, i), p) / s.mu[i];
            for (std::size_t j = 0; j < d; ++j) {
                const double sj = std::pow(s_of(s, j), p) / s.mu[j];
                out(i, j) = (1.0 - p) * (a2 * si * sj);
                if (i == j) out(i, j) -= (1.0 - p) * a1 * std::pow(s_of(s, i), p) / (s.mu[i] * s.mu[i]);
            }
        }
    };
    spec.dG_dgamma = [p, s_of](const GenState& s, std::span<double> out) {
        double a = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) a += std::pow(s_of(s, i), p);
        const double g_val = std::pow(a, 1.0 / p);
        for (std::size_t i = 0; i < s.size(); ++i) {
            const double w = std::pow(s_of(s, i), p) / a;
            out[i] = -g_val * (s.h[i] / (state_beta(s, i) * s.g[i])) * w;
        }
    };
    spec.dG_dxi = [p, delta, s_of](const GenState& s, std::span<double> out) {
        double a = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) a += std::pow(s_of(s, i), p);
        const double g_val = std::pow(a, 1.0 / p);
        for (std::size_t i = 0; i < s.size(); ++i) {
            const double w = std::pow(s_of(s, i), p) / a;
            out[i] = g_val * (1.0 / state_beta(s, i) - 1.0 / delta) * w;
        }
    };
    return e;
}

ZooEntry logarithmic_generator(double m, double M, double delta) {
    if (!(0.0 < m && m < M)) throw BadConfig("need 0 < m < M");
    if (!(delta > 0.0)) throw BadConfig("delta must be positive");
    ZooEntry e;
    e.name = "logarithmic";
    e.description = "sum of log(1 + rho) terms; unbalanced, continuous books only";
    e.kind = ZooKind::additive_generated;
    e.params["m"] = m;
    e.params["M"] = M;
    e.params["delta"] = delta;
    e.has_generator = true;

    const double kappa = (1.0 + m) / m * std::log(1.0 + m);
    e.params["kappa"] = kappa;

    GeneratorSpec& spec = e.generator;
    spec.name = "logarithmic";
    spec.is_balanced = false;
    spec.requires_continuous_aux = true;
    const double dk = delta * kappa;
    spec.value = [dk](const GenState& s) {
        double v = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i)
            v += std::log1p(state_rho(s, i)) * std::exp(-s.h[i] / dk);
        return v;
    };
    spec.grad_mu = [dk](const GenState& s, std::span<double> out) {
        for (std::size_t i = 0; i < s.size(); ++i)
            out[i] = std::exp(-s.h[i] / dk) / (state_beta(s, i) + s.mu[i]);
    };
    spec.hess_mu = [dk](const GenState& s, Matrix& out) {
        const std::size_t d = s.size();
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) {
                const double bi = state_beta(s, i) + s.mu[i];
                out(i, j) = i == j ? -std::exp(-s.h[i] / dk) / (bi * bi) : 0.0;
            }
    };
    spec.dG_dgamma = [dk](const GenState& s, std::span<double> out) {
        for (std::size_t i = 0; i < s.size(); ++i)
            out[i] = -std::exp(-s.h[i] / dk) * state_rho(s, i) / (state_beta(s, i) + s.mu[i]);
    };
    spec.dG_dxi = [dk](const GenState& s, std::span<double> out) {
        for (std::size_t i = 0; i < s.size(); ++i) {
            const double ei = std::exp(-s.h[i] / dk);
            out[i] = ei * (state_rho(s, i) / (state_beta(s, i) + s.mu[i]) -
                           std::log1p(state_rho(s, i)) / dk);
        }
    };
    return e;
}

ZooEntry rank_constant_rebalanced(std::vector<double> c) {
    double sum = 0.0;
    for (double x : c) sum += x;
    if (std::abs(sum - 1.0) > 1e-12)
        throw BadComposition("rank coefficients sum to " + std::to_string(sum) + ", expected 1");
    ZooEntry e;
    e.name = "rank_cr";
    e.description = "constant proportion c_k in the k-th ranked market-to-book stock";
    e.kind = ZooKind::rank_constant_rebalanced;
    e.rank_by = RankBy::rho;
    e.rank_coeffs = [c](std::size_t d) {
        if (c.size() != d) throw BadComposition("rank coefficient vector does not match d");
        return c;
    };
    return e;
}

namespace {

ZooEntry ew_block(std::size_t l, bool top, RankBy by) {
    if (l == 0) throw BadConfig("block size must be positive");
    ZooEntry e;
    e.name = (top ? std::string("ew_top") : std::string("ew_bottom")) +
             (by == RankBy::mu ? "_mu" : "");
    e.description = top ? "equal weight over the top-ranked block"
                        : "equal weight over the bottom-ranked block";
    e.kind = ZooKind::rank_constant_rebalanced;
    e.rank_by = by;
    e.params["l"] = static_cast<double>(l);
    e.rank_coeffs = [l, top](std::size_t d) {
        if (l > d) throw BadConfig("block size exceeds the number of stocks");
        std::vector<double> c(d, 0.0);
        for (std::size_t k = 0; k < l; ++k) c[top ? k : d - 1 - k] = 1.0 / static_cast<double>(l);
        return c;
    };
    return e;
}

} // namespace

ZooEntry ew_top(std::size_t l, RankBy by) { return ew_block(l, true, by); }
ZooEntry ew_bottom(std::size_t l, RankBy by) { return ew_block(l, false, by); }

ZooEntry top_one() {
    ZooEntry e = ew_block(1, true, RankBy::rho);
    e.name = "top_one";
    e.description = "all wealth in the highest market-to-book stock";
    return e;
}

ZooEntry bottom_one() {
    ZooEntry e = ew_block(1, false, RankBy::rho);
    e.name = "bottom_one";
    e.description = "all wealth in the lowest market-to-book stock";
    return e;
}

WeightRule ZooEntry::make_rule() const {
    if (name == "market")
        return [](const MarketView& view) {
            std::vector<double> w(view.stocks());
            for (std::size_t i = 0; i < w.size(); ++i) w[i] = view.mu(view.current(), i);
            return normalized(std::move(w));
        };
    if (name == "equal_weight" || (params.count("p") && params.at("p") == 0.0))
        return [](const MarketView& view) {
            return std::vector<double>(view.stocks(), 1.0 / static_cast<double>(view.stocks()));
        };
    if (name == "book_value")
        return [](const MarketView& view) {
            std::vector<double> w(view.stocks());
            for (std::size_t i = 0; i < w.size(); ++i) w[i] = view.beta_left(view.current(), i);
            return normalized(std::move(w));
        };
    if (name == "mtb_weighted") {
        const double p = params.at("p");
        return [p](const MarketView& view) {
            std::vector<double> w(view.stocks());
            for (std::size_t i = 0; i < w.size(); ++i)
                w[i] = std::pow(view.rho_left(view.current(), i), p);
            return normalized(std::move(w));
        };
    }
    if (name == "diversity_weighted") {
        const double p = params.at("p");
        return [p](const MarketView& view) {
            std::vector<double> w(view.stocks());
            for (std::size_t i = 0; i < w.size(); ++i)
                w[i] = std::pow(view.mu(view.current(), i), p);
            return normalized(std::move(w));
        };
    }
    if (kind == ZooKind::rank_constant_rebalanced) {
        const RankBy by = rank_by;
        const auto coeffs = rank_coeffs;
        return [by, coeffs](const MarketView& view) {
            const std::size_t d = view.stocks();
            const std::size_t s = view.current();
            std::vector<double> values(d);
            for (std::size_t i = 0; i < d; ++i)
                values[i] = by == RankBy::rho ? view.rho_left(s, i) : view.mu(s, i);
            const std::vector<double> c = coeffs(d);
            const std::vector<std::size_t> order = descending_order(values);
            std::vector<double> w(d, 0.0);
            for (std::size_t k = 0; k < d; ++k) w[order[k]] += c[k];
            return w;
        };
    }
    if (kind == ZooKind::additive_generated) {
        AdditiveRuleState st;
        st.spec = generator;
        if (params.count("m")) {
            st.m = params.at("m");
            st.M = params.at("M");
            st.check_rho_bounds = true;
        }
        if (params.count("delta")) {
            st.delta = params.at("delta");
            st.check_delta = true;
        }
        st.continuous_only = generator.requires_continuous_aux;
        return make_additive_rule(std::move(st));
    }
    throw UnknownPortfolio("no weight rule for '" + name + "'");
}

BookValueDecomposition book_value_log_decomposition(const WeightPath& path) {
    const std::size_t n = path.steps();
    const std::size_t d = path.stocks();
    BookValueDecomposition dec;
    dec.log_g_term.assign(n, 0.0);
    dec.quadratic_term.assign(n, 0.0);
    dec.beta_term.assign(n, 0.0);
    dec.log_v.assign(n, 0.0);

    double lg0 = 0.0;
    for (std::size_t i = 0; i < d; ++i)
        lg0 += path.beta(0, i) * std::log(path.rho(0, i));

    double quad = 0.0, beta_int = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
        if (l > 0) {
            const bool flagged = path.jump_flags[l] != 0;
            double own = 0.0, cross = 0.0;
            for (std::size_t i = 0; i < d; ++i) {
                const double dmu = path.mu(l, i) - path.mu(l - 1, i);
                own += dmu * dmu / (path.rho(l - 1, i) * path.mu(l - 1, i));
                cross += dmu / path.rho(l - 1, i);
                if (!flagged)
                    beta_int -= std::log(path.rho(l - 1, i)) *
                                (path.beta(l, i) - path.beta(l - 1, i));
            }
            quad += 0.5 * own - 0.5 * cross * cross;
        }
        double lg = 0.0;
        for (std::size_t i = 0; i < d; ++i)
            lg += path.beta_left(l, i) * std::log(path.rho_left(l, i));
        dec.log_g_term[l] = lg - lg0;
        dec.quadratic_term[l] = quad;
        dec.beta_term[l] = beta_int;
        dec.log_v[l] = dec.log_g_term[l] + quad + beta_int;
    }
    return dec;
}

namespace {

const std::vector<std::string> kZooNames = {
    "market",        "equal_weight",        "book_value",     "mtb_weighted",
    "diversity_weighted", "modified_book_value", "modified_mtb",   "logarithmic",
    "rank_cr",       "ew_top",              "ew_bottom",      "ew_top_mu",
    "ew_bottom_mu",  "top_one",             "bottom_one",
};

} // namespace

std::vector<std::string> zoo_names() { return kZooNames; }

ZooEntry make_entry(const std::string& name, const std::map<std::string, double>& params,
                    const WeightPath* path_hint) {
    const auto bounds = [&]() -> RhoBounds {
        if (params.count("m") && params.count("M")) return {params.at("m"), params.at("M")};
        if (path_hint) {
            RhoBounds rb = rho_bounds(*path_hint, 2.0);
            if (params.count("m")) rb.m = params.at("m");
            if (params.count("M")) rb.M = params.at("M");
            return rb;
        }
        throw BadConfig("'" + name + "' needs m and M (or a data panel to estimate them)");
    };
    const auto delta_of = [&]() -> double {
        if (params.count("delta")) return params.at("delta");
        if (path_hint) return 0.5 * min_beta(*path_hint);
        throw BadConfig("'" + name + "' needs delta (or a data panel to estimate it)");
    };

    if (name == "market") return market_portfolio();
    if (name == "equal_weight") return equal_weight();
    if (name == "book_value") {
        ZooEntry e = book_value_generator();
        // optional path bounds: enforced by check_path when supplied
        if (params.count("m")) e.params["m"] = params.at("m");
        if (params.count("M")) e.params["M"] = params.at("M");
        return e;
    }
    if (name == "mtb_weighted") return mtb_weighted_portfolio(get_param(params, "p"));
    if (name == "diversity_weighted")
        return diversity_weighted_portfolio(get_param(params, "p"));
    if (name == "modified_book_value") {
        const RhoBounds rb = bounds();
        return modified_book_value_generator(rb.m, rb.M);
    }
    if (name == "modified_mtb")
        return modified_mtb_generator(get_param(params, "p"), delta_of());
    if (name == "logarithmic") {
        const RhoBounds rb = bounds();
        return logarithmic_generator(rb.m, rb.M, delta_of());
    }
    if (name == "rank_cr") {
        std::vector<double> c;
        for (std::size_t k = 1; params.count("c" + std::to_string(k)); ++k)
            c.push_back(params.at("c" + std::to_string(k)));
        if (c.empty()) throw BadConfig("rank_cr needs coefficients c1, c2, ...");
        return rank_constant_rebalanced(std::move(c));
    }
    const auto block = [&](bool top, RankBy by) {
        const auto l = static_cast<std::size_t>(get_param(params, "l"));
        return top ? ew_top(l, by) : ew_bottom(l, by);
    };
    if (name == "ew_top") return block(true, RankBy::rho);
    if (name == "ew_bottom") return block(false, RankBy::rho);
    if (name == "ew_top_mu") return block(true, RankBy::mu);
    if (name == "ew_bottom_mu") return block(false, RankBy::mu);
    if (name == "top_one") return top_one();
    if (name == "bottom_one") return bottom_one();
    throw UnknownPortfolio("unknown portfolio '" + name + "'");
}

ZooEntry parse_entry(const std::string& text, const WeightPath* path_hint) {
    const auto colon = text.find(':');
    const std::string name = text.substr(0, colon);
    std::map<std::string, double> params;
    if (colon != std::string::npos) {
        std::stringstream rest(text.substr(colon + 1));
        std::string kv;
        while (std::getline(rest, kv, ',')) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos)
                throw BadConfig("expected key=value in portfolio spec '" + text + "'");
            try {
                params[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
            } catch (const std::exception&) {
                throw BadConfig("bad numeric value in portfolio spec '" + text + "'");
            }
        }
    }
    return make_entry(name, params, path_hint);
}

} // namespace spt
