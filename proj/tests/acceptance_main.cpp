// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// gating criterion fails. The final data-dependent reproduction runs only
// when FGP_PANEL / FGP_UNIVERSE point at a Compustat-format panel.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <random>
#include <vector>

#include "spt/attribution.hpp"
#include "spt/backtest.hpp"
#include "spt/csv_io.hpp"
#include "spt/errors.hpp"
#include "spt/gamma.hpp"
#include "spt/generator.hpp"
#include "spt/market_model.hpp"
#include "spt/rank.hpp"
#include "spt/sim.hpp"
#include "spt/strategy.hpp"
#include "spt/zoo.hpp"

using namespace spt;

namespace {

int g_failures = 0;

void report(const std::string& name, bool pass, const std::string& detail) {
    std::cout << (pass ? "[PASS] " : "[FAIL] ") << name << "  " << detail << "\n";
    if (!pass) ++g_failures;
}

void report_skip(const std::string& name, const std::string& detail) {
    std::cout << "[SKIP] " << name << "  " << detail << "\n";
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

SimConfig base_config(std::uint64_t seed, double dt, std::size_t n_steps, BookMode mode) {
    SimConfig cfg;
    cfg.d = 5;
    cfg.dt = dt;
    cfg.n_steps = n_steps;
    cfg.seed = seed;
    cfg.book_mode = mode;
    cfg.drifts = {0.02, 0.01, 0.0, -0.01, 0.03};
    cfg.vol_matrix = Matrix(5, 5, 0.0);
    const double vols[5] = {0.18, 0.22, 0.25, 0.20, 0.30};
    for (std::size_t i = 0; i < 5; ++i) cfg.vol_matrix(i, i) = vols[i];
    cfg.book_drift = {0.01, -0.01, 0.02, 0.0, -0.02};
    cfg.book_update_interval = 5000; // annual_jump mode: two updates on [0, 1]
    return cfg;
}

std::vector<ZooEntry> wealth_identity_entries(const WeightPath& path) {
    const RhoBounds rb = rho_bounds(path, 2.0);
    const double delta = 0.5 * min_beta(path);
    return {
        book_value_generator(),
        modified_book_value_generator(rb.m, rb.M),
        modified_mtb_generator(1.0, delta),
        modified_mtb_generator(0.5, delta),
        logarithmic_generator(rb.m, rb.M, delta),
    };
}

GeneratorSpec resolved(const ZooEntry& entry, const WeightPath& path) {
    return entry.normalize_at_start ? normalize_at(entry.generator, path) : entry.generator;
}

// --- criterion 1: additive wealth identity -------------------------------

void criterion_additive() {
    const auto t0 = std::chrono::steady_clock::now();
    // one underlying path at dt = 5e-5; the dt = 1e-4 grid is its coarsening
    const MarketSeries fine = simulate(base_config(101, 5e-5, 20001, BookMode::continuous));

    double worst_coarse = 0.0, worst_fine = 0.0;
    bool non_increasing = true;
    std::string detail;
    for (const std::size_t factor : {2, 1}) {
        const WeightPath path = compute_weights(coarsen(fine, factor));
        double worst = 0.0;
        for (const ZooEntry& entry : wealth_identity_entries(path)) {
            const StrategyPath sp = additive_strategy(resolved(entry, path), path);
            const OraclePath oracle = replicate(sp, path);
            worst = std::max(worst, oracle.max_abs_gap);
            if (factor == 2)
                detail += entry.name + "=" + fmt(oracle.max_abs_gap) + " ";
        }
        (factor == 2 ? worst_coarse : worst_fine) = worst;
    }
    // the additive gaps sit at rounding level on continuous paths, so the
    // halving comparison carries an epsilon of slack
    non_increasing = worst_fine <= worst_coarse + 1e-12;
    const double elapsed = seconds_since(t0);
    report("additive_wealth_identity",
           worst_coarse <= 1e-3 && non_increasing && elapsed <= 60.0,
           "max_gap(dt=1e-4)=" + fmt(worst_coarse) +
               " max_gap(dt=5e-5)=" + fmt(worst_fine) +
               " runtime=" + fmt(elapsed) + "s");
}

// --- criterion 2: multiplicative wealth identity --------------------------

void criterion_multiplicative() {
    const MarketSeries fine = simulate(base_config(102, 5e-5, 20001, BookMode::continuous));
    double worst_coarse = 0.0, worst_fine = 0.0;
    double beta_weight_err = 0.0;
    for (const std::size_t factor : {2, 1}) {
        const WeightPath path = compute_weights(coarsen(fine, factor));
        double worst = 0.0;
        for (const ZooEntry& entry : wealth_identity_entries(path)) {
            const StrategyPath sp = multiplicative_strategy(resolved(entry, path), path);
            const OraclePath oracle = replicate(sp, path);
            worst = std::max(worst, oracle.max_abs_gap / std::abs(sp.closed_form_wealth[0]));
            if (entry.name == "book_value" && factor == 2) {
                const Matrix pi = weights_from_strategy(sp, path);
                for (std::size_t l = 0; l < path.steps(); ++l)
                    for (std::size_t i = 0; i < path.stocks(); ++i)
                        beta_weight_err = std::max(
                            beta_weight_err, std::abs(pi(l, i) - path.beta_left(l, i)));
            }
        }
        (factor == 2 ? worst_coarse : worst_fine) = worst;
    }
    report("multiplicative_wealth_identity",
           worst_coarse <= 1e-3 && worst_fine <= worst_coarse && beta_weight_err <= 1e-12,
           "max_gap(dt=1e-4)=" + fmt(worst_coarse) +
               " max_gap(dt=5e-5)=" + fmt(worst_fine) +
               " |pi-beta(t-)|=" + fmt(beta_weight_err));
}

// --- criterion 3: jump handling -------------------------------------------

void criterion_jumps() {
    const MarketSeries series = simulate(base_config(103, 1e-4, 10001, BookMode::annual_jump));
    const WeightPath path = compute_weights(series);
    if (!path.has_jumps()) {
        report("jump_handling", false, "simulation produced no flagged steps");
        return;
    }
    const RhoBounds rb = rho_bounds(path, 2.0);
    const double delta = 0.5 * min_beta(path);
    const std::vector<ZooEntry> balanced = {
        book_value_generator(),
        modified_book_value_generator(rb.m, rb.M),
        modified_mtb_generator(1.0, delta),
        modified_mtb_generator(0.5, delta),
    };
    double worst_jump_identity = 0.0, worst_gap = 0.0;
    for (const ZooEntry& entry : balanced) {
        for (const bool multiplicative : {false, true}) {
            const GeneratorSpec spec = resolved(entry, path);
            const StrategyPath sp =
                multiplicative ? multiplicative_strategy(spec, path) : additive_strategy(spec, path);
            for (std::size_t l = 1; l < path.steps(); ++l) {
                if (!path.jump_flags[l]) continue;
                double jump_sum = 0.0;
                for (std::size_t i = 0; i < path.stocks(); ++i)
                    jump_sum += (sp.theta_post(l, i) - sp.theta(l, i)) * path.mu(l, i);
                const double dg = sp.ledger.g_values[l] - sp.ledger.g_left_values[l];
                worst_jump_identity = std::max(worst_jump_identity, std::abs(jump_sum - dg));
            }
            const OraclePath oracle = replicate(sp, path);
            worst_gap = std::max(worst_gap, oracle.max_abs_gap /
                                                std::max(1.0, std::abs(sp.closed_form_wealth[0])));
        }
    }

    bool rejected = false;
    GeneratorSpec unbalanced;
    unbalanced.name = "sum_of_squares";
    unbalanced.value = [](const GenState& s) {
        double v = 0.0;
        for (double m : s.mu) v += m * m;
        return v;
    };
    unbalanced.grad_mu = [](const GenState& s, std::span<double> out) {
        for (std::size_t i = 0; i < s.size(); ++i) out[i] = 2.0 * s.mu[i];
    };
    try {
        additive_strategy(unbalanced, path);
    } catch (const UnbalancedWithJumps&) {
        rejected = true;
    }

    report("jump_handling",
           worst_jump_identity <= 1e-10 && worst_gap <= 1e-3 && rejected,
           "max|sum(dtheta*mu)-dG|=" + fmt(worst_jump_identity) +
               " max_oracle_gap=" + fmt(worst_gap) +
               (rejected ? " unbalanced_rejected" : " unbalanced_NOT_rejected"));
}

// --- criterion 4: balance and derivative checks ----------------------------

void criterion_balance_checks() {
    const auto t0 = std::chrono::steady_clock::now();
    // random interior states: mu, beta in the simplex interior, h >= 0
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> unif(0.05, 1.0);
    const std::size_t d = 5;
    std::vector<std::vector<double>> mus(1000), gs(1000), hs(1000);
    for (std::size_t k = 0; k < 1000; ++k) {
        std::vector<double> mu(d), beta(d), h(d), g(d);
        double mu_sum = 0.0, beta_sum = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            mu[i] = unif(rng);
            beta[i] = unif(rng);
            mu_sum += mu[i];
            beta_sum += beta[i];
        }
        for (std::size_t i = 0; i < d; ++i) {
            mu[i] /= mu_sum;
            beta[i] /= beta_sum;
            h[i] = 0.2 * unif(rng);
            g[i] = beta[i] + h[i];
        }
        mus[k] = mu;
        gs[k] = g;
        hs[k] = h;
    }
    std::vector<GenState> states;
    states.reserve(1000);
    for (std::size_t k = 0; k < 1000; ++k) states.push_back({mus[k], gs[k], hs[k]});

    const std::vector<ZooEntry> entries = {
        book_value_generator(),
        mtb_weighted_portfolio(0.5),
        mtb_weighted_portfolio(1.0),
        modified_book_value_generator(1e-4, 1e4),
        modified_mtb_generator(1.0, 1e-4),
        modified_mtb_generator(0.5, 1e-4),
    };
    double worst_balance = 0.0, worst_grad = 0.0;
    for (const ZooEntry& entry : entries) {
        if (!entry.generator.is_balanced) continue;
        const DerivativeCheckResult res = check_derivatives(entry.generator, states);
        worst_balance = std::max(worst_balance, res.max_balance_rel_err);
        worst_grad = std::max(worst_grad, std::max(res.max_grad_rel_err, res.max_aux_rel_err));
    }
    const double elapsed = seconds_since(t0);
    report("balance_and_derivative_checks",
           worst_balance <= 1e-9 && worst_grad <= 1e-6 && elapsed <= 10.0,
           "balance=" + fmt(worst_balance) + " grad=" + fmt(worst_grad) +
               " runtime=" + fmt(elapsed) + "s");
}

// --- criterion 5: Gamma monotonicity ---------------------------------------

void criterion_gamma_monotone() {
    double worst_drop = 0.0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        SimConfig cfg = base_config(seed, 1e-3, 1001, BookMode::continuous);
        const WeightPath path = compute_weights(simulate(cfg));
        const RhoBounds rb = rho_bounds(path, 2.0);
        const double delta = 0.5 * min_beta(path);
        const std::vector<ZooEntry> entries = {
            modified_book_value_generator(rb.m, rb.M),
            modified_mtb_generator(1.0, delta),
            modified_mtb_generator(0.5, delta),
            logarithmic_generator(rb.m, rb.M, delta),
        };
        for (const ZooEntry& entry : entries) {
            const GammaLedger led = accumulate_gamma(entry.generator, path, /*precheck=*/false);
            for (std::size_t l = 1; l < led.steps(); ++l)
                worst_drop =
                    std::max(worst_drop, led.gamma_continuous[l - 1] - led.gamma_continuous[l]);
        }
    }
    report("gamma_monotonicity", worst_drop <= 1e-12,
           "worst_decrease=" + fmt(worst_drop) + " over 100 seeds x 4 generators");
}

// --- criterion 6: rank engine ----------------------------------------------

void criterion_rank_engine() {
    // symmetric equivalence
    SimConfig cfg = base_config(106, 1e-4, 10001, BookMode::continuous);
    cfg.drifts.assign(5, 0.0);
    const WeightPath path = compute_weights(simulate(cfg));
    const RankFrame frame = rank_path(path.rho);
    const LocalTimeSet lt = estimate_local_times(frame);

    RankGeneratorSpec sym;
    sym.name = "sum_of_ranks";
    sym.value = [](std::span<const double> nu) {
        double s = 0.0;
        for (double x : nu) s += x;
        return s;
    };
    sym.grad = [](std::span<const double> nu, std::span<double> out) {
        (void)nu;
        std::fill(out.begin(), out.end(), 1.0);
    };
    sym.hess = [](std::span<const double> nu, Matrix& out) {
        for (std::size_t i = 0; i < nu.size(); ++i)
            for (std::size_t j = 0; j < nu.size(); ++j) out(i, j) = 0.0;
    };
    GeneratorSpec flat;
    flat.name = "sum_of_rhos";
    flat.value = [](const GenState& s) {
        double acc = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) acc += s.mu[i] / (s.g[i] - s.h[i]);
        return acc;
    };
    flat.grad_mu = [](const GenState& s, std::span<double> out) {
        for (std::size_t i = 0; i < s.size(); ++i) out[i] = 1.0 / (s.g[i] - s.h[i]);
    };
    flat.hess_mu = [](const GenState& s, Matrix& out) {
        for (std::size_t i = 0; i < s.size(); ++i)
            for (std::size_t j = 0; j < s.size(); ++j) out(i, j) = 0.0;
    };
    const StrategyPath ranked_sp = rank_additive_strategy(sym, path, frame, lt);
    const StrategyPath flat_sp = additive_strategy(flat, path);
    double sym_gap = 0.0;
    for (std::size_t l = 0; l < path.steps(); ++l)
        sym_gap = std::max(sym_gap, std::abs(ranked_sp.wealth[l] - flat_sp.wealth[l]));

    // constant-rebalanced weights are exactly the rank indicators
    RankGeneratorSpec cr;
    const std::vector<double> c = {0.5, 0.5, 0.0, 0.0, 0.0};
    cr.name = "ew_top2";
    cr.value = [c](std::span<const double> nu) {
        double lg = 0.0;
        for (std::size_t k = 0; k < nu.size(); ++k)
            if (c[k] != 0.0) lg += c[k] * std::log(nu[k]);
        return std::exp(lg);
    };
    cr.grad = [c, value = cr.value](std::span<const double> nu, std::span<double> out) {
        const double gv = value(nu);
        for (std::size_t k = 0; k < nu.size(); ++k) out[k] = c[k] * gv / nu[k];
    };
    const StrategyPath cr_sp = rank_multiplicative_strategy(cr, path, frame, lt);
    const Matrix pi = weights_from_strategy(cr_sp, path);
    double cr_err = 0.0;
    for (std::size_t l = 0; l < path.steps(); ++l)
        for (std::size_t i = 0; i < path.stocks(); ++i) {
            double expect = 0.0;
            for (std::size_t k = 0; k < c.size(); ++k)
                if (frame.perm(l, k) == i) expect += c[k];
            cr_err = std::max(cr_err, std::abs(pi(l, i) - expect));
        }

    // Brownian local-time Monte Carlo, 1e4 paths at dt = 1e-4
    const std::size_t paths = 10000, steps = 10000;
    const double dt = 1e-4;
    NormalSampler normal(424242);
    Matrix vals(steps + 1, 2);
    double sum = 0.0;
    for (std::size_t p = 0; p < paths; ++p) {
        double b = 0.0;
        vals(0, 0) = 0.0;
        vals(0, 1) = 0.0;
        for (std::size_t l = 1; l <= steps; ++l) {
            b += std::sqrt(dt) * normal.next();
            vals(l, 0) = b;
            vals(l, 1) = 0.0;
        }
        const LocalTimeSet plt = estimate_local_times(rank_path(vals));
        sum += plt.L(steps, 0);
    }
    const double mc_mean = sum / paths;
    const double target = std::sqrt(2.0 / std::numbers::pi);
    const double mc_rel = std::abs(mc_mean - target) / target;

    // lexicographic tie cases
    Matrix tie(1, 3);
    tie(0, 0) = 2.0;
    tie(0, 1) = 2.0;
    tie(0, 2) = 1.0;
    const RankFrame tf = rank_path(tie);
    const bool ties_ok = tf.perm(0, 0) == 0 && tf.perm(0, 1) == 1 && tf.perm(0, 2) == 2;

    report("rank_engine",
           sym_gap <= 1e-9 && cr_err <= 1e-12 && mc_rel <= 0.15 && ties_ok,
           "sym_gap=" + fmt(sym_gap) + " cr_err=" + fmt(cr_err) +
               " local_time_mean=" + fmt(mc_mean) + " (target " +
               fmt(target) + ", rel " + fmt(mc_rel) + ")" +
               (ties_ok ? " ties_ok" : " ties_bad"));
}

// --- criterion 7: log-wealth decomposition ---------------------------------

void criterion_decomposition() {
    // continuous books: three series sum to the replicated log wealth
    const MarketSeries series = simulate(base_config(107, 1e-4, 10001, BookMode::continuous));
    const WeightPath path = compute_weights(series);
    const BookValueDecomposition dec = book_value_log_decomposition(path);
    const StrategyPath sp =
        multiplicative_strategy(normalize_at(book_value_generator().generator, path), path);
    const OraclePath oracle = replicate(sp, path);
    double sum_err = 0.0, quad_drop = 0.0;
    for (std::size_t l = 0; l < path.steps(); ++l) {
        sum_err = std::max(sum_err,
                           std::abs(dec.log_v[l] - std::log(oracle.replicated_wealth[l])));
        if (l > 0) quad_drop = std::max(quad_drop, dec.quadratic_term[l - 1] - dec.quadratic_term[l]);
    }

    // piecewise-constant books: the beta integral vanishes identically
    const WeightPath pj =
        compute_weights(simulate(base_config(108, 1e-4, 10001, BookMode::annual_jump)));
    const BookValueDecomposition decj = book_value_log_decomposition(pj);
    double beta_term_max = 0.0;
    for (double b : decj.beta_term) beta_term_max = std::max(beta_term_max, std::abs(b));

    report("log_wealth_decomposition",
           sum_err <= 1e-3 && quad_drop <= 1e-15 && beta_term_max == 0.0,
           "sum_vs_replicated=" + fmt(sum_err) +
               " worst_quad_decrease=" + fmt(quad_drop) +
               " beta_term_with_constant_books=" + fmt(beta_term_max));
}

// --- criterion 8: attribution ----------------------------------------------

void criterion_attribution() {
    const MarketSeries series = simulate(base_config(109, 1e-3, 2001, BookMode::continuous));
    const WeightPath path = compute_weights(series);
    const RankFrame mu_frame = rank_path(path.mu);
    const RankFrame rho_frame = rank_path(path.rho);

    const BacktestResult market_res =
        run_backtest(series, path, market_portfolio().make_rule());
    const AttributionReport market_rep =
        attribute_series(market_res, path, mu_frame, rho_frame);
    double market_max = 0.0;
    for (std::size_t l = 0; l < market_rep.dc.size(); ++l)
        market_max = std::max({market_max, std::abs(market_rep.dc[l]),
                               std::abs(market_rep.mbrc[l])});

    const std::vector<double> pi = {0.5, 0.5};
    const std::vector<double> mu0 = {0.8, 0.2};
    const std::vector<double> mu1 = {0.6, 0.4};
    const std::vector<std::size_t> perm = {0, 1};
    const double dc =
        distributional_component(pi, mu0, mu1, perm, std::vector<double>{0.6, 0.4});
    const double hand_err = std::abs(dc - std::log(1.375));

    const BacktestResult bv_res =
        run_backtest(series, path, book_value_generator().make_rule());
    const AttributionReport rep = attribute_series(bv_res, path, mu_frame, rho_frame);
    double recompute_err = 0.0;
    for (std::size_t l = 0; l + 1 < path.steps(); ++l) {
        double dc_acc = 0.0, mbrc_acc = 0.0;
        for (std::size_t k = 0; k < path.stocks(); ++k) {
            const std::size_t p0 = mu_frame.perm(l, k);
            dc_acc += bv_res.weights_used(l, p0) / path.mu(l, p0) * mu_frame.ranked(l + 1, k);
            const std::size_t r0 = rho_frame.perm(l, k);
            const std::size_t r1 = rho_frame.perm(l + 1, k);
            mbrc_acc += bv_res.weights_used(l, r0) / path.mu(l, r0) * path.mu(l + 1, r1);
        }
        recompute_err = std::max({recompute_err, std::abs(rep.dc[l] - std::log(dc_acc)),
                                  std::abs(rep.mbrc[l] - std::log(mbrc_acc))});
    }

    report("attribution",
           market_max <= 1e-12 && hand_err <= 1e-12 && recompute_err <= 1e-15,
           "market_max=" + fmt(market_max) + " hand_err=" + fmt(hand_err) +
               " recompute_err=" + fmt(recompute_err));
}

// --- criterion 9: backtester fixed points -----------------------------------

void criterion_backtester() {
    const MarketSeries series = simulate(base_config(110, 1e-3, 3001, BookMode::annual_jump));
    const WeightPath path = compute_weights(series);

    const BacktestResult market_res =
        run_backtest(series, path, market_portfolio().make_rule());
    double market_err = 0.0;
    for (double v : market_res.relative_value)
        market_err = std::max(market_err, std::abs(v - 1.0));

    const WeightRule single = [](const MarketView& view) {
        std::vector<double> w(view.stocks(), 0.0);
        w[0] = 1.0;
        return w;
    };
    const BacktestResult single_res = run_backtest(series, path, single);
    double single_err = 0.0;
    for (std::size_t l = 0; l < path.steps(); ++l)
        single_err = std::max(single_err, std::abs(single_res.relative_value[l] -
                                                   path.mu(l, 0) / path.mu(0, 0)));

    MarketSeries scaled = series;
    for (std::size_t l = 0; l < scaled.steps(); ++l) {
        const double factor = std::exp(0.2 * std::sin(0.3 * static_cast<double>(l)));
        for (std::size_t i = 0; i < scaled.stocks(); ++i) scaled.caps(l, i) *= factor;
    }
    const WeightPath scaled_path = compute_weights(scaled);
    const BacktestResult a = run_backtest(series, path, book_value_generator().make_rule());
    const BacktestResult b =
        run_backtest(scaled, scaled_path, book_value_generator().make_rule());
    double scale_err = 0.0;
    for (std::size_t l = 0; l < a.steps(); ++l)
        scale_err = std::max(scale_err, std::abs(a.relative_value[l] - b.relative_value[l]));

    report("backtester_fixed_points",
           market_err <= 1e-12 && single_err <= 1e-12 && scale_err <= 1e-12,
           "market=" + fmt(market_err) + " single_stock=" + fmt(single_err) +
               " numeraire=" + fmt(scale_err));
}

// --- criterion 10: determinism and round-trip --------------------------------

void criterion_determinism() {
    const SimConfig cfg = base_config(111, 1e-3, 2001, BookMode::annual_jump);
    const MarketSeries s1 = simulate(cfg);
    const MarketSeries s2 = simulate(cfg);
    const bool identical = s1.caps.data() == s2.caps.data() &&
                           s1.books.data() == s2.books.data() &&
                           s1.book_update_flags == s2.book_update_flags;

    std::vector<std::string> tickers(s1.stocks());
    for (std::size_t i = 0; i < tickers.size(); ++i) tickers[i] = "S" + std::to_string(i + 1);
    const std::string dir = "acceptance_tmp";
    std::filesystem::create_directories(dir);
    export_panel(s1, tickers, dir + "/panel.csv", dir + "/universe.txt");
    const Panel back = ingest_panel(dir + "/panel.csv", dir + "/universe.txt");
    const WeightPath pa = compute_weights(s1);
    const WeightPath pb = compute_weights(back.series);
    double rt_err = 0.0;
    for (std::size_t l = 0; l < pa.steps(); ++l) {
        rt_err = std::max(rt_err, std::abs(pa.times[l] - pb.times[l]));
        for (std::size_t i = 0; i < pa.stocks(); ++i)
            rt_err = std::max({rt_err, std::abs(pa.mu(l, i) - pb.mu(l, i)),
                               std::abs(pa.beta(l, i) - pb.beta(l, i)),
                               std::abs(pa.g(l, i) - pb.g(l, i)),
                               std::abs(pa.h(l, i) - pb.h(l, i))});
    }
    std::filesystem::remove_all(dir);

    report("determinism_and_round_trip", identical && rt_err <= 1e-12,
           std::string(identical ? "seeded_sim_bitwise_identical" : "SIM_NOT_DETERMINISTIC") +
               " csv_round_trip_err=" + fmt(rt_err));
}

// --- criterion 11: data-dependent reproduction (non-gating) ------------------

void criterion_compustat() {
    const char* panel = std::getenv("FGP_PANEL");
    const char* universe = std::getenv("FGP_UNIVERSE");
    if (panel == nullptr || universe == nullptr) {
        report_skip("compustat_reproduction",
                    "set FGP_PANEL and FGP_UNIVERSE to a 500-stock Compustat-format panel to "
                    "compare against the published final values (top/bottom 250 by "
                    "market-to-book: 2.77319 / 8.74458, by size: 2.28933 / 10.5868); "
                    "non-gating");
        return;
    }
    const Panel p = ingest_panel(panel, universe);
    const WeightPath path = compute_weights(p.series);
    const std::size_t half = path.stocks() / 2;
    std::cout << "[INFO] compustat_reproduction final relative values:\n";
    for (const auto& [label, entry] :
         std::vector<std::pair<std::string, ZooEntry>>{{"ew_top_rho", ew_top(half)},
                                                       {"ew_bottom_rho", ew_bottom(half)},
                                                       {"ew_top_mu", ew_top(half, RankBy::mu)},
                                                       {"ew_bottom_mu", ew_bottom(half, RankBy::mu)}}) {
        const BacktestResult res = run_backtest(p.series, path, entry.make_rule());
        std::cout << "[INFO]   " << label << " = " << res.relative_value.back() << "\n";
    }
    report("compustat_reproduction", true, "ran on user-supplied panel (values above)");
}

} // namespace

int main() {
    const auto t0 = std::chrono::steady_clock::now();
    criterion_additive();
    criterion_multiplicative();
    criterion_jumps();
    criterion_balance_checks();
    criterion_gamma_monotone();
    criterion_rank_engine();
    criterion_decomposition();
    criterion_attribution();
    criterion_backtester();
    criterion_determinism();
    criterion_compustat();
    std::cout << (g_failures == 0 ? "ALL CRITERIA PASSED" : "FAILURES: ")
              << (g_failures == 0 ? "" : std::to_string(g_failures))
              << "  (total runtime " << seconds_since(t0) << "s)\n";
    return g_failures == 0 ? 0 : 1;
}
