#include <cmath>

#include "doctest.h"
#include "spt/backtest.hpp"
#include "spt/errors.hpp"
#include "spt/gamma.hpp"
#include "spt/sim.hpp"
#include "spt/strategy.hpp"
#include "spt/zoo.hpp"
#include "test_support.hpp"

using namespace spt;
using spt_test::make_series;

namespace {

WeightPath flat_books_path(std::uint64_t seed = 7, std::size_t n = 800) {
    SimConfig cfg;
    cfg.d = 3;
    cfg.n_steps = n;
    cfg.dt = 1e-3;
    cfg.seed = seed;
    cfg.book_mode = BookMode::annual_jump;
    cfg.book_update_interval = 10 * n; // never updates: books constant
    return compute_weights(simulate(cfg));
}

WeightPath continuous_books_path(std::uint64_t seed = 7, std::size_t n = 800) {
    SimConfig cfg;
    cfg.d = 3;
    cfg.n_steps = n;
    cfg.dt = 1e-3;
    cfg.seed = seed;
    cfg.book_mode = BookMode::continuous;
    return compute_weights(simulate(cfg));
}

std::vector<double> rule_weights(const ZooEntry& entry, const MarketSeries& series,
                                 const WeightPath& path, std::size_t step) {
    MarketView view(series, path, step, step);
    return entry.make_rule()(view);
}

} // namespace

TEST_CASE("book-value generator basics") {
    // mu = beta -> rho = 1 -> G = 1 and weights equal the market
    const MarketSeries same = make_series({0, 1}, {{3, 2}, {3, 2}}, {{3, 2}, {3, 2}});
    const WeightPath p_same = compute_weights(same);
    const GeneratorSpec g = book_value_generator().generator;
    CHECK(g.value(state_at(p_same, 0)) == doctest::Approx(1.0).epsilon(1e-14));

    // d = 2, mu = (0.6, 0.4), beta = (0.5, 0.5): G = sqrt(1.2 * 0.8)
    const MarketSeries mixed = make_series({0, 1}, {{6, 4}, {6, 4}}, {{1, 1}, {1, 1}});
    const WeightPath p_mixed = compute_weights(mixed);
    CHECK(g.value(state_at(p_mixed, 0)) == doctest::Approx(std::sqrt(0.96)).epsilon(1e-14));

    // balance: sum mu_i (beta_i/mu_i) G = G
    std::vector<double> grad(2);
    g.grad_mu(state_at(p_mixed, 0), grad);
    const double weighted = 0.6 * grad[0] + 0.4 * grad[1];
    CHECK(weighted == doctest::Approx(g.value(state_at(p_mixed, 0))).epsilon(1e-14));
}

TEST_CASE("market-to-book weighted portfolio weights") {
    // rho = (4, 1), p = 0.5 -> weights (2/3, 1/3)
    const MarketSeries s = make_series({0, 1}, {{4, 2}, {4, 2}}, {{1, 2}, {1, 2}});
    const WeightPath p = compute_weights(s);
    REQUIRE(p.rho(0, 0) == doctest::Approx(4.0 * 1.0 / (2.0)).epsilon(1e-12)); // mu/beta = (2/3)/(1/6)... recomputed below
    const auto w = rule_weights(mtb_weighted_portfolio(0.5), s, p, 0);
    const double r0 = std::sqrt(p.rho(0, 0)), r1 = std::sqrt(p.rho(0, 1));
    CHECK(w[0] == doctest::Approx(r0 / (r0 + r1)).epsilon(1e-14));
    CHECK(w[1] == doctest::Approx(r1 / (r0 + r1)).epsilon(1e-14));

    // p = 1 on an equal-cap market (mu = beta = 1/d): weights collapse to the
    // market weights
    const MarketSeries id = make_series({0, 1}, {{1, 1}, {1, 1}}, {{1, 1}, {1, 1}});
    const WeightPath p_id = compute_weights(id);
    const auto w_id = rule_weights(mtb_weighted_portfolio(1.0), id, p_id, 0);
    CHECK(w_id[0] == doctest::Approx(p_id.mu(0, 0)).epsilon(1e-14));

    // p = 0 alias: equal weights
    const auto w_eq = rule_weights(mtb_weighted_portfolio(0.0), id, p_id, 0);
    CHECK(w_eq[0] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("diversity weighted portfolio weights") {
    const MarketSeries s = make_series({0, 1}, {{64, 36}, {64, 36}}, {{1, 1}, {1, 1}});
    const WeightPath p = compute_weights(s);
    const auto w1 = rule_weights(diversity_weighted_portfolio(1.0), s, p, 0);
    CHECK(w1[0] == doctest::Approx(0.64).epsilon(1e-14)); // market portfolio
    const auto w = rule_weights(diversity_weighted_portfolio(0.5), s, p, 0);
    CHECK(w[0] == doctest::Approx(0.8 / 1.4).epsilon(1e-14));
    CHECK(w[1] == doctest::Approx(0.6 / 1.4).epsilon(1e-14));
    const auto w0 = rule_weights(diversity_weighted_portfolio(0.0), s, p, 0);
    CHECK(w0[0] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("modified book-value generator") {
    const WeightPath p = flat_books_path();
    const RhoBounds rb = rho_bounds(p, 2.0);
    const ZooEntry entry = modified_book_value_generator(rb.m, rb.M);
    entry.check_path(p);

    const auto check = check_derivatives_on_path(entry.generator, p);
    CHECK(check.grad_ok);
    CHECK(check.balance_ok);

    // aux partials have the arbitrage-friendly signs along the path
    std::vector<double> dg(p.stocks()), dh(p.stocks());
    for (std::size_t l = 0; l < p.steps(); l += 37) {
        const GenState s = state_at(p, l);
        entry.generator.dG_dgamma(s, dg);
        entry.generator.dG_dxi(s, dh);
        for (std::size_t i = 0; i < p.stocks(); ++i) {
            CHECK(dg[i] <= 0.0);
            CHECK(dh[i] <= 0.0);
        }
    }

    // interpolation endpoint at t = 0: Gamma = 0, weights are beta(0)
    SimConfig cfg;
    cfg.d = 3;
    cfg.n_steps = 900;
    cfg.dt = 1e-3;
    cfg.seed = 19;
    cfg.book_mode = BookMode::annual_jump;
    cfg.book_update_interval = 200;
    const MarketSeries series = simulate(cfg);
    const WeightPath pj = compute_weights(series);
    const RhoBounds rbj = rho_bounds(pj, 2.0);
    const ZooEntry ej = modified_book_value_generator(rbj.m, rbj.M);
    const auto w0 = rule_weights(ej, series, pj, 0);
    for (std::size_t i = 0; i < pj.stocks(); ++i)
        CHECK(w0[i] == doctest::Approx(pj.beta(0, i)).epsilon(1e-12));

    // the weight rule equals the stated interpolation between beta(t-) and mu
    const StrategyPath sp = additive_strategy(ej.generator, pj);
    const std::size_t l = 700;
    const auto wl = rule_weights(ej, series, pj, l);
    const double g_left = sp.ledger.g_left_values[l];
    const double gc = sp.ledger.gamma_continuous[l];
    for (std::size_t i = 0; i < pj.stocks(); ++i) {
        const double expect =
            (pj.beta_left(l, i) * g_left + pj.mu(l, i) * gc) / (g_left + gc);
        CHECK(wl[i] == doctest::Approx(expect).epsilon(1e-10));
    }

    // Gamma^c nondecreasing pathwise
    for (std::size_t m = 1; m < sp.ledger.steps(); ++m)
        CHECK(sp.ledger.gamma_continuous[m] >= sp.ledger.gamma_continuous[m - 1] - 1e-12);

    // out-of-bounds rho rejected
    CHECK_THROWS_AS(modified_book_value_generator(rbj.M, rbj.M * 2.0).check_path(pj),
                    BoundsViolated);
}

TEST_CASE("modified market-to-book generator") {
    const WeightPath p = flat_books_path(23);
    const double delta = 0.5 * min_beta(p);

    // h = 0, g = beta constant, p = 1: the tilted portfolio collapses to mu
    const ZooEntry e1 = modified_mtb_generator(1.0, delta);
    std::vector<double> grad(p.stocks());
    e1.generator.grad_mu(state_at(p, 0), grad);
    double vsum = 0.0;
    std::vector<double> pi_hat(p.stocks());
    for (std::size_t i = 0; i < p.stocks(); ++i) {
        pi_hat[i] = grad[i] * p.mu(0, i); // theta_i mu_i ~ s_i^p
        vsum += pi_hat[i];
    }
    for (std::size_t i = 0; i < p.stocks(); ++i)
        CHECK(pi_hat[i] / vsum == doctest::Approx(p.mu(0, i)).epsilon(1e-12));

    // p = 1: the generator is linear in mu, so the qv term vanishes
    const GammaLedger led1 = accumulate_gamma(e1.generator, p);
    for (double q : led1.qv_term) CHECK(std::abs(q) <= 1e-18);

    // p = 0.5 passes derivative/balance checks and has nondecreasing Gamma^c
    const ZooEntry e05 = modified_mtb_generator(0.5, delta);
    const auto check = check_derivatives_on_path(e05.generator, p);
    CHECK(check.grad_ok);
    CHECK(check.balance_ok);
    const GammaLedger led05 = accumulate_gamma(e05.generator, p);
    for (std::size_t m = 1; m < led05.steps(); ++m)
        CHECK(led05.gamma_continuous[m] >= led05.gamma_continuous[m - 1] - 1e-12);

    // delta above some beta is rejected
    CHECK_THROWS_AS(modified_mtb_generator(0.5, 1.0).check_path(p), DeltaViolated);

    // on a moving-books path both aux partials carry the arbitrage signs
    const WeightPath pc = continuous_books_path(31);
    const ZooEntry ec = modified_mtb_generator(0.5, 0.5 * min_beta(pc));
    std::vector<double> dg(pc.stocks()), dh(pc.stocks());
    for (std::size_t l = 1; l < pc.steps(); l += 41) {
        const GenState s = state_at(pc, l);
        ec.generator.dG_dgamma(s, dg);
        ec.generator.dG_dxi(s, dh);
        for (std::size_t i = 0; i < pc.stocks(); ++i) {
            CHECK(dg[i] <= 0.0);
            CHECK(dh[i] <= 0.0);
        }
    }
}

TEST_CASE("logarithmic generator") {
    CHECK(logarithmic_generator(1.0, 4.0, 0.1).params.at("kappa") ==
          doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-15));

    // h = 0, d = 2, rho = (1, 1): G = 2 log 2
    const MarketSeries s = make_series({0, 1}, {{1, 1}, {1, 1}}, {{1, 1}, {1, 1}});
    const WeightPath p2 = compute_weights(s);
    const ZooEntry e = logarithmic_generator(0.5, 2.0, 0.25);
    CHECK(e.generator.value(state_at(p2, 0)) ==
          doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-14));
    CHECK(!e.generator.is_balanced);
    CHECK(e.generator.requires_continuous_aux);

    // on a continuous-book path all Gamma increments are nonnegative
    const WeightPath p = continuous_books_path(29);
    const RhoBounds rb = rho_bounds(p, 2.0);
    const ZooEntry el = logarithmic_generator(rb.m, rb.M, 0.5 * min_beta(p));
    const auto check = check_derivatives_on_path(el.generator, p);
    CHECK(check.grad_ok);
    const GammaLedger led = accumulate_gamma(el.generator, p);
    for (std::size_t m = 1; m < led.steps(); ++m) {
        CHECK(led.qv_term[m] >= led.qv_term[m - 1] - 1e-15);
        CHECK(led.gamma_integral_term[m] >= led.gamma_integral_term[m - 1] - 1e-15);
        CHECK(led.xi_integral_term[m] >= led.xi_integral_term[m - 1] - 1e-15);
    }
}

TEST_CASE("rank composition constructors") {
    CHECK_THROWS_AS(rank_constant_rebalanced({0.5, 0.4}), BadComposition);
    const ZooEntry all = ew_top(3);
    const auto c = all.rank_coeffs(3);
    for (double x : c) CHECK(x == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK_THROWS_AS(ew_top(5).rank_coeffs(3), BadConfig);

    const auto c_bot = ew_bottom(2).rank_coeffs(4);
    CHECK(c_bot[0] == 0.0);
    CHECK(c_bot[1] == 0.0);
    CHECK(c_bot[2] == 0.5);
    CHECK(c_bot[3] == 0.5);

    const auto c_top = top_one().rank_coeffs(4);
    CHECK(c_top[0] == 1.0);
    CHECK(c_top[3] == 0.0);
}

TEST_CASE("book-value log decomposition") {
    // frozen market with mu = beta: all terms vanish
    const MarketSeries frozen =
        make_series({0, 1, 2}, {{2, 3}, {2, 3}, {2, 3}}, {{2, 3}, {2, 3}, {2, 3}});
    const BookValueDecomposition dec0 = book_value_log_decomposition(compute_weights(frozen));
    for (std::size_t l = 0; l < 3; ++l) {
        CHECK(dec0.log_g_term[l] == 0.0);
        CHECK(dec0.quadratic_term[l] == 0.0);
        CHECK(dec0.beta_term[l] == 0.0);
        CHECK(dec0.log_v[l] == 0.0);
    }

    // piecewise-constant books: the beta integral vanishes identically
    SimConfig cfg;
    cfg.d = 3;
    cfg.n_steps = 1200;
    cfg.dt = 1e-3;
    cfg.seed = 37;
    cfg.book_mode = BookMode::annual_jump;
    cfg.book_update_interval = 400;
    const WeightPath pj = compute_weights(simulate(cfg));
    const BookValueDecomposition decj = book_value_log_decomposition(pj);
    for (double b : decj.beta_term) CHECK(b == 0.0);

    // the quadratic drift is nondecreasing pathwise
    for (std::size_t l = 1; l < decj.quadratic_term.size(); ++l)
        CHECK(decj.quadratic_term[l] >= decj.quadratic_term[l - 1] - 1e-15);

    // the sum tracks the multiplicative strategy's log wealth up to the
    // discretization remainder of the two Gamma routes
    const GeneratorSpec norm = normalize_at(book_value_generator().generator, pj);
    const StrategyPath sp = multiplicative_strategy(norm, pj);
    for (std::size_t l = 0; l < pj.steps(); ++l)
        CHECK(std::abs(decj.log_v[l] - std::log(sp.wealth[l])) <= 1e-3);

    // continuous books: same identity, nonzero beta term
    const WeightPath pc = continuous_books_path(37, 1200);
    const BookValueDecomposition decc = book_value_log_decomposition(pc);
    const StrategyPath spc = multiplicative_strategy(
        normalize_at(book_value_generator().generator, pc), pc);
    for (std::size_t l = 0; l < pc.steps(); ++l)
        CHECK(std::abs(decc.log_v[l] - std::log(spc.wealth[l])) <= 1e-3);
    CHECK(std::abs(decc.beta_term.back()) > 0.0);
}

TEST_CASE("zoo registry and parsing") {
    CHECK_THROWS_AS(make_entry("nope", {}), UnknownPortfolio);
    CHECK_THROWS_AS(make_entry("mtb_weighted", {}), BadConfig); // missing p

    const ZooEntry e = parse_entry("mtb_weighted:p=0.5");
    CHECK(e.name == "mtb_weighted");
    CHECK(e.params.at("p") == 0.5);

    const WeightPath p = flat_books_path();
    const ZooEntry m = parse_entry("modified_book_value", &p); // bounds from data
    CHECK(m.params.at("m") > 0.0);
    CHECK(m.params.at("M") > m.params.at("m"));

    // optional bounds on the plain book-value entry are enforced against data
    const ZooEntry bounded = parse_entry("book_value:m=0.99,M=1.01");
    CHECK_THROWS_AS(bounded.check_path(p), BoundsViolated);

    CHECK_THROWS_AS(parse_entry("mtb_weighted:p"), BadConfig);
    CHECK(zoo_names().size() >= 10);
}

TEST_CASE("every zoo weight rule emits long-only probability vectors") {
    SimConfig cfg;
    cfg.d = 4;
    cfg.n_steps = 500;
    cfg.dt = 1e-3;
    cfg.seed = 77;
    cfg.book_mode = BookMode::annual_jump;
    cfg.book_update_interval = 120;
    const MarketSeries series = simulate(cfg);
    const WeightPath path = compute_weights(series);

    const std::vector<std::string> specs = {
        "market",        "equal_weight",       "book_value",
        "mtb_weighted:p=0.5",  "mtb_weighted:p=-0.5",  "diversity_weighted:p=0.5",
        "modified_book_value", "modified_mtb:p=1",     "modified_mtb:p=0.5",
        "ew_top:l=2",    "ew_bottom:l=2",     "top_one",
        "bottom_one",    "ew_top_mu:l=2",
    };
    for (const std::string& text : specs) {
        const ZooEntry entry = parse_entry(text, &path);
        const WeightRule rule = entry.make_rule();
        for (std::size_t l = 0; l < path.steps(); l += 61) {
            MarketView view(series, path, l, l);
            const std::vector<double> w = rule(view);
            double sum = 0.0;
            for (double x : w) {
                CHECK(x >= -1e-15);
                sum += x;
            }
            CHECK(std::abs(sum - 1.0) <= 1e-12);
        }
    }
}

TEST_CASE("mtb weights order with rho when p > 0 and against it when p < 0") {
    const MarketSeries s = make_series({0, 1}, {{5, 3, 2}, {5, 3, 2}},
                                       {{1, 2, 4}, {1, 2, 4}});
    const WeightPath p = compute_weights(s);
    // rho strictly decreasing in the stock index here
    REQUIRE(p.rho(0, 0) > p.rho(0, 1));
    REQUIRE(p.rho(0, 1) > p.rho(0, 2));
    const auto w_pos = rule_weights(mtb_weighted_portfolio(0.7), s, p, 0);
    CHECK(w_pos[0] > w_pos[1]);
    CHECK(w_pos[1] > w_pos[2]);
    const auto w_neg = rule_weights(mtb_weighted_portfolio(-0.7), s, p, 0);
    CHECK(w_neg[0] < w_neg[1]);
    CHECK(w_neg[1] < w_neg[2]);
}
