#include <cmath>

#include "doctest.h"
#include "spt/errors.hpp"
#include "spt/market_model.hpp"
#include "spt/sim.hpp"
#include "test_support.hpp"

using namespace spt;
using spt_test::make_series;

TEST_CASE("two-stock ratio arithmetic") {
    const MarketSeries s = make_series({0.0, 1.0}, {{1, 1}, {1, 1}}, {{1, 3}, {1, 3}});
    const WeightPath p = compute_weights(s);
    CHECK(p.mu(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(p.mu(0, 1) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(p.beta(0, 0) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(p.beta(0, 1) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(p.rho(0, 0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(p.rho(0, 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("constant books give h = 0 and g = beta(0)") {
    const MarketSeries s = make_series({0, 1, 2}, {{1, 2}, {2, 1}, {1, 1}},
                                       {{1, 2}, {1, 2}, {1, 2}});
    const WeightPath p = compute_weights(s);
    for (std::size_t l = 0; l < 3; ++l)
        for (std::size_t i = 0; i < 2; ++i) {
            CHECK(p.h(l, i) == 0.0);
            CHECK(p.g(l, i) == p.beta(0, i));
        }
}

TEST_CASE("g/h recurrences on a forced beta path") {
    // beta_1 = 0.4, 0.5, 0.3 with books summing to one
    const MarketSeries s = make_series({0, 1, 2}, {{1, 1}, {1, 1}, {1, 1}},
                                       {{0.4, 0.6}, {0.5, 0.5}, {0.3, 0.7}}, {0, 1, 1});
    const WeightPath p = compute_weights(s);
    CHECK(p.g(0, 0) == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(p.g(1, 0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(p.g(2, 0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(p.h(0, 0) == 0.0);
    CHECK(p.h(1, 0) == 0.0);
    CHECK(p.h(2, 0) == doctest::Approx(0.2).epsilon(1e-14));
}

TEST_CASE("errors: nonpositive input and short grid") {
    CHECK_THROWS_AS(compute_weights(make_series({0, 1}, {{1, 1}, {1, -2}}, {{1, 1}, {1, 1}})),
                    NonPositiveInput);
    CHECK_THROWS_AS(compute_weights(make_series({0, 1}, {{1, 1}, {1, 1}}, {{1, 0}, {1, 1}})),
                    NonPositiveInput);
    CHECK_THROWS_AS(compute_weights(make_series({0}, {{1, 1}}, {{1, 1}})), GridTooShort);
    CHECK_THROWS_AS(compute_weights(make_series({0, 1}, {{1}, {1}}, {{1}, {1}})), BadDimensions);
}

TEST_CASE("rho_bounds with safety factors") {
    const MarketSeries unit = make_series({0, 1}, {{1, 1}, {1, 1}}, {{1, 1}, {1, 1}});
    const WeightPath p_unit = compute_weights(unit); // rho identically 1
    const RhoBounds b2 = rho_bounds(p_unit, 2.0);
    CHECK(b2.m == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(b2.M == doctest::Approx(2.0).epsilon(1e-15));

    const MarketSeries two = make_series({0, 1}, {{1, 1}, {1, 1}}, {{1, 3}, {1, 3}});
    const RhoBounds b1 = rho_bounds(compute_weights(two), 1.0);
    CHECK(b1.m == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(b1.M == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("weight path invariants on simulated markets") {
    for (const std::uint64_t seed : {1ull, 7ull, 23ull}) {
        SimConfig cfg;
        cfg.d = 4;
        cfg.n_steps = 600;
        cfg.dt = 1e-3;
        cfg.seed = seed;
        cfg.book_mode = seed % 2 ? BookMode::continuous : BookMode::annual_jump;
        cfg.book_update_interval = 100;
        const WeightPath p = compute_weights(simulate(cfg));

        for (std::size_t l = 0; l < p.steps(); ++l) {
            double mu_sum = 0.0, beta_sum = 0.0;
            for (std::size_t i = 0; i < p.stocks(); ++i) {
                mu_sum += p.mu(l, i);
                beta_sum += p.beta(l, i);
                // rho is exactly the stored ratio
                CHECK(p.rho(l, i) == p.mu(l, i) / p.beta(l, i));
                // g - h reconstructs beta
                CHECK(std::abs(p.g(l, i) - p.h(l, i) - p.beta(l, i)) <= 1e-14);
                if (l > 0) {
                    CHECK(p.g(l, i) >= p.g(l - 1, i)); // nondecreasing
                    CHECK(p.h(l, i) >= p.h(l - 1, i));
                    if (cfg.book_mode == BookMode::annual_jump && !p.jump_flags[l]) {
                        // between updates the books are constant, so g and h are too
                        CHECK(p.g(l, i) == p.g(l - 1, i));
                        CHECK(p.h(l, i) == p.h(l - 1, i));
                    }
                }
            }
            CHECK(std::abs(mu_sum - 1.0) <= 1e-12);
            CHECK(std::abs(beta_sum - 1.0) <= 1e-12);
        }

        const RhoBounds exact = rho_bounds(p, 1.0);
        for (double r : p.rho.data()) {
            CHECK(r >= exact.m);
            CHECK(r <= exact.M);
        }
    }
}
