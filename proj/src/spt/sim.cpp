#include "spt/sim.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "spt/errors.hpp"

namespace spt {

double NormalSampler::uniform01() {
    // 53-bit mantissa in (0, 1]: never returns 0, so log() below is safe.
    return (static_cast<double>(rng_() >> 11) + 1.0) * 0x1.0p-53;
}

double NormalSampler::next() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
}

void SimConfig::validate() const {
    if (d < 2) throw BadConfig("need at least 2 stocks");
    if (n_steps < 2) throw BadConfig("need at least 2 steps");
    if (!(dt > 0.0)) throw BadConfig("dt must be positive");
    if (!drifts.empty() && drifts.size() != d) throw BadConfig("drifts size != d");
    if (!book_drift.empty() && book_drift.size() != d) throw BadConfig("book_drift size != d");
    if (!init_caps.empty() && init_caps.size() != d) throw BadConfig("init_caps size != d");
    if (!init_books.empty() && init_books.size() != d) throw BadConfig("init_books size != d");
    if (!vol_matrix.empty()) {
        if (vol_matrix.rows() != d) throw BadCovariance("vol_matrix must have d rows");
        for (double v : vol_matrix.data())
            if (!std::isfinite(v)) throw BadCovariance("vol_matrix has non-finite entries");
    }
}

MarketSeries simulate(const SimConfig& config) {
    config.validate();
    const std::size_t d = config.d;
    const std::size_t n = config.n_steps;

    Matrix vol = config.vol_matrix;
    if (vol.empty()) {
        vol = Matrix(d, d, 0.0);
        for (std::size_t i = 0; i < d; ++i) vol(i, i) = 0.2;
    }
    const std::size_t factors = vol.cols();

    std::vector<double> sigma2(d, 0.0);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t f = 0; f < factors; ++f) sigma2[i] += vol(i, f) * vol(i, f);

    MarketSeries series;
    series.times.resize(n);
    series.caps = Matrix(n, d);
    series.books = Matrix(n, d);
    series.book_update_flags.assign(n, 0);

    const double sqdt = std::sqrt(config.dt);
    NormalSampler normal(config.seed);

    std::vector<double> log_s(d), z(factors);
    for (std::size_t i = 0; i < d; ++i)
        log_s[i] = std::log(config.init_caps.empty() ? 1.0 : config.init_caps[i]);

    std::size_t update_every = config.book_update_interval;
    if (update_every == 0)
        update_every = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(1.0 / config.dt)));

    std::vector<double> book_level(d);
    for (std::size_t i = 0; i < d; ++i)
        book_level[i] = config.init_books.empty() ? 1.0 : config.init_books[i];

    const auto continuous_book = [&](std::size_t i, double t) {
        const double drift = config.book_drift.empty() ? 0.0 : config.book_drift[i];
        const double amp = config.book_cycle_amp * (1.0 + 0.5 * static_cast<double>(i) / d);
        const double freq = 1.0 + static_cast<double>(i);
        return book_level[i] *
               std::exp(drift * t + amp * std::sin(2.0 * std::numbers::pi * freq * t));
    };

    for (std::size_t l = 0; l < n; ++l) {
        const double t = static_cast<double>(l) * config.dt;
        series.times[l] = t;
        if (l > 0) {
            for (std::size_t f = 0; f < factors; ++f) z[f] = normal.next();
            for (std::size_t i = 0; i < d; ++i) {
                double shock = 0.0;
                for (std::size_t f = 0; f < factors; ++f) shock += vol(i, f) * z[f];
                const double drift = config.drifts.empty() ? 0.0 : config.drifts[i];
                log_s[i] += (drift - 0.5 * sigma2[i]) * config.dt + sqdt * shock;
            }
        }
        for (std::size_t i = 0; i < d; ++i) series.caps(l, i) = std::exp(log_s[i]);

        switch (config.book_mode) {
        case BookMode::continuous:
            for (std::size_t i = 0; i < d; ++i) series.books(l, i) = continuous_book(i, t);
            break;
        case BookMode::annual_jump:
            if (l > 0 && l % update_every == 0) {
                for (std::size_t i = 0; i < d; ++i) {
                    const double jump = config.book_jump_vol * normal.next();
                    const double drift = config.book_drift.empty() ? 0.0 : config.book_drift[i];
                    book_level[i] *= std::exp(drift * update_every * config.dt + jump -
                                              0.5 * config.book_jump_vol * config.book_jump_vol);
                }
                series.book_update_flags[l] = 1;
            }
            for (std::size_t i = 0; i < d; ++i) series.books(l, i) = book_level[i];
            break;
        }
    }
    series.validate();
    return series;
}

MarketSeries coarsen(const MarketSeries& series, std::size_t factor) {
    if (factor == 0) throw BadConfig("coarsen factor must be positive");
    if (factor == 1) return series;
    const std::size_t n = series.steps();
    const std::size_t d = series.stocks();
    const std::size_t m = (n - 1) / factor + 1;
    if (m < 2) throw GridTooShort("coarsening would leave fewer than 2 steps");

    MarketSeries out;
    out.times.resize(m);
    out.caps = Matrix(m, d);
    out.books = Matrix(m, d);
    out.book_update_flags.assign(m, 0);
    if (!series.labels.empty()) out.labels.resize(m);

    for (std::size_t k = 0; k < m; ++k) {
        const std::size_t src = k * factor;
        out.times[k] = series.times[src];
        if (!series.labels.empty()) out.labels[k] = series.labels[src];
        for (std::size_t i = 0; i < d; ++i) {
            out.caps(k, i) = series.caps(src, i);
            out.books(k, i) = series.books(src, i);
        }
        if (k > 0)
            for (std::size_t f = (k - 1) * factor + 1; f <= src; ++f)
                if (series.book_update_flags[f]) out.book_update_flags[k] = 1;
    }
    return out;
}

} // namespace spt
