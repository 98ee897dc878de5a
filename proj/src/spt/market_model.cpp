#include "spt/market_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spt/errors.hpp"

namespace spt {

void MarketSeries::validate() const {
    const std::size_t n = steps();
    const std::size_t d = stocks();
    if (n < 2) throw GridTooShort("need at least 2 time points, got " + std::to_string(n));
    if (d < 2) throw BadDimensions("need at least 2 stocks, got " + std::to_string(d));
    if (times.size() != n || book_update_flags.size() != n)
        throw LengthMismatch("times/flags length does not match the step count");
    if (books.rows() != n || books.cols() != d)
        throw LengthMismatch("books shape does not match caps");
    if (!labels.empty() && labels.size() != n)
        throw LengthMismatch("labels length does not match the step count");
    for (std::size_t l = 1; l < n; ++l)
        if (!(times[l] > times[l - 1]))
            throw BadDimensions("times must be strictly increasing at step " + std::to_string(l));
    for (std::size_t l = 0; l < n; ++l)
        for (std::size_t i = 0; i < d; ++i) {
            // !(x > 0) also rejects NaN
            if (!(caps(l, i) > 0.0))
                throw NonPositiveInput("cap <= 0 at step " + std::to_string(l) +
                                       ", stock " + std::to_string(i));
            if (!(books(l, i) > 0.0))
                throw NonPositiveInput("book <= 0 at step " + std::to_string(l) +
                                       ", stock " + std::to_string(i));
        }
}

bool WeightPath::has_jumps() const {
    return std::any_of(jump_flags.begin(), jump_flags.end(),
                       [](std::uint8_t f) { return f != 0; });
}

WeightPath compute_weights(const MarketSeries& series) {
    series.validate();
    const std::size_t n = series.steps();
    const std::size_t d = series.stocks();

    WeightPath path;
    path.times = series.times;
    path.labels = series.labels;
    path.jump_flags = series.book_update_flags;
    path.mu = Matrix(n, d);
    path.beta = Matrix(n, d);
    path.rho = Matrix(n, d);
    path.g = Matrix(n, d);
    path.h = Matrix(n, d);

    for (std::size_t l = 0; l < n; ++l) {
        double cap_sum = 0.0, book_sum = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            cap_sum += series.caps(l, i);
            book_sum += series.books(l, i);
        }
        for (std::size_t i = 0; i < d; ++i) {
            path.mu(l, i) = series.caps(l, i) / cap_sum;
            path.beta(l, i) = series.books(l, i) / book_sum;
            path.rho(l, i) = path.mu(l, i) / path.beta(l, i);
        }
    }

    // g/h accumulated in extended precision; consecutive betas are close so
    // each per-step difference is exact (Sterbenz) and g - h telescopes back
    // to beta to within storage rounding.
    std::vector<long double> acc_g(d), acc_h(d, 0.0L);
    for (std::size_t i = 0; i < d; ++i) {
        acc_g[i] = path.beta(0, i);
        path.g(0, i) = path.beta(0, i);
        path.h(0, i) = 0.0;
    }
    for (std::size_t l = 1; l < n; ++l) {
        for (std::size_t i = 0; i < d; ++i) {
            const double diff = path.beta(l, i) - path.beta(l - 1, i);
            if (diff >= 0.0)
                acc_g[i] += diff;
            else
                acc_h[i] += -diff;
            path.g(l, i) = static_cast<double>(acc_g[i]);
            path.h(l, i) = static_cast<double>(acc_h[i]);
        }
    }
    return path;
}

RhoBounds rho_bounds(const WeightPath& path, double safety_factor) {
    if (path.rho.empty()) throw GridTooShort("empty weight path");
    if (!(safety_factor > 0.0)) throw BadConfig("safety factor must be positive");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (double v : path.rho.data()) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return {lo / safety_factor, hi * safety_factor};
}

double min_beta(const WeightPath& path) {
    if (path.beta.empty()) throw GridTooShort("empty weight path");
    double lo = std::numeric_limits<double>::infinity();
    for (double v : path.beta.data()) lo = std::min(lo, v);
    return lo;
}

} // namespace spt
