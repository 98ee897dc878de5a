#include "spt/backtest.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "spt/errors.hpp"

namespace spt {

std::size_t MarketView::guard(std::size_t step) const {
    if (step > limit_)
        throw LookAheadViolation("weight rule requested step " + std::to_string(step) +
                                 " while rebalancing at step " + std::to_string(current_));
    return step;
}

BacktestResult run_backtest(const MarketSeries& series, const WeightPath& path,
                            const WeightRule& rule, bool enforce_view) {
    const std::size_t n = series.steps();
    const std::size_t d = series.stocks();
    if (path.steps() != n || path.stocks() != d)
        throw LengthMismatch("weight path does not match the series");

    BacktestResult res;
    res.wealth.assign(n, 0.0);
    res.relative_value.assign(n, 0.0);
    res.weights_used = Matrix(n, d);
    res.turnover.assign(n, 0.0);
    res.times = path.times;
    res.labels = path.labels;

    const auto weights_at = [&](std::size_t s) {
        MarketView view(series, path, s, enforce_view ? s : n - 1);
        std::vector<double> w = rule(view);
        if (w.size() != d) throw WeightSumError("weight rule returned wrong dimension");
        double sum = 0.0;
        for (double x : w) {
            if (!std::isfinite(x)) throw WeightSumError("weight rule returned non-finite weight");
            sum += x;
        }
        if (std::abs(sum - 1.0) > 1e-10)
            throw WeightSumError("weights sum to " + std::to_string(sum) + " at step " +
                                 std::to_string(s));
        return w;
    };

    double total0 = 0.0;
    for (std::size_t i = 0; i < d; ++i) total0 += series.caps(0, i);
    res.wealth[0] = total0; // normalization W(0) = total market cap
    res.relative_value[0] = res.wealth[0] / total0;

    std::vector<double> w_prev = weights_at(0);
    for (std::size_t i = 0; i < d; ++i) res.weights_used(0, i) = w_prev[i];

    for (std::size_t l = 1; l < n; ++l) {
        double growth = 0.0;
        for (std::size_t i = 0; i < d; ++i)
            growth += w_prev[i] * series.caps(l, i) / series.caps(l - 1, i);
        res.wealth[l] = res.wealth[l - 1] * growth;

        double total = 0.0;
        for (std::size_t i = 0; i < d; ++i) total += series.caps(l, i);
        res.relative_value[l] = res.wealth[l] / total;

        std::vector<double> w_now = weights_at(l);
        // turnover against the drift of the previous weights over the step
        double drift_norm = 0.0;
        for (std::size_t i = 0; i < d; ++i)
            drift_norm += w_prev[i] * series.caps(l, i) / series.caps(l - 1, i);
        double t_sum = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            const double drifted =
                w_prev[i] * series.caps(l, i) / series.caps(l - 1, i) / drift_norm;
            t_sum += std::abs(w_now[i] - drifted);
        }
        res.turnover[l] = t_sum;

        for (std::size_t i = 0; i < d; ++i) res.weights_used(l, i) = w_now[i];
        w_prev = std::move(w_now);
    }
    return res;
}

BacktestSummary compare_to_market(const BacktestResult& result) {
    if (result.steps() == 0) throw GridTooShort("empty backtest result");
    BacktestSummary s;
    s.final_relative_value = result.relative_value.back();
    double peak = -std::numeric_limits<double>::infinity();
    for (double v : result.relative_value) {
        const double lv = std::log(v);
        peak = std::max(peak, lv);
        s.max_drawdown_log_v = std::max(s.max_drawdown_log_v, peak - lv);
    }
    const double span = result.times.empty() ? 0.0 : result.times.back() - result.times.front();
    s.log_v_per_year = span > 0.0 ? std::log(s.final_relative_value) / span : 0.0;
    return s;
}

} // namespace spt
