#pragma once

#include <functional>
#include <vector>

#include "spt/core.hpp"
#include "spt/market_model.hpp"

namespace spt {

/// Read-only window over a market used by weight rules. `current()` is the
/// rebalance step; every accessor refuses steps beyond the enforcement limit,
/// so a rule that peeks past its rebalance step trips LookAheadViolation.
class MarketView {
public:
    MarketView(const MarketSeries& series, const WeightPath& path, std::size_t current,
               std::size_t limit)
        : series_(&series), path_(&path), current_(current), limit_(limit) {}

    std::size_t current() const { return current_; }
    std::size_t stocks() const { return path_->stocks(); }

    double time(std::size_t step) const { return path_->times[guard(step)]; }
    double cap(std::size_t step, std::size_t i) const { return series_->caps(guard(step), i); }
    double book(std::size_t step, std::size_t i) const { return series_->books(guard(step), i); }
    double mu(std::size_t step, std::size_t i) const { return path_->mu(guard(step), i); }
    double beta(std::size_t step, std::size_t i) const { return path_->beta(guard(step), i); }
    double rho(std::size_t step, std::size_t i) const { return path_->rho(guard(step), i); }
    double g(std::size_t step, std::size_t i) const { return path_->g(guard(step), i); }
    double h(std::size_t step, std::size_t i) const { return path_->h(guard(step), i); }
    bool flagged(std::size_t step) const { return path_->jump_flags[guard(step)] != 0; }

    /// (t-) values at `step`: previous step's stored books at flagged steps.
    double beta_left(std::size_t step, std::size_t i) const {
        return path_->beta(left(step), i);
    }
    double g_left(std::size_t step, std::size_t i) const { return path_->g(left(step), i); }
    double h_left(std::size_t step, std::size_t i) const { return path_->h(left(step), i); }
    double rho_left(std::size_t step, std::size_t i) const {
        return path_->mu(guard(step), i) / path_->beta(left(step), i);
    }

private:
    std::size_t guard(std::size_t step) const;
    std::size_t left(std::size_t step) const {
        guard(step);
        return left_index(path_->jump_flags, step);
    }
    const MarketSeries* series_;
    const WeightPath* path_;
    std::size_t current_;
    std::size_t limit_;
};

/// Produces the weights applied over (t_s, t_{s+1}] from data visible at
/// step s = view.current(). Must return a probability vector.
using WeightRule = std::function<std::vector<double>(const MarketView&)>;

struct BacktestResult {
    std::vector<double> wealth;         // monetary, W(0) = total cap at step 0
    std::vector<double> relative_value; // W / total cap
    Matrix weights_used;                // row l = weights chosen at step l
    std::vector<double> turnover;       // sum |pi(l) - drifted pi(l-1)|
    std::vector<double> times;
    std::vector<std::string> labels;

    std::size_t steps() const { return wealth.size(); }
};

/// Daily-rebalance backtest: the portfolio formed at the close of step l-1 is
/// held across step l, W(t_l) = sum_i W(t_{l-1}) pi_i(t_{l-1}) S_i(t_l)/S_i(t_{l-1}).
/// `enforce_view` gates the no-look-ahead guard (disabled only to test that
/// shipped rules are predictable).
BacktestResult run_backtest(const MarketSeries& series, const WeightPath& path,
                            const WeightRule& rule, bool enforce_view = true);

struct BacktestSummary {
    double final_relative_value = 0.0;
    double max_drawdown_log_v = 0.0;
    double log_v_per_year = 0.0;
};

BacktestSummary compare_to_market(const BacktestResult& result);

} // namespace spt
