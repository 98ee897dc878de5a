#pragma once

#include <string>
#include <vector>

#include "spt/attribution.hpp"
#include "spt/backtest.hpp"
#include "spt/market_model.hpp"
#include "spt/zoo.hpp"

namespace spt {

/// Market panel on disk: one row per (date, stock),
///   `date,ticker,cap,book[,book_updated]`
/// plus a companion universe file listing tickers in index order. The date
/// column accepts ISO-8601 dates or plain decimal times in years (the export
/// format for simulated series, which round-trips bit-exactly). When the
/// optional book_updated column is present it defines the jump steps;
/// otherwise a book value differing from the prior row of the same ticker
/// marks an update. The panel must be full: every ticker on every date.
struct Panel {
    MarketSeries series;
    std::vector<std::string> tickers;
};

Panel ingest_panel(const std::string& data_path, const std::string& universe_path);

void export_panel(const MarketSeries& series, const std::vector<std::string>& tickers,
                  const std::string& data_path, const std::string& universe_path);

/// `step,date,wealth,relative_value,log_relative_value`
void write_backtest_csv(const std::string& path, const BacktestResult& result);

/// One aligned column of relative values per portfolio.
void write_relative_values_csv(const std::string& path, const std::vector<double>& times,
                               const std::vector<std::string>& labels,
                               const std::vector<std::string>& names,
                               const std::vector<std::vector<double>>& columns);

/// `step,DC,MBRC`
void write_attribution_csv(const std::string& path, const AttributionReport& report);

/// `step,date,log_generator,quadratic_drift,beta_integral,log_relative_value`
void write_decomposition_csv(const std::string& path, const std::vector<double>& times,
                             const std::vector<std::string>& labels,
                             const BookValueDecomposition& dec);

/// Per-stock weight dump: `step,date,<ticker...>` rows of portfolio weights.
void write_weights_csv(const std::string& path, const BacktestResult& result,
                       const std::vector<std::string>& tickers);

} // namespace spt
