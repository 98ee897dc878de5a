#include "spt/csv_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "spt/errors.hpp"

namespace spt {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
        while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
        std::size_t start = 0;
        while (start < field.size() && field[start] == ' ') ++start;
        out.push_back(field.substr(start));
    }
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

bool parse_full_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size();
}

// ISO-8601 calendar date to a day serial (proleptic Gregorian).
bool parse_iso_date(const std::string& s, long& serial) {
    int y = 0, m = 0, d = 0;
    if (std::sscanf(s.c_str(), "%d-%d-%d", &y, &m, &d) != 3) return false;
    if (m < 1 || m > 12 || d < 1 || d > 31) return false;
    const int yy = y - (m <= 2 ? 1 : 0);
    const long era = (yy >= 0 ? yy : yy - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(yy - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2u) / 5u + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    serial = era * 146097 + static_cast<long>(doe) - 719468;
    return true;
}

std::string format_value(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string label_or_time(const std::vector<std::string>& labels,
                          const std::vector<double>& times, std::size_t l) {
    if (!labels.empty()) return labels[l];
    return format_value(times[l]);
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    return out;
}

} // namespace

Panel ingest_panel(const std::string& data_path, const std::string& universe_path) {
    std::ifstream uni(universe_path);
    if (!uni) throw IoError("cannot open universe file '" + universe_path + "'");
    Panel panel;
    std::map<std::string, std::size_t> ticker_index;
    std::string line;
    while (std::getline(uni, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty()) continue;
        if (!ticker_index.emplace(line, panel.tickers.size()).second)
            throw BadConfig("duplicate ticker '" + line + "' in universe");
        panel.tickers.push_back(line);
    }
    const std::size_t d = panel.tickers.size();
    if (d < 2) throw BadDimensions("universe lists fewer than 2 tickers");

    std::ifstream in(data_path);
    if (!in) throw IoError("cannot open data file '" + data_path + "'");
    if (!std::getline(in, line)) throw IoError("empty data file '" + data_path + "'");
    const std::vector<std::string> header = split_csv_line(line);
    if (header.size() < 4 || header[0] != "date" || header[1] != "ticker" ||
        header[2] != "cap" || header[3] != "book")
        throw BadConfig("expected header date,ticker,cap,book[,book_updated]");
    const bool explicit_flags = header.size() >= 5 && header[4] == "book_updated";

    struct Row {
        std::size_t date_idx, stock;
        double cap, book;
        bool updated;
    };
    std::vector<Row> rows;
    std::vector<std::string> dates; // distinct, in order of first appearance
    std::map<std::string, std::size_t> date_index;

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const std::vector<std::string> f = split_csv_line(line);
        if (f.size() < 4 || (explicit_flags && f.size() < 5))
            throw BadConfig("short row at line " + std::to_string(line_no));
        const auto t_it = ticker_index.find(f[1]);
        if (t_it == ticker_index.end())
            throw BadConfig("ticker '" + f[1] + "' not in universe (line " +
                            std::to_string(line_no) + ")");
        auto d_it = date_index.find(f[0]);
        if (d_it == date_index.end()) {
            d_it = date_index.emplace(f[0], dates.size()).first;
            dates.push_back(f[0]);
        }
        Row r;
        r.date_idx = d_it->second;
        r.stock = t_it->second;
        if (!parse_full_double(f[2], r.cap) || !parse_full_double(f[3], r.book))
            throw BadConfig("bad numeric field at line " + std::to_string(line_no));
        r.updated = false;
        if (explicit_flags) {
            double flag;
            if (!parse_full_double(f[4], flag) || (flag != 0.0 && flag != 1.0))
                throw BadConfig("book_updated must be 0 or 1 at line " + std::to_string(line_no));
            r.updated = flag == 1.0;
        }
        rows.push_back(r);
    }
    const std::size_t n = dates.size();
    if (n < 2) throw GridTooShort("panel has fewer than 2 dates");

    // Chronological order: numeric times sort numerically, ISO dates sort
    // lexicographically. Remap date indices accordingly.
    std::vector<double> numeric_times(n);
    bool all_numeric = true;
    for (std::size_t l = 0; l < n && all_numeric; ++l)
        all_numeric = parse_full_double(dates[l], numeric_times[l]);
    std::vector<std::size_t> order(n);
    for (std::size_t l = 0; l < n; ++l) order[l] = l;
    if (all_numeric)
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return numeric_times[a] < numeric_times[b]; });
    else
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return dates[a] < dates[b]; });
    std::vector<std::size_t> rank(n);
    for (std::size_t l = 0; l < n; ++l) rank[order[l]] = l;

    MarketSeries& series = panel.series;
    series.caps = Matrix(n, d);
    series.books = Matrix(n, d);
    series.book_update_flags.assign(n, 0);
    series.times.resize(n);
    series.labels.resize(n);

    Matrix filled(n, d, 0.0);
    for (const Row& r : rows) {
        const std::size_t l = rank[r.date_idx];
        if (filled(l, r.stock) != 0.0)
            throw IncompletePanel("duplicate row for ticker " + panel.tickers[r.stock] +
                                  " on " + dates[r.date_idx]);
        filled(l, r.stock) = 1.0;
        series.caps(l, r.stock) = r.cap;
        series.books(l, r.stock) = r.book;
        if (explicit_flags && r.updated && l > 0) series.book_update_flags[l] = 1;
    }
    for (std::size_t l = 0; l < n; ++l)
        for (std::size_t i = 0; i < d; ++i)
            if (filled(l, i) == 0.0)
                throw IncompletePanel("missing row for ticker " + panel.tickers[i] + " on " +
                                      dates[order[l]]);

    for (std::size_t l = 0; l < n; ++l) series.labels[l] = dates[order[l]];
    if (all_numeric) {
        for (std::size_t l = 0; l < n; ++l) series.times[l] = numeric_times[order[l]];
        series.labels.clear(); // numeric grid: times carry full information
    } else {
        long first_serial = 0;
        for (std::size_t l = 0; l < n; ++l) {
            long serial;
            if (!parse_iso_date(series.labels[l], serial))
                throw BadConfig("date '" + series.labels[l] + "' is neither numeric nor ISO-8601");
            if (l == 0) first_serial = serial;
            series.times[l] = static_cast<double>(serial - first_serial) / 365.25;
        }
    }

    if (!explicit_flags)
        for (std::size_t l = 1; l < n; ++l)
            for (std::size_t i = 0; i < d; ++i)
                if (series.books(l, i) != series.books(l - 1, i)) {
                    series.book_update_flags[l] = 1;
                    break;
                }

    series.validate();
    return panel;
}

void export_panel(const MarketSeries& series, const std::vector<std::string>& tickers,
                  const std::string& data_path, const std::string& universe_path) {
    if (tickers.size() != series.stocks())
        throw LengthMismatch("ticker list does not match the series");
    {
        std::ofstream uni = open_out(universe_path);
        for (const auto& t : tickers) uni << t << "\n";
    }
    std::ofstream out = open_out(data_path);
    out << "date,ticker,cap,book,book_updated\n";
    for (std::size_t l = 0; l < series.steps(); ++l) {
        const std::string date = label_or_time(series.labels, series.times, l);
        for (std::size_t i = 0; i < series.stocks(); ++i)
            out << date << ',' << tickers[i] << ',' << format_value(series.caps(l, i)) << ','
                << format_value(series.books(l, i)) << ','
                << (series.book_update_flags[l] ? 1 : 0) << "\n";
    }
}

void write_backtest_csv(const std::string& path, const BacktestResult& result) {
    std::ofstream out = open_out(path);
    out << "step,date,wealth,relative_value,log_relative_value\n";
    for (std::size_t l = 0; l < result.steps(); ++l)
        out << l << ',' << label_or_time(result.labels, result.times, l) << ','
            << format_value(result.wealth[l]) << ',' << format_value(result.relative_value[l])
            << ',' << format_value(std::log(result.relative_value[l])) << "\n";
}

void write_relative_values_csv(const std::string& path, const std::vector<double>& times,
                               const std::vector<std::string>& labels,
                               const std::vector<std::string>& names,
                               const std::vector<std::vector<double>>& columns) {
    if (names.size() != columns.size()) throw LengthMismatch("names/columns disagree");
    std::ofstream out = open_out(path);
    out << "step,date";
    for (const auto& n : names) out << ',' << n;
    out << "\n";
    for (std::size_t l = 0; l < times.size(); ++l) {
        out << l << ',' << label_or_time(labels, times, l);
        for (const auto& col : columns) {
            if (col.size() != times.size()) throw LengthMismatch("column length mismatch");
            out << ',' << format_value(col[l]);
        }
        out << "\n";
    }
}

void write_attribution_csv(const std::string& path, const AttributionReport& report) {
    std::ofstream out = open_out(path);
    out << "step,DC,MBRC\n";
    for (std::size_t l = 0; l < report.dc.size(); ++l)
        out << l << ',' << format_value(report.dc[l]) << ',' << format_value(report.mbrc[l])
            << "\n";
}

void write_decomposition_csv(const std::string& path, const std::vector<double>& times,
                             const std::vector<std::string>& labels,
                             const BookValueDecomposition& dec) {
    std::ofstream out = open_out(path);
    out << "step,date,log_generator,quadratic_drift,beta_integral,log_relative_value\n";
    for (std::size_t l = 0; l < dec.log_v.size(); ++l)
        out << l << ',' << label_or_time(labels, times, l) << ','
            << format_value(dec.log_g_term[l]) << ',' << format_value(dec.quadratic_term[l])
            << ',' << format_value(dec.beta_term[l]) << ',' << format_value(dec.log_v[l])
            << "\n";
}

void write_weights_csv(const std::string& path, const BacktestResult& result,
                       const std::vector<std::string>& tickers) {
    std::ofstream out = open_out(path);
    out << "step,date";
    for (const auto& t : tickers) out << ',' << t;
    out << "\n";
    for (std::size_t l = 0; l < result.steps(); ++l) {
        out << l << ',' << label_or_time(result.labels, result.times, l);
        for (std::size_t i = 0; i < result.weights_used.cols(); ++i)
            out << ',' << format_value(result.weights_used(l, i));
        out << "\n";
    }
}

} // namespace spt
