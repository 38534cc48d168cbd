#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tsf/core/date.hpp"
#include "tsf/error.hpp"

namespace tsf {

/**
 * Date-indexed daily closing prices.
 *
 * Dates are strictly increasing trading days; values carry no NaN. The index
 * is the trading-day ordinal, weekends and holidays are simply absent.
 */
class PriceSeries {
public:
    PriceSeries() = default;

    PriceSeries(std::vector<Date> dates, std::vector<double> values, std::string symbol = {})
        : dates_(std::move(dates)), values_(std::move(values)), symbol_(std::move(symbol)) {
        if (dates_.size() != values_.size())
            throw InputError("PriceSeries: " + std::to_string(dates_.size()) + " dates but " +
                             std::to_string(values_.size()) + " values");
        for (std::size_t i = 0; i < values_.size(); ++i) {
            if (!std::isfinite(values_[i]))
                throw InputError("PriceSeries: non-finite value at index " + std::to_string(i));
            if (i > 0 && !(dates_[i - 1] < dates_[i]))
                throw InputError("PriceSeries: dates not strictly increasing at index " + std::to_string(i));
        }
    }

    /// Builds a series over consecutive weekdays starting at `start`.
    static PriceSeries from_values(std::vector<double> values, std::string symbol = {},
                                   Date start = Date(2000, 1, 3)) {
        std::vector<Date> dates;
        dates.reserve(values.size());
        Date d = start;
        for (std::size_t i = 0; i < values.size(); ++i) {
            while (d.weekday() == std::chrono::Saturday || d.weekday() == std::chrono::Sunday) d = d.next_day();
            dates.push_back(d);
            d = d.next_day();
        }
        return PriceSeries(std::move(dates), std::move(values), std::move(symbol));
    }

    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }

    const std::vector<Date>& dates() const noexcept { return dates_; }
    const std::vector<double>& values() const noexcept { return values_; }
    const std::string& symbol() const noexcept { return symbol_; }

    double operator[](std::size_t i) const { return values_[i]; }

    /// Half-open slice [begin, end).
    PriceSeries slice(std::size_t begin, std::size_t end) const {
        if (begin > end || end > size())
            throw RangeError("slice [" + std::to_string(begin) + ", " + std::to_string(end) +
                             ") outside series of length " + std::to_string(size()));
        return PriceSeries(std::vector<Date>(dates_.begin() + begin, dates_.begin() + end),
                           std::vector<double>(values_.begin() + begin, values_.begin() + end), symbol_);
    }

    friend bool operator==(const PriceSeries&, const PriceSeries&) = default;

private:
    std::vector<Date> dates_;
    std::vector<double> values_;
    std::string symbol_;
};

/// Result of reading an OHLCV export: the close series plus the audit of dropped rows.
struct IngestResult {
    PriceSeries series;
    std::size_t dropped_count = 0;
    std::vector<std::size_t> dropped_lines;
    bool resorted = false;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

inline std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

inline std::vector<std::string_view> split_fields(std::string_view line, char sep = ',') {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (;;) {
        auto pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            fields.push_back(trim(line.substr(start)));
            break;
        }
        fields.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
    return fields;
}

inline bool parse_double(std::string_view s, double& out) {
    s = trim(s);
    if (s.empty()) return false;
    if (s.front() == '+') s.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size() && std::isfinite(out);
}

inline bool is_missing(std::string_view s) {
    s = trim(s);
    return s.empty() || lower(s) == "null";
}

/// Splits text into lines, tolerating CRLF endings.
inline std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto pos = text.find('\n', start);
        auto line = text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return lines;
}

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

/**
 * Parses a Yahoo-Finance style OHLCV export and keeps the Close column.
 *
 * Rows whose Close is empty or `null` are dropped and counted. Other rows must
 * carry a valid ISO date and numeric fields, otherwise a ParseError names the
 * 1-based line. Rows are re-sorted ascending by date when the file is not.
 */
inline IngestResult parse_ohlcv_csv(std::string_view text, std::string symbol = {}) {
    static constexpr std::string_view kRequired[] = {"date", "open", "high", "low", "close", "adj close", "volume"};

    auto lines = detail::split_lines(text);
    std::size_t header_line = 0;
    while (header_line < lines.size() && detail::trim(lines[header_line]).empty()) ++header_line;
    if (header_line == lines.size()) throw SchemaError("empty CSV document");

    auto header = detail::split_fields(lines[header_line]);
    std::vector<std::size_t> column(std::size(kRequired), header.size());
    for (std::size_t c = 0; c < header.size(); ++c) {
        auto name = detail::lower(header[c]);
        for (std::size_t r = 0; r < std::size(kRequired); ++r)
            if (name == kRequired[r]) column[r] = c;
    }
    for (std::size_t r = 0; r < std::size(kRequired); ++r)
        if (column[r] == header.size())
            throw SchemaError("header is missing column '" + std::string(kRequired[r]) + "'");
    const std::size_t date_col = column[0];
    const std::size_t close_col = column[4];

    IngestResult result;
    std::vector<std::pair<Date, double>> rows;
    std::vector<std::size_t> row_lines;
    for (std::size_t i = header_line + 1; i < lines.size(); ++i) {
        const std::size_t lineno = i + 1;
        if (detail::trim(lines[i]).empty()) continue;
        auto fields = detail::split_fields(lines[i]);
        if (fields.size() != header.size())
            throw ParseError(lineno, "expected " + std::to_string(header.size()) + " fields, found " +
                                         std::to_string(fields.size()));
        if (detail::is_missing(fields[close_col])) {
            ++result.dropped_count;
            result.dropped_lines.push_back(lineno);
            continue;
        }
        auto date = Date::parse(fields[date_col]);
        if (!date) throw ParseError(lineno, "unparseable date '" + std::string(fields[date_col]) + "'");
        for (std::size_t r = 1; r < std::size(kRequired); ++r) {
            auto f = fields[column[r]];
            double v = 0.0;
            if (r != 4 && detail::is_missing(f)) continue;
            if (!detail::parse_double(f, v))
                throw ParseError(lineno, "unparseable " + std::string(kRequired[r]) + " '" + std::string(f) + "'");
        }
        double close = 0.0;
        detail::parse_double(fields[close_col], close);
        rows.emplace_back(*date, close);
        row_lines.push_back(lineno);
    }

    if (!std::is_sorted(rows.begin(), rows.end(), [](auto& a, auto& b) { return a.first < b.first; })) {
        std::vector<std::size_t> order(rows.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return rows[a].first < rows[b].first; });
        std::vector<std::pair<Date, double>> sorted;
        std::vector<std::size_t> sorted_lines;
        for (auto k : order) {
            sorted.push_back(rows[k]);
            sorted_lines.push_back(row_lines[k]);
        }
        rows = std::move(sorted);
        row_lines = std::move(sorted_lines);
        result.resorted = true;
    }

    std::vector<Date> dates;
    std::vector<double> values;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i > 0 && rows[i].first == rows[i - 1].first)
            throw ParseError(row_lines[i], "duplicate date " + rows[i].first.to_string());
        dates.push_back(rows[i].first);
        values.push_back(rows[i].second);
    }
    result.series = PriceSeries(std::move(dates), std::move(values), std::move(symbol));
    return result;
}

/// Two-column `date,close` form; values printed with round-trip precision.
inline std::string serialize_series_csv(const PriceSeries& series) {
    std::string out = "date,close\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        out += series.dates()[i].to_string();
        out += ',';
        out += detail::format_double(series[i]);
        out += '\n';
    }
    return out;
}

inline PriceSeries parse_series_csv(std::string_view text, std::string symbol = {}) {
    auto lines = detail::split_lines(text);
    if (lines.empty() || detail::lower(detail::trim(lines[0])) != "date,close")
        throw SchemaError("expected header 'date,close'");
    std::vector<Date> dates;
    std::vector<double> values;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (detail::trim(lines[i]).empty()) continue;
        auto fields = detail::split_fields(lines[i]);
        if (fields.size() != 2) throw ParseError(i + 1, "expected 2 fields");
        auto date = Date::parse(fields[0]);
        double v = 0.0;
        if (!date) throw ParseError(i + 1, "unparseable date '" + std::string(fields[0]) + "'");
        if (!detail::parse_double(fields[1], v)) throw ParseError(i + 1, "unparseable close '" + std::string(fields[1]) + "'");
        dates.push_back(*date);
        values.push_back(v);
    }
    return PriceSeries(std::move(dates), std::move(values), std::move(symbol));
}

/// Writes a Yahoo-style OHLCV export whose every price column equals the close.
inline std::string serialize_ohlcv_csv(const PriceSeries& series) {
    std::string out = "Date,Open,High,Low,Close,Adj Close,Volume\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        auto v = detail::format_double(series[i]);
        out += series.dates()[i].to_string() + ',' + v + ',' + v + ',' + v + ',' + v + ',' + v + ",0\n";
    }
    return out;
}

}  // namespace tsf
