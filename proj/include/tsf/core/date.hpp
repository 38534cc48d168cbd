#pragma once

#include <chrono>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace tsf {

/// Calendar date of a trading day.
class Date {
public:
    constexpr Date() = default;
    constexpr explicit Date(std::chrono::year_month_day ymd) : ymd_(ymd) {}
    constexpr Date(int y, unsigned m, unsigned d)
        : ymd_(std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}) {}

    /// Parses ISO `YYYY-MM-DD`. Returns nullopt on malformed or impossible dates.
    static std::optional<Date> parse(std::string_view text) {
        if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
        auto digits = [&](std::size_t pos, std::size_t len, int& out) {
            out = 0;
            for (std::size_t i = pos; i < pos + len; ++i) {
                if (text[i] < '0' || text[i] > '9') return false;
                out = out * 10 + (text[i] - '0');
            }
            return true;
        };
        int y = 0, m = 0, d = 0;
        if (!digits(0, 4, y) || !digits(5, 2, m) || !digits(8, 2, d)) return std::nullopt;
        Date date(y, static_cast<unsigned>(m), static_cast<unsigned>(d));
        if (!date.ymd_.ok()) return std::nullopt;
        return date;
    }

    std::string to_string() const {
        char buf[16];
        std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd_.year()),
                      static_cast<unsigned>(ymd_.month()), static_cast<unsigned>(ymd_.day()));
        return buf;
    }

    constexpr std::chrono::year_month_day ymd() const { return ymd_; }

    std::chrono::weekday weekday() const { return std::chrono::weekday{std::chrono::sys_days{ymd_}}; }

    /// Calendar day immediately after this one.
    Date next_day() const { return Date{std::chrono::year_month_day{std::chrono::sys_days{ymd_} + std::chrono::days{1}}}; }

    friend constexpr auto operator<=>(const Date&, const Date&) = default;

private:
    std::chrono::year_month_day ymd_{std::chrono::year{1970}, std::chrono::month{1}, std::chrono::day{1}};
};

}  // namespace tsf
