#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace wsb {

/// A UTC calendar day, stored as days since 1970-01-01.
class Date {
public:
    constexpr Date() = default;
    constexpr explicit Date(std::int32_t days_since_epoch) : days_(days_since_epoch) {}

    static Date from_ymd(int year, unsigned month, unsigned day);
    static Date from_unix_seconds(std::int64_t seconds);
    /// Parses "YYYY-MM-DD". Throws FormatError on anything else.
    static Date parse(std::string_view iso);

    constexpr std::int32_t days_since_epoch() const { return days_; }
    std::chrono::sys_days sys_days() const {
        return std::chrono::sys_days{std::chrono::days{days_}};
    }
    std::chrono::year_month_day ymd() const { return std::chrono::year_month_day{sys_days()}; }
    int year() const { return static_cast<int>(ymd().year()); }

    /// 0 = Sunday ... 6 = Saturday.
    unsigned weekday() const { return std::chrono::weekday{sys_days()}.c_encoding(); }
    bool is_weekend() const {
        const unsigned wd = weekday();
        return wd == 0 || wd == 6;
    }

    std::string to_string() const;

    constexpr Date operator+(std::int32_t n) const { return Date{days_ + n}; }
    constexpr Date operator-(std::int32_t n) const { return Date{days_ - n}; }
    constexpr std::int32_t operator-(Date other) const { return days_ - other.days_; }
    constexpr Date& operator++() {
        ++days_;
        return *this;
    }
    constexpr auto operator<=>(const Date&) const = default;

private:
    std::int32_t days_ = 0;
};

/// Inclusive interval of calendar days.
struct DateRange {
    Date first;
    Date last;

    /// Parses "YYYY-MM-DD..YYYY-MM-DD".
    static DateRange parse(std::string_view text);

    bool empty() const { return last < first; }
    bool contains(Date d) const { return first <= d && d <= last; }
    bool contains(const DateRange& r) const { return contains(r.first) && contains(r.last); }
    /// Number of days; 0 for an empty range.
    std::int32_t size() const { return empty() ? 0 : (last - first) + 1; }
    /// 0-based position of `d` inside the range.
    std::int32_t index_of(Date d) const { return d - first; }

    /// Inclusive UTC second bounds.
    std::int64_t first_second() const;
    std::int64_t last_second() const;

    std::string to_string() const;
    bool operator==(const DateRange&) const = default;
};

DateRange intersect(const DateRange& a, const DateRange& b);

}  // namespace wsb
