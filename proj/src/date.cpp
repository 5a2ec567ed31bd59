#include "wsb/date.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>

#include "wsb/error.hpp"

namespace wsb {

namespace {

constexpr std::int64_t kSecondsPerDay = 86400;

int parse_fixed(std::string_view s, std::string_view whole) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw FormatError("invalid date: '" + std::string(whole) + "'", 0);
    }
    return value;
}

}  // namespace

Date Date::from_ymd(int year, unsigned month, unsigned day) {
    const std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{month},
                                          std::chrono::day{day}};
    if (!ymd.ok()) {
        throw FormatError("invalid calendar date " + std::to_string(year) + "-" +
                              std::to_string(month) + "-" + std::to_string(day),
                          0);
    }
    return Date{static_cast<std::int32_t>(std::chrono::sys_days{ymd}.time_since_epoch().count())};
}

Date Date::from_unix_seconds(std::int64_t seconds) {
    // floor division so that pre-epoch instants land on the right day
    std::int64_t days = seconds / kSecondsPerDay;
    if (seconds % kSecondsPerDay < 0) --days;
    return Date{static_cast<std::int32_t>(days)};
}

Date Date::parse(std::string_view iso) {
    if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') {
        throw FormatError("invalid date: '" + std::string(iso) + "'", 0);
    }
    const int y = parse_fixed(iso.substr(0, 4), iso);
    const int m = parse_fixed(iso.substr(5, 2), iso);
    const int d = parse_fixed(iso.substr(8, 2), iso);
    if (m < 1 || d < 1) throw FormatError("invalid date: '" + std::string(iso) + "'", 0);
    return from_ymd(y, static_cast<unsigned>(m), static_cast<unsigned>(d));
}

std::string Date::to_string() const {
    const auto d = ymd();
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                  static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
    return buf;
}

DateRange DateRange::parse(std::string_view text) {
    const auto sep = text.find("..");
    if (sep == std::string_view::npos) {
        throw FormatError("invalid range '" + std::string(text) + "', expected <start>..<end>", 0);
    }
    DateRange r{Date::parse(text.substr(0, sep)), Date::parse(text.substr(sep + 2))};
    if (r.empty()) throw FormatError("range '" + std::string(text) + "' ends before it starts", 0);
    return r;
}

std::int64_t DateRange::first_second() const {
    return static_cast<std::int64_t>(first.days_since_epoch()) * kSecondsPerDay;
}

std::int64_t DateRange::last_second() const {
    return (static_cast<std::int64_t>(last.days_since_epoch()) + 1) * kSecondsPerDay - 1;
}

std::string DateRange::to_string() const { return first.to_string() + ".." + last.to_string(); }

DateRange intersect(const DateRange& a, const DateRange& b) {
    return DateRange{std::max(a.first, b.first), std::min(a.last, b.last)};
}

}  // namespace wsb
