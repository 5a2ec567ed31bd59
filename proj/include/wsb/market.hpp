#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wsb/date.hpp"

namespace wsb {

struct PriceBar {
    Date date;
    double open = 0.0;
    double high = 0.0;
    double low = 0.0;
    double close = 0.0;
    std::uint64_t volume = 0;
    bool is_trading_day = true;
};

/// Look-back / look-ahead horizons. The first three are the "preceding x days" windows.
enum class Horizon : std::uint8_t { Day1, Day3, Week1, Month1, Month3 };

inline constexpr std::array<Horizon, 3> kBeforeHorizons{Horizon::Day1, Horizon::Day3, Horizon::Week1};
inline constexpr std::array<Horizon, 5> kAfterHorizons{Horizon::Day1, Horizon::Day3, Horizon::Week1,
                                                       Horizon::Month1, Horizon::Month3};
inline constexpr std::size_t kNumBefore = kBeforeHorizons.size();
inline constexpr std::size_t kNumAfter = kAfterHorizons.size();

constexpr std::size_t index_of(Horizon h) { return static_cast<std::size_t>(h); }
constexpr bool is_before_horizon(Horizon h) { return index_of(h) < kNumBefore; }

/// "1d", "3d", "1w", "1m", "3m".
std::string_view horizon_tag(Horizon h);
std::optional<Horizon> parse_horizon(std::string_view tag);

/// Horizon lengths in calendar days.
struct WindowLengths {
    int day1 = 1;
    int day3 = 3;
    int week1 = 7;
    int month1 = 30;
    int month3 = 90;
    int moving_average = 30;

    int days(Horizon h) const;
    bool operator==(const WindowLengths&) const = default;
};

/// Trading-day bars from "date,open,high,low,close,volume" CSV (extra columns ignored).
/// Throws FormatError with the offending line for unordered dates or non-positive closes.
std::vector<PriceBar> parse_price_csv(std::istream& in, std::string_view source = "<stream>");
std::vector<PriceBar> load_price_series(const std::filesystem::path& csv, std::string_view ticker);

/// One bar per calendar day of `range`. Days without a trading bar repeat the previous close
/// as high/low/close with zero volume. Throws CoverageError listing the leading days when
/// no trading bar exists at or before them.
std::vector<PriceBar> calendar_fill(std::span<const PriceBar> raw, const DateRange& range);

/// (high - low) / close; zero on filled days.
double compute_relative_volatility(const PriceBar& bar);

using MaybePercent = std::optional<double>;

/// Calendar-contiguous bars plus derived per-day features.
struct PriceSeries {
    std::string ticker;
    std::vector<PriceBar> bars;

    std::vector<double> rel_volatility;
    std::array<std::vector<MaybePercent>, kNumBefore> change_before;
    std::array<std::vector<MaybePercent>, kNumAfter> change_after;
    std::array<std::vector<MaybePercent>, kNumBefore> ma_of_change;

    DateRange range() const {
        return bars.empty() ? DateRange{Date{1}, Date{0}} : DateRange{bars.front().date, bars.back().date};
    }
    /// Position of `d` in `bars`, or nullopt outside the range.
    std::optional<std::size_t> index_of(Date d) const;
};

/// 100 * (close(t) - close(t - w)) / close(t - w) looking back, the mirror looking forward,
/// and the trailing mean of the look-back change over the previous `moving_average` days
/// (t - 30 ... t - 1). Values that would need days outside the series stay undefined.
void compute_window_features(PriceSeries& series, const WindowLengths& lengths = {});

/// Same kernel applied across tickers with OpenMP.
void compute_window_features(std::span<PriceSeries> series, const WindowLengths& lengths = {});

/// Fill over the raw bars' own span, then derive features.
PriceSeries build_price_series(std::string ticker, std::span<const PriceBar> raw,
                               const WindowLengths& lengths = {});

}  // namespace wsb
