#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wsb/date.hpp"
#include "wsb/lexer.hpp"
#include "wsb/market.hpp"
#include "wsb/signals.hpp"

namespace wsb {

enum class StrategyKind : std::uint8_t {
    AllDays,
    MentionDays,
    BuySignalDays,
    SellSignalDays,
    EquallyDistributed,
    RandomlyDistributed,
    ReactiveBuy,
    ProactiveBuy,
    MaFilteredBuy,
};

enum class MaMode : std::uint8_t { AnyBelow, AllBelow };

struct StrategySpec {
    StrategyKind kind = StrategyKind::AllDays;
    /// Signal whose per-ticker count sizes the equally/randomly distributed baselines.
    Signal reference = Signal::Buy;
    std::uint64_t seed = 42;
    int trials = 5;
    Horizon x = Horizon::Day1;
    MaMode ma_mode = MaMode::AnyBelow;
    std::optional<DateRange> date_range;

    /// Short identifier, also used as report file stem: "all", "mentions", "buy", "sell",
    /// "equal", "random", "reactive_1d", "proactive_1w", "ma_any", "ma_all".
    /// Baselines sized by sell signals get a "_sell" suffix.
    std::string name() const;
    /// Accepts the names above, with ':' or '_' as separator ("reactive:3d", "equal:sell").
    static StrategySpec parse(std::string_view text);
    /// Throws ArgumentError on trials < 1 or a look-ahead x.
    void validate() const;
};

struct EvaluationOptions {
    /// Drop filled (non-trading) days from every selection.
    bool trading_days_only = false;
};

/// Mean change and success rate over the selected days whose change is defined.
/// Success means a strictly positive change.
struct WindowResult {
    std::int64_t n = 0;
    std::int64_t successes = 0;
    std::optional<double> avg_change;    // percent
    std::optional<double> success_rate;  // ratio in [0, 1]
};

struct CohortStats {
    std::int64_t days = 0;  // selected days, defined changes or not
    std::array<WindowResult, kNumAfter> after{};
    std::array<WindowResult, kNumBefore> before{};
    std::optional<double> avg_mentions;
    std::optional<double> avg_volatility;  // ratio
    std::optional<double> avg_volume;
};

struct Dispersion {
    std::int64_t tickers = 0;
    std::optional<double> mean;
    std::optional<double> median;
};

struct EvaluationReport {
    std::string strategy;
    int trials = 1;
    /// Observations pooled over tickers (and trials).
    CohortStats pooled;
    std::map<std::string, CohortStats> per_ticker;
    /// Across tickers with a defined value: per-ticker avg change and success rate.
    std::array<Dispersion, kNumAfter> ticker_avg_change{};
    std::array<Dispersion, kNumAfter> ticker_success_rate{};
};

/// Baseline a: 1-based day indices floor(D/n)*k + delta for k = 1..n, dropping those past D.
/// delta = floor(D/n/2) only when floor(D/n) == 7 and every floor(D/n)*k is a weekend day.
/// Throws ArgumentError unless 1 <= n <= D.
std::vector<int> equally_distributed_days(int total_days, int n,
                                          const std::function<bool(int)>& is_weekend);

/// Baseline b: `trials` sets of n distinct 1-based indices from 1..D, each sorted.
/// Trial t of stream s draws from std::mt19937_64 seeded with
/// splitmix64(splitmix64(seed + s * golden) + (t + 1) * golden), using a partial Fisher-Yates
/// shuffle with rejection-sampled bounds, so results do not depend on the standard library.
/// Throws ArgumentError when n > D, n < 0 or trials < 1.
std::vector<std::vector<int>> random_days(int total_days, int n, std::uint64_t seed, int trials,
                                          std::uint64_t stream = 0);

/// Stream id used for a ticker's random baseline.
std::uint64_t ticker_stream(std::string_view ticker);

/// Buy days whose look-back change is below its trailing moving average for at least one
/// (AnyBelow) or all (AllBelow) of 1d/3d/1w. Days with any undefined average are excluded.
bool passes_ma_filter(const DailySummary& day, MaMode mode);
std::vector<std::size_t> ma_filter(std::span<const DailySummary> days, MaMode mode);

/// Days of one ticker inside `range` (whole input when nullopt).
std::span<const DailySummary> days_in_range(std::span<const DailySummary> days,
                                            const std::optional<DateRange>& range);

/// Index sets (into `days`) selected by `spec`; one set per trial for the random baseline,
/// exactly one set otherwise.
std::vector<std::vector<std::size_t>> select_days(std::span<const DailySummary> days,
                                                  const StrategySpec& spec,
                                                  const EvaluationOptions& options,
                                                  std::string_view ticker);

/// Evaluates every ticker (OpenMP across tickers) and pools the results in ticker order,
/// so output does not depend on the thread count.
EvaluationReport evaluate_strategy(const SummaryTable& summaries, const StrategySpec& spec,
                                   const EvaluationOptions& options = {});

struct RankedTicker {
    std::string symbol;
    std::int64_t mentions = 0;
    bool operator==(const RankedTicker&) const = default;
};

struct PortfolioSelection {
    std::vector<DateRange> windows;
    std::vector<std::vector<RankedTicker>> top;  // per window, descending mentions, ties by symbol
    std::vector<std::string> intersection;       // sorted
};

/// Top-K tickers by mentions per window (days outside the activity range are ignored),
/// and the tickers present in every window's top-K. Tickers never mentioned are not ranked.
PortfolioSelection select_portfolio(const DailyActivity& activity, std::span<const DateRange> windows,
                                    int k);

/// Sector -> count; tickers without sector metadata go to "unknown".
std::map<std::string, int> sector_distribution(std::span<const std::string> tickers,
                                               const TickerLexicon& lexicon);

/// Keeps only days inside `range`. Look-ahead changes computed from later prices stay defined.
SummaryTable restrict_range(const SummaryTable& summaries, const DateRange& range);

}  // namespace wsb
