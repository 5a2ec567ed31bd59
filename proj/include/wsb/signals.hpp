#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "wsb/corpus.hpp"
#include "wsb/date.hpp"
#include "wsb/lexer.hpp"
#include "wsb/market.hpp"

namespace wsb {

enum class Signal : std::uint8_t { None, Buy, Sell };

std::string_view signal_name(Signal s);

/// Which tickers of a submission receive its transaction words.
enum class AttributionMode : std::uint8_t {
    AllMentioned,  // every ticker the submission mentions
    SingleTicker,  // only submissions that mention exactly one distinct ticker
};

enum class MentionCounting : std::uint8_t { Occurrence, Submission };

struct AggregationOptions {
    AttributionMode attribution = AttributionMode::AllMentioned;
    MentionCounting counting = MentionCounting::Occurrence;
    const TransactionWordTable* words = &TransactionWordTable::standard();
};

struct DayActivity {
    std::int64_t mention_count = 0;
    TransactionCounts tx;

    DayActivity& operator+=(const DayActivity& o) {
        mention_count += o.mention_count;
        tx += o.tx;
        return *this;
    }
    bool operator==(const DayActivity&) const = default;
};

/// Dense per-ticker day vectors over `range` (index 0 = range.first).
struct DailyActivity {
    DateRange range;
    std::map<std::string, std::vector<DayActivity>> by_ticker;

    const DayActivity& at(const std::string& ticker, Date d) const {
        return by_ticker.at(ticker).at(static_cast<std::size_t>(range.index_of(d)));
    }
    bool operator==(const DailyActivity&) const = default;
};

/// Counts mentions and transaction words per (ticker, UTC day). With an empty `tickers`
/// set every detected symbol is kept; otherwise only the listed ones, each materialized
/// over the whole corpus range even without activity. OpenMP over submissions.
DailyActivity aggregate_daily(const Corpus& corpus, const TickerLexicon& lexicon,
                              const std::set<std::string>& tickers,
                              const AggregationOptions& options = {});

/// Element-wise sum; both sides must share a range.
DailyActivity merge_activity(DailyActivity a, const DailyActivity& b);

/// Buy iff buy > sell, Sell iff sell > buy, None on a tie (including no activity).
Signal derive_daily_signal(const TransactionCounts& tx);

struct DailySummary {
    std::string ticker;
    Date date;
    std::int64_t mention_count = 0;
    TransactionCounts tx;
    Signal signal = Signal::None;

    bool is_trading_day = true;
    double close = 0.0;
    std::uint64_t volume = 0;
    double rel_volatility = 0.0;
    std::array<MaybePercent, kNumBefore> change_before{};
    std::array<MaybePercent, kNumAfter> change_after{};
    std::array<MaybePercent, kNumBefore> ma_of_change{};

    const MaybePercent& before(Horizon x) const { return change_before.at(index_of(x)); }
    const MaybePercent& after(Horizon y) const { return change_after.at(index_of(y)); }
    const MaybePercent& moving_average(Horizon x) const { return ma_of_change.at(index_of(x)); }

    bool operator==(const DailySummary&) const = default;
};

/// Per ticker, ascending by date.
using SummaryTable = std::map<std::string, std::vector<DailySummary>>;

/// One summary per (ticker, day of activity.range). Throws CoverageError when a ticker has no
/// series or its series does not span the activity range.
SummaryTable join_market(const DailyActivity& activity,
                         const std::map<std::string, PriceSeries>& series);

/// Boolean features for one day. Undefined inputs yield undefined flags.
struct DayFlags {
    std::optional<bool> price_up_before;
    std::optional<bool> price_up_after;
    std::optional<bool> dip;
    std::optional<bool> buy_after_decline;
    std::optional<bool> buy_accuracy;
    std::optional<bool> sell_accuracy;
};

/// `x` must be one of the look-back horizons (1d, 3d, 1w).
DayFlags derive_flags(const DailySummary& summary, Horizon x, Horizon y);

enum class SignalClass : std::uint8_t { Reactive, Proactive, Neutral };

std::string_view signal_class_name(SignalClass c);

/// Reactive when the preceding x-day change exceeds the following one, Proactive when it is
/// lower, Neutral on equality. Throws ContractViolation for a non-Buy day or undefined changes.
SignalClass classify_buy_signal(const DailySummary& summary, Horizon x);

/// True when classify_buy_signal() would accept the day.
bool is_classifiable(const DailySummary& summary, Horizon x);

/// Fixed column order: identity, counts, signal, market fields, flags. Undefined -> "NA".
void write_summaries_csv(std::ostream& out, const SummaryTable& table);
/// Reads the columns written above; flag columns are ignored (they are derived).
SummaryTable read_summaries_csv(std::istream& in);

/// Header row of write_summaries_csv().
std::vector<std::string> summary_csv_columns();

}  // namespace wsb
