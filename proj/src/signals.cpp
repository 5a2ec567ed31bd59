#include "wsb/signals.hpp"

#include <algorithm>
#include <sstream>

#include "wsb/error.hpp"
#include "wsb/parallel.hpp"
#include "wsb/text_io.hpp"

namespace wsb {

std::string_view signal_name(Signal s) {
    switch (s) {
        case Signal::Buy: return "buy";
        case Signal::Sell: return "sell";
        case Signal::None: return "none";
    }
    return "none";
}

std::string_view signal_class_name(SignalClass c) {
    switch (c) {
        case SignalClass::Reactive: return "reactive";
        case SignalClass::Proactive: return "proactive";
        case SignalClass::Neutral: return "neutral";
    }
    return "neutral";
}

namespace {

using ThreadTable = StringMap<std::vector<DayActivity>>;

void add_submission(const Submission& s, const TickerLexicon& lexicon,
                    const StringSet& filter, const AggregationOptions& options,
                    const DateRange& range, ThreadTable& table) {
    const Date day = s.date();
    if (!range.contains(day)) return;
    const auto idx = static_cast<std::size_t>(range.index_of(day));

    auto mentions = detect_tickers(s.title, lexicon);
    TransactionCounts tx = count_transaction_words(s.title, *options.words);
    if (s.has_body_text()) {
        auto body = detect_tickers(*s.selftext, lexicon);
        mentions.insert(mentions.end(), std::make_move_iterator(body.begin()),
                        std::make_move_iterator(body.end()));
        tx += count_transaction_words(*s.selftext, *options.words);
    }
    if (mentions.empty()) return;

    std::map<std::string_view, std::int64_t> occurrences;
    for (const auto& m : mentions) ++occurrences[m.symbol];

    const bool attribute =
        options.attribution == AttributionMode::AllMentioned || occurrences.size() == 1;

    for (const auto& [symbol, count] : occurrences) {
        if (!filter.empty() && !filter.contains(symbol)) continue;
        auto it = table.find(symbol);
        if (it == table.end()) {
            it = table.emplace(std::string(symbol),
                               std::vector<DayActivity>(static_cast<std::size_t>(range.size())))
                     .first;
        }
        DayActivity& cell = it->second[idx];
        cell.mention_count += options.counting == MentionCounting::Occurrence ? count : 1;
        if (attribute) cell.tx += tx;
    }
}

}  // namespace

DailyActivity aggregate_daily(const Corpus& corpus, const TickerLexicon& lexicon,
                              const std::set<std::string>& tickers,
                              const AggregationOptions& options) {
    const DateRange range = corpus.range;
    const auto& subs = corpus.submissions;
    const auto n = static_cast<std::ptrdiff_t>(subs.size());
    const StringSet filter(tickers.begin(), tickers.end());
    std::vector<ThreadTable> partial(static_cast<std::size_t>(max_threads()));

#pragma omp parallel
    {
        auto& table = partial[static_cast<std::size_t>(thread_index())];
#pragma omp for schedule(static)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            add_submission(subs[static_cast<std::size_t>(i)], lexicon, filter, options, range, table);
        }
    }

    DailyActivity out;
    out.range = range;
    const auto days = static_cast<std::size_t>(range.size());
    for (const auto& t : tickers) out.by_ticker.emplace(t, std::vector<DayActivity>(days));
    for (auto& table : partial) {
        for (auto& [symbol, cells] : table) {
            auto [it, inserted] = out.by_ticker.try_emplace(symbol, std::move(cells));
            if (inserted) continue;
            for (std::size_t d = 0; d < days; ++d) it->second[d] += cells[d];
        }
    }
    return out;
}

DailyActivity merge_activity(DailyActivity a, const DailyActivity& b) {
    if (!(a.range == b.range)) throw ArgumentError("cannot merge activity over different ranges");
    for (const auto& [symbol, cells] : b.by_ticker) {
        auto [it, inserted] = a.by_ticker.try_emplace(symbol, cells);
        if (inserted) continue;
        for (std::size_t d = 0; d < cells.size(); ++d) it->second[d] += cells[d];
    }
    return a;
}

Signal derive_daily_signal(const TransactionCounts& tx) {
    if (tx.buy > tx.sell) return Signal::Buy;
    if (tx.sell > tx.buy) return Signal::Sell;
    return Signal::None;
}

SummaryTable join_market(const DailyActivity& activity,
                         const std::map<std::string, PriceSeries>& series) {
    SummaryTable table;
    for (const auto& [ticker, days] : activity.by_ticker) {
        auto sit = series.find(ticker);
        if (sit == series.end()) {
            throw CoverageError("no price series for " + ticker, {});
        }
        const PriceSeries& ps = sit->second;
        if (!ps.range().contains(activity.range)) {
            std::vector<std::string> missing;
            for (Date d = activity.range.first; d <= activity.range.last; ++d) {
                if (!ps.range().contains(d)) missing.push_back(d.to_string());
            }
            throw CoverageError("price series for " + ticker + " misses " +
                                    std::to_string(missing.size()) + " day(s) of " +
                                    activity.range.to_string(),
                                std::move(missing));
        }

        auto& rows = table[ticker];
        rows.reserve(days.size());
        for (std::size_t i = 0; i < days.size(); ++i) {
            const Date d = activity.range.first + static_cast<std::int32_t>(i);
            const std::size_t t = *ps.index_of(d);
            DailySummary s;
            s.ticker = ticker;
            s.date = d;
            s.mention_count = days[i].mention_count;
            s.tx = days[i].tx;
            s.signal = derive_daily_signal(s.tx);
            s.is_trading_day = ps.bars[t].is_trading_day;
            s.close = ps.bars[t].close;
            s.volume = ps.bars[t].volume;
            s.rel_volatility = ps.rel_volatility[t];
            for (std::size_t k = 0; k < kNumBefore; ++k) {
                s.change_before[k] = ps.change_before[k][t];
                s.ma_of_change[k] = ps.ma_of_change[k][t];
            }
            for (std::size_t k = 0; k < kNumAfter; ++k) s.change_after[k] = ps.change_after[k][t];
            rows.push_back(std::move(s));
        }
    }
    return table;
}

DayFlags derive_flags(const DailySummary& s, Horizon x, Horizon y) {
    if (!is_before_horizon(x)) throw ArgumentError("x must be 1d, 3d or 1w");
    DayFlags f;
    const auto& before = s.before(x);
    const auto& after_x = s.after(x);
    const auto& after_y = s.after(y);
    if (before) {
        f.price_up_before = *before > 0;
        f.buy_after_decline = s.signal == Signal::Buy && *before < 0;
    }
    if (after_y) {
        f.price_up_after = *after_y > 0;
        f.buy_accuracy = s.signal == Signal::Buy && *after_y > 0;
        f.sell_accuracy = s.signal == Signal::Sell && *after_y < 0;
    }
    if (before && after_x) f.dip = *before < 0 && *after_x > 0;
    return f;
}

bool is_classifiable(const DailySummary& s, Horizon x) {
    return s.signal == Signal::Buy && is_before_horizon(x) && s.before(x) && s.after(x);
}

SignalClass classify_buy_signal(const DailySummary& s, Horizon x) {
    if (s.signal != Signal::Buy) {
        throw ContractViolation("classify_buy_signal called on a " + std::string(signal_name(s.signal)) +
                                " day (" + s.ticker + " " + s.date.to_string() + ")");
    }
    if (!is_before_horizon(x)) throw ContractViolation("x must be 1d, 3d or 1w");
    const auto& before = s.before(x);
    const auto& after = s.after(x);
    if (!before || !after) {
        throw ContractViolation("price changes around " + s.date.to_string() + " are undefined");
    }
    if (*before > *after) return SignalClass::Reactive;
    if (*before < *after) return SignalClass::Proactive;
    return SignalClass::Neutral;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

constexpr std::size_t kFixedColumns = 13;

std::string cell(const MaybePercent& v) { return v ? format_double_exact(*v) : "NA"; }
std::string cell(const std::optional<bool>& v) { return v ? (*v ? "1" : "0") : "NA"; }

MaybePercent parse_maybe(std::string_view s) {
    if (s == "NA") return std::nullopt;
    return parse_double(s);
}

}  // namespace

std::vector<std::string> summary_csv_columns() {
    std::vector<std::string> cols{"ticker",         "date",  "mention_count", "buy",
                                  "hold",           "sell",  "call",          "put",
                                  "signal",         "is_trading_day",         "close",
                                  "volume",         "rel_volatility"};
    for (Horizon x : kBeforeHorizons) cols.push_back("change_before_" + std::string(horizon_tag(x)));
    for (Horizon y : kAfterHorizons) cols.push_back("change_after_" + std::string(horizon_tag(y)));
    for (Horizon x : kBeforeHorizons) cols.push_back("ma_change_before_" + std::string(horizon_tag(x)));
    for (Horizon x : kBeforeHorizons) cols.push_back("price_up_before_" + std::string(horizon_tag(x)));
    for (Horizon y : kAfterHorizons) cols.push_back("price_up_after_" + std::string(horizon_tag(y)));
    for (Horizon x : kBeforeHorizons) cols.push_back("dip_" + std::string(horizon_tag(x)));
    for (Horizon x : kBeforeHorizons) cols.push_back("buy_after_decline_" + std::string(horizon_tag(x)));
    for (Horizon y : kAfterHorizons) cols.push_back("buy_accuracy_" + std::string(horizon_tag(y)));
    for (Horizon y : kAfterHorizons) cols.push_back("sell_accuracy_" + std::string(horizon_tag(y)));
    return cols;
}

void write_summaries_csv(std::ostream& out, const SummaryTable& table) {
    const auto cols = summary_csv_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
    out << '\n';
    for (const auto& [ticker, rows] : table) {
        for (const DailySummary& s : rows) {
            out << csv_escape(s.ticker) << ',' << s.date.to_string() << ',' << s.mention_count << ','
                << s.tx.buy << ',' << s.tx.hold << ',' << s.tx.sell << ',' << s.tx.call << ','
                << s.tx.put << ',' << signal_name(s.signal) << ',' << (s.is_trading_day ? 1 : 0)
                << ',' << format_double_exact(s.close) << ',' << s.volume << ','
                << format_double_exact(s.rel_volatility);
            for (const auto& v : s.change_before) out << ',' << cell(v);
            for (const auto& v : s.change_after) out << ',' << cell(v);
            for (const auto& v : s.ma_of_change) out << ',' << cell(v);
            for (Horizon x : kBeforeHorizons) out << ',' << cell(derive_flags(s, x, x).price_up_before);
            for (Horizon y : kAfterHorizons) {
                out << ',' << cell(derive_flags(s, Horizon::Day1, y).price_up_after);
            }
            for (Horizon x : kBeforeHorizons) out << ',' << cell(derive_flags(s, x, x).dip);
            for (Horizon x : kBeforeHorizons) out << ',' << cell(derive_flags(s, x, x).buy_after_decline);
            for (Horizon y : kAfterHorizons) out << ',' << cell(derive_flags(s, Horizon::Day1, y).buy_accuracy);
            for (Horizon y : kAfterHorizons) out << ',' << cell(derive_flags(s, Horizon::Day1, y).sell_accuracy);
            out << '\n';
        }
    }
}

SummaryTable read_summaries_csv(std::istream& in) {
    SummaryTable table;
    std::string line;
    std::size_t line_no = 0;
    const auto expected = summary_csv_columns();
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1) {
            if (split_csv_line(line) != expected) throw FormatError("unexpected daily summary header", 1);
            continue;
        }
        if (trim(line).empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != expected.size()) throw FormatError("wrong number of fields", line_no);
        try {
            DailySummary s;
            s.ticker = f[0];
            s.date = Date::parse(f[1]);
            s.mention_count = parse_int(f[2]);
            s.tx = TransactionCounts{parse_int(f[3]), parse_int(f[4]), parse_int(f[5]),
                                     parse_int(f[6]), parse_int(f[7])};
            if (f[8] == "buy") {
                s.signal = Signal::Buy;
            } else if (f[8] == "sell") {
                s.signal = Signal::Sell;
            } else if (f[8] == "none") {
                s.signal = Signal::None;
            } else {
                throw FormatError("unknown signal '" + f[8] + "'", line_no);
            }
            s.is_trading_day = f[9] == "1";
            s.close = parse_double(f[10]);
            s.volume = static_cast<std::uint64_t>(parse_int(f[11]));
            s.rel_volatility = parse_double(f[12]);
            std::size_t c = kFixedColumns;
            for (auto& v : s.change_before) v = parse_maybe(f[c++]);
            for (auto& v : s.change_after) v = parse_maybe(f[c++]);
            for (auto& v : s.ma_of_change) v = parse_maybe(f[c++]);
            auto& rows = table[s.ticker];
            if (!rows.empty() && s.date != rows.back().date + 1) {
                throw FormatError("daily summaries for " + s.ticker + " are not contiguous", line_no);
            }
            rows.push_back(std::move(s));
        } catch (const FormatError& e) {
            throw FormatError("daily summaries line " + std::to_string(line_no) + ": " + e.what(),
                              line_no);
        }
    }
    if (line_no == 0) throw FormatError("empty daily summary file", 0);
    return table;
}

}  // namespace wsb
