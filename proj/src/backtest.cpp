#include "wsb/backtest.hpp"

#include <algorithm>
#include <random>

#include "wsb/error.hpp"
#include "wsb/hash.hpp"
#include "wsb/text_io.hpp"

namespace wsb {

// ---------------------------------------------------------------------------
// StrategySpec

std::string StrategySpec::name() const {
    const std::string sell_suffix = reference == Signal::Sell ? "_sell" : "";
    switch (kind) {
        case StrategyKind::AllDays: return "all";
        case StrategyKind::MentionDays: return "mentions";
        case StrategyKind::BuySignalDays: return "buy";
        case StrategyKind::SellSignalDays: return "sell";
        case StrategyKind::EquallyDistributed: return "equal" + sell_suffix;
        case StrategyKind::RandomlyDistributed: return "random" + sell_suffix;
        case StrategyKind::ReactiveBuy: return "reactive_" + std::string(horizon_tag(x));
        case StrategyKind::ProactiveBuy: return "proactive_" + std::string(horizon_tag(x));
        case StrategyKind::MaFilteredBuy: return ma_mode == MaMode::AnyBelow ? "ma_any" : "ma_all";
    }
    return "unknown";
}

StrategySpec StrategySpec::parse(std::string_view text) {
    const std::string lowered = to_lower_ascii(trim(text));
    std::string_view head = lowered;
    std::string_view arg;
    if (auto sep = head.find_first_of(":_"); sep != std::string_view::npos) {
        arg = head.substr(sep + 1);
        head = head.substr(0, sep);
    }

    StrategySpec spec;
    auto no_arg = [&] {
        if (!arg.empty()) throw ArgumentError("strategy '" + lowered + "' takes no argument");
    };
    auto reference_arg = [&] {
        if (arg.empty() || arg == "buy") {
            spec.reference = Signal::Buy;
        } else if (arg == "sell") {
            spec.reference = Signal::Sell;
        } else {
            throw ArgumentError("baseline reference must be buy or sell, got '" + std::string(arg) + "'");
        }
    };
    auto horizon_arg = [&] {
        auto h = parse_horizon(arg);
        if (!h || !is_before_horizon(*h)) {
            throw ArgumentError("strategy '" + lowered + "' needs x in {1d, 3d, 1w}");
        }
        spec.x = *h;
    };

    if (head == "all") {
        no_arg();
        spec.kind = StrategyKind::AllDays;
    } else if (head == "mentions") {
        no_arg();
        spec.kind = StrategyKind::MentionDays;
    } else if (head == "buy") {
        no_arg();
        spec.kind = StrategyKind::BuySignalDays;
    } else if (head == "sell") {
        no_arg();
        spec.kind = StrategyKind::SellSignalDays;
    } else if (head == "equal") {
        reference_arg();
        spec.kind = StrategyKind::EquallyDistributed;
    } else if (head == "random") {
        reference_arg();
        spec.kind = StrategyKind::RandomlyDistributed;
    } else if (head == "reactive") {
        horizon_arg();
        spec.kind = StrategyKind::ReactiveBuy;
    } else if (head == "proactive") {
        horizon_arg();
        spec.kind = StrategyKind::ProactiveBuy;
    } else if (head == "ma") {
        spec.kind = StrategyKind::MaFilteredBuy;
        if (arg == "any" || arg.empty()) {
            spec.ma_mode = MaMode::AnyBelow;
        } else if (arg == "all") {
            spec.ma_mode = MaMode::AllBelow;
        } else {
            throw ArgumentError("moving-average mode must be any or all");
        }
    } else {
        throw ArgumentError("unknown strategy '" + lowered + "'");
    }
    return spec;
}

void StrategySpec::validate() const {
    if (trials < 1) throw ArgumentError("strategy " + name() + ": trials must be >= 1");
    if (!is_before_horizon(x)) throw ArgumentError("strategy " + name() + ": x must be 1d, 3d or 1w");
    if (reference == Signal::None) throw ArgumentError("baseline reference must be buy or sell");
    if (date_range && date_range->empty()) throw ArgumentError("strategy " + name() + ": empty date range");
}

// ---------------------------------------------------------------------------
// Baseline samplers

std::vector<int> equally_distributed_days(int total_days, int n,
                                          const std::function<bool(int)>& is_weekend) {
    if (n < 1 || n > total_days) {
        throw ArgumentError("equally distributed days need 1 <= n <= D (n=" + std::to_string(n) +
                            ", D=" + std::to_string(total_days) + ")");
    }
    const int step = total_days / n;
    int delta = 0;
    if (step == 7) {
        bool all_weekend = true;
        for (int k = 1; k <= n && all_weekend; ++k) all_weekend = is_weekend(step * k);
        if (all_weekend) delta = step / 2;
    }
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int k = 1; k <= n; ++k) {
        const int i = step * k + delta;
        if (i <= total_days) out.push_back(i);
    }
    return out;
}

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t bounded(std::mt19937_64& gen, std::uint64_t m) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % m;
    std::uint64_t r;
    do {
        r = gen();
    } while (r >= limit);
    return r % m;
}

}  // namespace

std::vector<std::vector<int>> random_days(int total_days, int n, std::uint64_t seed, int trials,
                                          std::uint64_t stream) {
    if (trials < 1) throw ArgumentError("random baseline needs trials >= 1");
    if (n < 0 || n > total_days) {
        throw ArgumentError("random baseline needs 0 <= n <= D (n=" + std::to_string(n) +
                            ", D=" + std::to_string(total_days) + ")");
    }
    std::vector<std::vector<int>> out;
    out.reserve(static_cast<std::size_t>(trials));
    std::vector<int> pool(static_cast<std::size_t>(total_days));
    const std::uint64_t stream_seed = splitmix64(seed + stream * kGolden);
    for (int t = 0; t < trials; ++t) {
        std::mt19937_64 gen(splitmix64(stream_seed + static_cast<std::uint64_t>(t + 1) * kGolden));
        for (int i = 0; i < total_days; ++i) pool[static_cast<std::size_t>(i)] = i + 1;
        for (int i = 0; i < n; ++i) {
            const auto remaining = static_cast<std::uint64_t>(total_days - i);
            const auto j = static_cast<std::size_t>(i) + static_cast<std::size_t>(bounded(gen, remaining));
            std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
        }
        std::vector<int> picked(pool.begin(), pool.begin() + n);
        std::sort(picked.begin(), picked.end());
        out.push_back(std::move(picked));
    }
    return out;
}

std::uint64_t ticker_stream(std::string_view ticker) { return fnv1a(ticker); }

// ---------------------------------------------------------------------------
// Selection

bool passes_ma_filter(const DailySummary& day, MaMode mode) {
    if (day.signal != Signal::Buy) return false;
    int below = 0;
    for (Horizon x : kBeforeHorizons) {
        const auto& change = day.before(x);
        const auto& ma = day.moving_average(x);
        if (!change || !ma) return false;
        if (*change < *ma) ++below;
    }
    return mode == MaMode::AnyBelow ? below > 0 : below == static_cast<int>(kNumBefore);
}

std::vector<std::size_t> ma_filter(std::span<const DailySummary> days, MaMode mode) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < days.size(); ++i) {
        if (passes_ma_filter(days[i], mode)) out.push_back(i);
    }
    return out;
}

std::span<const DailySummary> days_in_range(std::span<const DailySummary> days,
                                            const std::optional<DateRange>& range) {
    if (!range) return days;
    auto lo = std::lower_bound(days.begin(), days.end(), range->first,
                               [](const DailySummary& s, Date d) { return s.date < d; });
    auto hi = std::upper_bound(lo, days.end(), range->last,
                               [](Date d, const DailySummary& s) { return d < s.date; });
    return days.subspan(static_cast<std::size_t>(lo - days.begin()),
                        static_cast<std::size_t>(hi - lo));
}

std::vector<std::vector<std::size_t>> select_days(std::span<const DailySummary> days,
                                                  const StrategySpec& spec,
                                                  const EvaluationOptions& options,
                                                  std::string_view ticker) {
    auto eligible = [&](std::size_t i) { return !options.trading_days_only || days[i].is_trading_day; };
    auto pick = [&](auto&& pred) {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < days.size(); ++i) {
            if (eligible(i) && pred(days[i])) out.push_back(i);
        }
        return std::vector<std::vector<std::size_t>>{std::move(out)};
    };

    switch (spec.kind) {
        case StrategyKind::AllDays:
            return pick([](const DailySummary&) { return true; });
        case StrategyKind::MentionDays:
            return pick([](const DailySummary& s) { return s.mention_count > 0; });
        case StrategyKind::BuySignalDays:
            return pick([](const DailySummary& s) { return s.signal == Signal::Buy; });
        case StrategyKind::SellSignalDays:
            return pick([](const DailySummary& s) { return s.signal == Signal::Sell; });
        case StrategyKind::ReactiveBuy:
        case StrategyKind::ProactiveBuy: {
            const SignalClass wanted =
                spec.kind == StrategyKind::ReactiveBuy ? SignalClass::Reactive : SignalClass::Proactive;
            return pick([&](const DailySummary& s) {
                return is_classifiable(s, spec.x) && classify_buy_signal(s, spec.x) == wanted;
            });
        }
        case StrategyKind::MaFilteredBuy:
            return pick([&](const DailySummary& s) { return passes_ma_filter(s, spec.ma_mode); });
        case StrategyKind::EquallyDistributed:
        case StrategyKind::RandomlyDistributed: {
            const int total = static_cast<int>(days.size());
            int n = 0;
            for (std::size_t i = 0; i < days.size(); ++i) {
                if (eligible(i) && days[i].signal == spec.reference) ++n;
            }
            const auto trial_count =
                spec.kind == StrategyKind::RandomlyDistributed ? static_cast<std::size_t>(spec.trials) : 1;
            std::vector<std::vector<std::size_t>> sets(trial_count);
            if (n == 0) return sets;

            std::vector<std::vector<int>> picks;
            if (spec.kind == StrategyKind::EquallyDistributed) {
                picks.push_back(equally_distributed_days(total, n, [&](int i) {
                    return days[static_cast<std::size_t>(i - 1)].date.is_weekend();
                }));
            } else {
                picks = random_days(total, n, spec.seed, spec.trials, ticker_stream(ticker));
            }
            for (std::size_t t = 0; t < picks.size(); ++t) {
                for (int i : picks[t]) {
                    const auto idx = static_cast<std::size_t>(i - 1);
                    if (eligible(idx)) sets[t].push_back(idx);
                }
            }
            return sets;
        }
    }
    return {};
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

struct Sum {
    std::int64_t n = 0;
    std::int64_t successes = 0;
    double total = 0.0;

    void add(const MaybePercent& v) {
        if (!v) return;
        ++n;
        total += *v;
        if (*v > 0) ++successes;
    }
    void merge(const Sum& o) {
        n += o.n;
        successes += o.successes;
        total += o.total;
    }
    WindowResult finish() const {
        WindowResult r;
        r.n = n;
        r.successes = successes;
        if (n > 0) {
            r.avg_change = total / static_cast<double>(n);
            r.success_rate = static_cast<double>(successes) / static_cast<double>(n);
        }
        return r;
    }
};

struct CohortAccumulator {
    std::int64_t days = 0;
    double mentions = 0.0;
    double volatility = 0.0;
    double volume = 0.0;
    std::array<Sum, kNumAfter> after{};
    std::array<Sum, kNumBefore> before{};

    void add(const DailySummary& s) {
        ++days;
        mentions += static_cast<double>(s.mention_count);
        volatility += s.rel_volatility;
        volume += static_cast<double>(s.volume);
        for (std::size_t k = 0; k < kNumAfter; ++k) after[k].add(s.change_after[k]);
        for (std::size_t k = 0; k < kNumBefore; ++k) before[k].add(s.change_before[k]);
    }
    void merge(const CohortAccumulator& o) {
        days += o.days;
        mentions += o.mentions;
        volatility += o.volatility;
        volume += o.volume;
        for (std::size_t k = 0; k < kNumAfter; ++k) after[k].merge(o.after[k]);
        for (std::size_t k = 0; k < kNumBefore; ++k) before[k].merge(o.before[k]);
    }
    CohortStats finish() const {
        CohortStats c;
        c.days = days;
        for (std::size_t k = 0; k < kNumAfter; ++k) c.after[k] = after[k].finish();
        for (std::size_t k = 0; k < kNumBefore; ++k) c.before[k] = before[k].finish();
        if (days > 0) {
            const auto d = static_cast<double>(days);
            c.avg_mentions = mentions / d;
            c.avg_volatility = volatility / d;
            c.avg_volume = volume / d;
        }
        return c;
    }
};

Dispersion dispersion(std::vector<double> values) {
    Dispersion d;
    d.tickers = static_cast<std::int64_t>(values.size());
    if (values.empty()) return d;
    double sum = 0.0;
    for (double v : values) sum += v;
    d.mean = sum / static_cast<double>(values.size());
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    d.median = values.size() % 2 == 1 ? values[mid] : (values[mid - 1] + values[mid]) / 2.0;
    return d;
}

}  // namespace

EvaluationReport evaluate_strategy(const SummaryTable& summaries, const StrategySpec& spec,
                                   const EvaluationOptions& options) {
    spec.validate();

    std::vector<const std::pair<const std::string, std::vector<DailySummary>>*> tickers;
    for (const auto& entry : summaries) tickers.push_back(&entry);
    std::vector<CohortAccumulator> accs(tickers.size());
    std::vector<std::exception_ptr> errors(tickers.size());

    const auto count = static_cast<std::ptrdiff_t>(tickers.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        const auto k = static_cast<std::size_t>(i);
        try {
            const auto& [ticker, rows] = *tickers[k];
            const auto days = days_in_range(rows, spec.date_range);
            for (const auto& set : select_days(days, spec, options, ticker)) {
                for (std::size_t idx : set) accs[k].add(days[idx]);
            }
        } catch (...) {
            errors[k] = std::current_exception();
        }
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    EvaluationReport report;
    report.strategy = spec.name();
    report.trials = spec.kind == StrategyKind::RandomlyDistributed ? spec.trials : 1;
    CohortAccumulator pooled;
    for (std::size_t k = 0; k < tickers.size(); ++k) {
        pooled.merge(accs[k]);
        report.per_ticker.emplace(tickers[k]->first, accs[k].finish());
    }
    report.pooled = pooled.finish();

    for (std::size_t w = 0; w < kNumAfter; ++w) {
        std::vector<double> avg;
        std::vector<double> rate;
        for (const auto& [ticker, stats] : report.per_ticker) {
            if (stats.after[w].avg_change) avg.push_back(*stats.after[w].avg_change);
            if (stats.after[w].success_rate) rate.push_back(*stats.after[w].success_rate);
        }
        report.ticker_avg_change[w] = dispersion(std::move(avg));
        report.ticker_success_rate[w] = dispersion(std::move(rate));
    }
    return report;
}

// ---------------------------------------------------------------------------
// Portfolio

PortfolioSelection select_portfolio(const DailyActivity& activity, std::span<const DateRange> windows,
                                    int k) {
    if (k < 1) throw ArgumentError("portfolio size K must be >= 1");
    PortfolioSelection sel;
    sel.windows.assign(windows.begin(), windows.end());

    std::map<std::string, int> appearances;
    for (const DateRange& window : windows) {
        const DateRange clipped = intersect(window, activity.range);
        std::vector<RankedTicker> ranked;
        for (const auto& [symbol, days] : activity.by_ticker) {
            std::int64_t total = 0;
            if (!clipped.empty()) {
                const auto lo = static_cast<std::size_t>(activity.range.index_of(clipped.first));
                const auto hi = static_cast<std::size_t>(activity.range.index_of(clipped.last));
                for (std::size_t d = lo; d <= hi; ++d) total += days[d].mention_count;
            }
            if (total > 0) ranked.push_back({symbol, total});
        }
        std::sort(ranked.begin(), ranked.end(), [](const RankedTicker& a, const RankedTicker& b) {
            if (a.mentions != b.mentions) return a.mentions > b.mentions;
            return a.symbol < b.symbol;
        });
        if (ranked.size() > static_cast<std::size_t>(k)) ranked.resize(static_cast<std::size_t>(k));
        for (const auto& r : ranked) ++appearances[r.symbol];
        sel.top.push_back(std::move(ranked));
    }
    if (!windows.empty()) {
        for (const auto& [symbol, n] : appearances) {
            if (n == static_cast<int>(windows.size())) sel.intersection.push_back(symbol);
        }
    }
    return sel;
}

std::map<std::string, int> sector_distribution(std::span<const std::string> tickers,
                                               const TickerLexicon& lexicon) {
    std::map<std::string, int> out;
    for (const auto& t : tickers) {
        auto sector = lexicon.sector_of(t);
        ++out[sector ? std::string(*sector) : "unknown"];
    }
    return out;
}

SummaryTable restrict_range(const SummaryTable& summaries, const DateRange& range) {
    SummaryTable out;
    for (const auto& [ticker, rows] : summaries) {
        const auto days = days_in_range(rows, range);
        out.emplace(ticker, std::vector<DailySummary>(days.begin(), days.end()));
    }
    return out;
}

}  // namespace wsb
