#include "wsb/reference.hpp"

#include <algorithm>
#include <map>

#include "wsb/text_io.hpp"

namespace wsb::reference {

namespace {

void add_text(CorpusStats& stats, StringSet& vocabulary, std::string_view text, int year,
              const StringSet& stopwords) {
    ++stats.text_count;
    ++stats.texts_per_year[year];
    for (std::string_view tok : tokenize(text)) {
        const std::int64_t chars = utf8_length(tok);
        ++stats.word_count_incl_sw;
        stats.char_count_incl_sw += chars;
        std::string lowered = to_lower_ascii(tok);
        if (stopwords.contains(lowered)) continue;
        ++stats.word_count_excl_sw;
        stats.char_count_excl_sw += chars;
        vocabulary.insert(std::move(lowered));
    }
}

void finish(CorpusStats& stats, const StringSet& vocabulary) {
    stats.vocabulary_size = static_cast<std::int64_t>(vocabulary.size());
    if (stats.text_count == 0) return;
    const auto texts = static_cast<double>(stats.text_count);
    stats.avg_text_length_incl_sw = static_cast<double>(stats.word_count_incl_sw) / texts;
    stats.avg_text_length_excl_sw = static_cast<double>(stats.word_count_excl_sw) / texts;
}

}  // namespace

CorpusStatsPair corpus_stats(const Corpus& corpus, const StringSet& stopwords) {
    CorpusStatsPair out;
    StringSet title_vocab;
    StringSet body_vocab;
    for (const Submission& s : corpus.submissions) {
        const int year = s.date().year();
        add_text(out.titles, title_vocab, s.title, year, stopwords);
        if (s.has_body_text()) add_text(out.bodies, body_vocab, *s.selftext, year, stopwords);
    }
    finish(out.titles, title_vocab);
    finish(out.bodies, body_vocab);
    return out;
}

DailyActivity aggregate_daily(const Corpus& corpus, const TickerLexicon& lexicon,
                              const std::set<std::string>& tickers,
                              const AggregationOptions& options) {
    DailyActivity out;
    out.range = corpus.range;
    const auto days = static_cast<std::size_t>(corpus.range.size());
    for (const auto& t : tickers) out.by_ticker.emplace(t, std::vector<DayActivity>(days));

    for (const Submission& s : corpus.submissions) {
        const Date day = s.date();
        if (!corpus.range.contains(day)) continue;
        const auto idx = static_cast<std::size_t>(corpus.range.index_of(day));

        std::map<std::string, std::int64_t> occurrences;
        for (const auto& m : detect_tickers(s.title, lexicon)) ++occurrences[std::string(m.symbol)];
        TransactionCounts tx = count_transaction_words(s.title, *options.words);
        if (s.has_body_text()) {
            for (const auto& m : detect_tickers(*s.selftext, lexicon)) ++occurrences[std::string(m.symbol)];
            tx += count_transaction_words(*s.selftext, *options.words);
        }
        const bool attribute =
            options.attribution == AttributionMode::AllMentioned || occurrences.size() == 1;
        for (const auto& [symbol, count] : occurrences) {
            if (!tickers.empty() && !tickers.contains(symbol)) continue;
            auto& cells = out.by_ticker.try_emplace(symbol, std::vector<DayActivity>(days)).first->second;
            cells[idx].mention_count += options.counting == MentionCounting::Occurrence ? count : 1;
            if (attribute) cells[idx].tx += tx;
        }
    }
    return out;
}

void compute_window_features(std::span<PriceSeries> series, const WindowLengths& lengths) {
    for (PriceSeries& s : series) wsb::compute_window_features(s, lengths);
}

EvaluationReport evaluate_strategy(const SummaryTable& summaries, const StrategySpec& spec,
                                   const EvaluationOptions& options) {
    spec.validate();
    EvaluationReport report;
    report.strategy = spec.name();
    report.trials = spec.kind == StrategyKind::RandomlyDistributed ? spec.trials : 1;

    struct Acc {
        std::int64_t n = 0, successes = 0;
        double sum = 0.0;
    };
    auto add = [](Acc& a, const MaybePercent& v) {
        if (!v) return;
        ++a.n;
        a.sum += *v;
        if (*v > 0) ++a.successes;
    };
    auto result = [](const Acc& a) {
        WindowResult r{a.n, a.successes, std::nullopt, std::nullopt};
        if (a.n > 0) {
            r.avg_change = a.sum / static_cast<double>(a.n);
            r.success_rate = static_cast<double>(a.successes) / static_cast<double>(a.n);
        }
        return r;
    };
    struct Cohort {
        std::int64_t days = 0;
        double mentions = 0, volatility = 0, volume = 0;
        std::array<Acc, kNumAfter> after{};
        std::array<Acc, kNumBefore> before{};
    };
    auto stats = [&](const Cohort& c) {
        CohortStats out;
        out.days = c.days;
        for (std::size_t k = 0; k < kNumAfter; ++k) out.after[k] = result(c.after[k]);
        for (std::size_t k = 0; k < kNumBefore; ++k) out.before[k] = result(c.before[k]);
        if (c.days > 0) {
            const auto d = static_cast<double>(c.days);
            out.avg_mentions = c.mentions / d;
            out.avg_volatility = c.volatility / d;
            out.avg_volume = c.volume / d;
        }
        return out;
    };

    Cohort pooled;
    for (const auto& [ticker, rows] : summaries) {
        const auto days = days_in_range(rows, spec.date_range);
        Cohort c;
        for (const auto& set : select_days(days, spec, options, ticker)) {
            for (std::size_t idx : set) {
                const DailySummary& s = days[idx];
                ++c.days;
                c.mentions += static_cast<double>(s.mention_count);
                c.volatility += s.rel_volatility;
                c.volume += static_cast<double>(s.volume);
                for (std::size_t k = 0; k < kNumAfter; ++k) add(c.after[k], s.change_after[k]);
                for (std::size_t k = 0; k < kNumBefore; ++k) add(c.before[k], s.change_before[k]);
            }
        }
        pooled.days += c.days;
        pooled.mentions += c.mentions;
        pooled.volatility += c.volatility;
        pooled.volume += c.volume;
        for (std::size_t k = 0; k < kNumAfter; ++k) {
            pooled.after[k].n += c.after[k].n;
            pooled.after[k].successes += c.after[k].successes;
            pooled.after[k].sum += c.after[k].sum;
        }
        for (std::size_t k = 0; k < kNumBefore; ++k) {
            pooled.before[k].n += c.before[k].n;
            pooled.before[k].successes += c.before[k].successes;
            pooled.before[k].sum += c.before[k].sum;
        }
        report.per_ticker.emplace(ticker, stats(c));
    }
    report.pooled = stats(pooled);

    auto dispersion = [](std::vector<double> v) {
        Dispersion d;
        d.tickers = static_cast<std::int64_t>(v.size());
        if (v.empty()) return d;
        double sum = 0.0;
        for (double x : v) sum += x;
        d.mean = sum / static_cast<double>(v.size());
        std::sort(v.begin(), v.end());
        const std::size_t mid = v.size() / 2;
        d.median = v.size() % 2 == 1 ? v[mid] : (v[mid - 1] + v[mid]) / 2.0;
        return d;
    };
    for (std::size_t w = 0; w < kNumAfter; ++w) {
        std::vector<double> avg, rate;
        for (const auto& [ticker, c] : report.per_ticker) {
            if (c.after[w].avg_change) avg.push_back(*c.after[w].avg_change);
            if (c.after[w].success_rate) rate.push_back(*c.after[w].success_rate);
        }
        report.ticker_avg_change[w] = dispersion(std::move(avg));
        report.ticker_success_rate[w] = dispersion(std::move(rate));
    }
    return report;
}

}  // namespace wsb::reference
