// OpenMP kernels against their serial references on the synthetic fixture.

#include <benchmark/benchmark.h>

#include <omp.h>

#include "synthetic.hpp"
#include "wsb/reference.hpp"

using namespace wsb;
namespace fx = wsb::testing;

namespace {

struct Fixture {
    fx::SyntheticData data;
    Corpus corpus;
    TickerLexicon lexicon;
    std::set<std::string> tickers;
    std::vector<PriceSeries> series;
    SummaryTable summaries;
    StringSet stopwords{"the", "a", "to", "and", "of", "is", "in", "it"};

    Fixture()
        : data(fx::make_synthetic({.tickers = 8, .days = 800, .submissions = 60000, .seed = 3})),
          corpus(data.corpus()),
          lexicon(data.lexicon()),
          tickers(data.symbols.begin(), data.symbols.end()),
          summaries(fx::build_summaries(data)) {
        for (const auto& [sym, bars] : data.prices) {
            PriceSeries s;
            s.ticker = sym;
            s.bars = calendar_fill(bars, DateRange{bars.front().date, bars.back().date});
            series.push_back(std::move(s));
        }
    }
};

const Fixture& fixture() {
    static const Fixture f;
    return f;
}

void threads_label(benchmark::State& state) { state.SetLabel(std::to_string(omp_get_max_threads()) + " threads"); }

void BM_CorpusStats_Parallel(benchmark::State& state) {
    const auto& f = fixture();
    for (auto _ : state) benchmark::DoNotOptimize(corpus_stats(f.corpus, f.stopwords));
    threads_label(state);
}
void BM_CorpusStats_Reference(benchmark::State& state) {
    const auto& f = fixture();
    for (auto _ : state) benchmark::DoNotOptimize(reference::corpus_stats(f.corpus, f.stopwords));
}

void BM_AggregateDaily_Parallel(benchmark::State& state) {
    const auto& f = fixture();
    for (auto _ : state) benchmark::DoNotOptimize(aggregate_daily(f.corpus, f.lexicon, f.tickers));
    threads_label(state);
}
void BM_AggregateDaily_Reference(benchmark::State& state) {
    const auto& f = fixture();
    for (auto _ : state) benchmark::DoNotOptimize(reference::aggregate_daily(f.corpus, f.lexicon, f.tickers));
}

void BM_WindowFeatures_Parallel(benchmark::State& state) {
    auto series = fixture().series;
    for (auto _ : state) {
        compute_window_features(std::span<PriceSeries>(series));
        benchmark::ClobberMemory();
    }
    threads_label(state);
}
void BM_WindowFeatures_Reference(benchmark::State& state) {
    auto series = fixture().series;
    for (auto _ : state) {
        reference::compute_window_features(std::span<PriceSeries>(series));
        benchmark::ClobberMemory();
    }
}

const StrategySpec& random_spec() {
    static const StrategySpec spec = [] {
        StrategySpec s = StrategySpec::parse("random");
        s.trials = 20;
        return s;
    }();
    return spec;
}

void BM_EvaluateRandom_Parallel(benchmark::State& state) {
    const auto& f = fixture();
    for (auto _ : state) benchmark::DoNotOptimize(evaluate_strategy(f.summaries, random_spec()));
    threads_label(state);
}
void BM_EvaluateRandom_Reference(benchmark::State& state) {
    const auto& f = fixture();
    for (auto _ : state) benchmark::DoNotOptimize(reference::evaluate_strategy(f.summaries, random_spec()));
}

}  // namespace

BENCHMARK(BM_CorpusStats_Parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CorpusStats_Reference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AggregateDaily_Parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AggregateDaily_Reference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_WindowFeatures_Parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_WindowFeatures_Reference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvaluateRandom_Parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvaluateRandom_Reference)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
