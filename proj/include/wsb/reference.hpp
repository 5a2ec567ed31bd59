#pragma once

// Single-threaded versions of the OpenMP kernels. Tests compare the two and the
// benchmark target measures the speedup; the pipeline never calls these.

#include <set>
#include <span>
#include <string>

#include "wsb/backtest.hpp"
#include "wsb/corpus.hpp"
#include "wsb/market.hpp"
#include "wsb/signals.hpp"

namespace wsb::reference {

CorpusStatsPair corpus_stats(const Corpus& corpus, const StringSet& stopwords);

DailyActivity aggregate_daily(const Corpus& corpus, const TickerLexicon& lexicon,
                              const std::set<std::string>& tickers,
                              const AggregationOptions& options = {});

void compute_window_features(std::span<PriceSeries> series, const WindowLengths& lengths = {});

EvaluationReport evaluate_strategy(const SummaryTable& summaries, const StrategySpec& spec,
                                   const EvaluationOptions& options = {});

}  // namespace wsb::reference
