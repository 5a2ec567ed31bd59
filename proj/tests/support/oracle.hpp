#pragma once

// Brute-force recomputation of evaluation results straight from raw submissions and
// trading-day bars. Shares no tokenizer, fill, feature or selection code with the library;
// only the seeded random index sets come from wsb::random_days.

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "wsb/backtest.hpp"
#include "wsb/corpus.hpp"
#include "wsb/market.hpp"

namespace wsb::oracle {

struct Input {
    std::vector<Submission> submissions;  // unfiltered
    DateRange range;
    std::set<std::string> listed;     // known stock and ETF symbols
    std::set<std::string> stopwords;  // ticker stop list, uppercase
    std::vector<std::string> tickers;
    std::map<std::string, std::vector<PriceBar>> prices;  // trading days only
    long long min_score = 1;
    std::array<int, 5> windows{1, 3, 7, 30, 90};
    int moving_average = 30;
};

struct Day {
    Date date;
    long long mentions = 0;
    long long buy = 0;
    long long sell = 0;
    bool trading = false;
    double volume = 0.0;
    double volatility = 0.0;
    std::array<std::optional<double>, 3> before{};
    std::array<std::optional<double>, 5> after{};
    std::array<std::optional<double>, 3> ma{};
};

using Days = std::map<std::string, std::vector<Day>>;

Days build_days(const Input& in);

EvaluationReport evaluate(const Days& days, const StrategySpec& spec, bool trading_days_only);

}  // namespace wsb::oracle
