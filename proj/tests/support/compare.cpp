#include "compare.hpp"

#include <cmath>

namespace wsb::testing {

namespace {

constexpr double kAbsoluteFloor = 1e-12;

void check(std::vector<std::string>& out, const std::string& where, const std::optional<double>& a,
           const std::optional<double>& b, double rel) {
    if (a.has_value() != b.has_value()) {
        out.push_back(where + ": defined in one report only");
    } else if (a && !close_rel(*a, *b, rel)) {
        out.push_back(where + ": " + std::to_string(*a) + " vs " + std::to_string(*b));
    }
}

void check_count(std::vector<std::string>& out, const std::string& where, long long a, long long b) {
    if (a != b) out.push_back(where + ": " + std::to_string(a) + " vs " + std::to_string(b));
}

void compare_cohort(std::vector<std::string>& out, const std::string& where, const CohortStats& a,
                    const CohortStats& b, double rel) {
    check_count(out, where + ".days", a.days, b.days);
    for (std::size_t k = 0; k < kNumAfter; ++k) {
        const std::string w = where + ".after[" + std::string(horizon_tag(kAfterHorizons[k])) + "]";
        check_count(out, w + ".n", a.after[k].n, b.after[k].n);
        check_count(out, w + ".successes", a.after[k].successes, b.after[k].successes);
        check(out, w + ".avg_change", a.after[k].avg_change, b.after[k].avg_change, rel);
        check(out, w + ".success_rate", a.after[k].success_rate, b.after[k].success_rate, rel);
    }
    for (std::size_t k = 0; k < kNumBefore; ++k) {
        const std::string w = where + ".before[" + std::string(horizon_tag(kBeforeHorizons[k])) + "]";
        check_count(out, w + ".n", a.before[k].n, b.before[k].n);
        check(out, w + ".avg_change", a.before[k].avg_change, b.before[k].avg_change, rel);
    }
    check(out, where + ".avg_mentions", a.avg_mentions, b.avg_mentions, rel);
    check(out, where + ".avg_volatility", a.avg_volatility, b.avg_volatility, rel);
    check(out, where + ".avg_volume", a.avg_volume, b.avg_volume, rel);
}

}  // namespace

bool close_rel(double a, double b, double rel) {
    const double scale = std::max(std::fabs(a), std::fabs(b));
    return std::fabs(a - b) <= std::max(rel * scale, kAbsoluteFloor);
}

std::vector<std::string> report_differences(const EvaluationReport& a, const EvaluationReport& b, double rel) {
    std::vector<std::string> out;
    if (a.strategy != b.strategy) out.push_back("strategy: " + a.strategy + " vs " + b.strategy);
    compare_cohort(out, a.strategy + ".pooled", a.pooled, b.pooled, rel);
    if (a.per_ticker.size() != b.per_ticker.size()) out.push_back("per_ticker sizes differ");
    for (const auto& [ticker, stats] : a.per_ticker) {
        auto it = b.per_ticker.find(ticker);
        if (it == b.per_ticker.end()) {
            out.push_back(ticker + " missing");
            continue;
        }
        compare_cohort(out, a.strategy + "." + ticker, stats, it->second, rel);
    }
    for (std::size_t k = 0; k < kNumAfter; ++k) {
        const std::string w = a.strategy + ".tickers[" + std::string(horizon_tag(kAfterHorizons[k])) + "]";
        check_count(out, w + ".avg.tickers", a.ticker_avg_change[k].tickers, b.ticker_avg_change[k].tickers);
        check(out, w + ".avg.mean", a.ticker_avg_change[k].mean, b.ticker_avg_change[k].mean, rel);
        check(out, w + ".avg.median", a.ticker_avg_change[k].median, b.ticker_avg_change[k].median, rel);
        check(out, w + ".rate.mean", a.ticker_success_rate[k].mean, b.ticker_success_rate[k].mean, rel);
        check(out, w + ".rate.median", a.ticker_success_rate[k].median, b.ticker_success_rate[k].median, rel);
    }
    return out;
}

std::vector<std::string> summary_differences(const SummaryTable& a, const SummaryTable& b, double rel) {
    std::vector<std::string> out;
    if (a.size() != b.size()) out.push_back("ticker counts differ");
    for (const auto& [ticker, rows] : a) {
        auto it = b.find(ticker);
        if (it == b.end() || it->second.size() != rows.size()) {
            out.push_back(ticker + ": missing or different length");
            continue;
        }
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const DailySummary& x = rows[i];
            const DailySummary& y = it->second[i];
            const std::string w = ticker + " " + x.date.to_string();
            if (x.date != y.date || x.mention_count != y.mention_count || !(x.tx == y.tx) || x.signal != y.signal ||
                x.is_trading_day != y.is_trading_day || x.volume != y.volume) {
                out.push_back(w + ": counts differ");
            }
            check(out, w + " close", x.close, y.close, rel);
            check(out, w + " volatility", x.rel_volatility, y.rel_volatility, rel);
            for (std::size_t k = 0; k < kNumBefore; ++k) {
                check(out, w + " before", x.change_before[k], y.change_before[k], rel);
                check(out, w + " ma", x.ma_of_change[k], y.ma_of_change[k], rel);
            }
            for (std::size_t k = 0; k < kNumAfter; ++k) check(out, w + " after", x.change_after[k], y.change_after[k], rel);
        }
    }
    return out;
}

}  // namespace wsb::testing
