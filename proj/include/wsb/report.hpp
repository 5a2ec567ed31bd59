#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wsb/backtest.hpp"
#include "wsb/corpus.hpp"
#include "wsb/lexer.hpp"
#include "wsb/market.hpp"

namespace wsb {

/// Rectangular table of preformatted cells. Every row has header.size() cells.
struct Table {
    std::string caption;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> row);
};

enum class ReportFormat { Csv, Text };

std::string_view extension(ReportFormat format);

/// CSV: header line plus rows, RFC 4180 quoting. Text: caption line, then columns padded
/// to a common width and separated by at least two spaces (first column left-aligned).
std::string render_table(const Table& table, ReportFormat format);

/// Writes `<stem>.csv` and `<stem>.txt` atomically. Throws IoError.
void write_table(const Table& table, const std::filesystem::path& stem);

// Cell formatting. Undefined values render as "NA".
std::string format_fixed2(const std::optional<double>& v);
/// Ratio in [0, 1] shown as a percentage with 2 decimals ("0.5175" -> "51.75").
std::string format_ratio_as_percent(const std::optional<double>& ratio);
/// "2.99B", "25.56M", "1.20K", "512.00".
std::string format_volume(const std::optional<double>& v);

/// Rows after 1d..3m, since 1d..1w, then average mentions, volatility and volume.
Table strategy_table(const EvaluationReport& report);
/// Same cells as strategy_table() in the requested format.
std::string render_report(const EvaluationReport& report, ReportFormat format);

// Builders for the article-style tables.

Table corpus_table(const CorpusStatsPair& stats);

/// One column per window label; rows sorted by total count, "unknown" last.
Table sector_table(const PortfolioSelection& selection, std::span<const std::string> window_labels,
                   const TickerLexicon& lexicon);

/// 1-year and 3-year close-to-close change ending at `as_of` per ticker, with mean and median.
Table portfolio_table(std::span<const std::string> tickers, const TickerLexicon& lexicon,
                      const std::map<std::string, PriceSeries>& prices, Date as_of);

struct CohortReports {
    const EvaluationReport* all = nullptr;
    const EvaluationReport* mentions = nullptr;
    const EvaluationReport* buy = nullptr;
    const EvaluationReport* sell = nullptr;
    const EvaluationReport* equal = nullptr;
    const EvaluationReport* random = nullptr;
    std::array<const EvaluationReport*, kNumBefore> reactive{};
    std::array<const EvaluationReport*, kNumBefore> proactive{};
};

/// Benchmark (AllDays over the benchmark series) against the portfolio cohorts.
Table table4_overview(const EvaluationReport& benchmark, std::string_view benchmark_label,
                      const CohortReports& r);
/// Success rates, averaged over tickers.
Table table5_success(const CohortReports& r);
Table table6_patterns(const CohortReports& r);
/// Average vs buy-signal change per ticker.
Table table7_tickers(const CohortReports& r, std::span<const std::string> tickers);
Table table8_reactive(const CohortReports& r);
Table table9_phases(const CohortReports& full, const CohortReports& pre_hype);
Table table10_phases(const CohortReports& full, const CohortReports& pre_hype);

}  // namespace wsb
