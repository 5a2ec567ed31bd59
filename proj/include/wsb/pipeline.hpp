#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "wsb/archive.hpp"
#include "wsb/backtest.hpp"
#include "wsb/date.hpp"
#include "wsb/market.hpp"
#include "wsb/signals.hpp"

namespace wsb {

struct PipelineConfig {
    std::vector<std::filesystem::path> corpus;
    std::filesystem::path ticker_table;
    std::filesystem::path etf_list;
    std::filesystem::path ticker_stopwords;
    std::filesystem::path stopwords;
    std::filesystem::path price_dir;  // <SYMBOL>.csv per ticker
    std::filesystem::path output_dir;

    DateRange date_range;
    std::optional<DateRange> pre_hype_range;
    std::int64_t min_score = 1;
    bool drop_deleted = true;

    int portfolio_k = 100;
    std::vector<DateRange> portfolio_windows;  // defaults to calendar years of date_range
    std::vector<std::string> tickers;          // replaces the top-K intersection when non-empty

    std::string benchmark_symbol = "SPY";
    std::string benchmark_label = "S&P500";

    std::vector<StrategySpec> strategies;
    std::uint64_t seed = 42;
    int trials = 5;
    WindowLengths windows;

    AttributionMode attribution = AttributionMode::AllMentioned;
    MentionCounting mention_counting = MentionCounting::Occurrence;
    bool trading_days_only = false;

    std::optional<ArchiveClientConfig> archive;
    std::filesystem::path archive_output;
    std::optional<DateRange> archive_range;  // defaults to date_range
};

/// Relative paths resolve against `base_dir`. Collects every problem and throws one
/// ConfigError listing them by field.
PipelineConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);
PipelineConfig load_config(const std::filesystem::path& path);

struct ConfigOverrides {
    std::optional<DateRange> range;
    std::optional<std::uint64_t> seed;
    std::optional<std::filesystem::path> output_dir;
};

/// Applies command-line overrides, then re-checks the invariants. Throws ConfigError.
void apply_overrides(PipelineConfig& config, const ConfigOverrides& overrides);

/// Checks that every referenced input path exists. Throws ConfigError.
void check_paths(const PipelineConfig& config);

/// Strategies evaluated by the backtest stage when none are configured.
std::vector<StrategySpec> default_strategies();

enum class Stage { Fetch, Ingest, Aggregate, Backtest, Report, All };

std::optional<Stage> parse_stage(std::string_view name);
std::string_view stage_name(Stage stage);

inline constexpr int kExitOk = 0;
inline constexpr int kExitStageFailure = 1;
inline constexpr int kExitConfigError = 2;

/// Runs `stage` and everything it depends on. Outputs of the whole run are written only
/// after every stage succeeded. Returns an exit code; messages go to `log`.
int run_pipeline(const PipelineConfig& config, Stage stage, std::ostream& log);

}  // namespace wsb
