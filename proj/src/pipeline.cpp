#include "wsb/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "wsb/corpus.hpp"
#include "wsb/error.hpp"
#include "wsb/hash.hpp"
#include "wsb/lexer.hpp"
#include "wsb/report.hpp"
#include "wsb/text_io.hpp"

namespace wsb {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Config parsing

namespace {

class FieldErrors {
public:
    void add(std::string field, std::string message) { items_.push_back(std::move(field) + ": " + message); }
    bool empty() const { return items_.empty(); }
    [[noreturn]] void raise() const {
        std::string msg = "invalid configuration";
        for (const auto& item : items_) msg += "\n  " + item;
        throw ConfigError(msg);
    }

private:
    std::vector<std::string> items_;
};

class Reader {
public:
    Reader(const fs::path& base, FieldErrors& errors) : base_(base), errors_(errors) {}

    void unknown_keys(const json& obj, std::string_view prefix, std::initializer_list<std::string_view> known) {
        for (const auto& [key, value] : obj.items()) {
            if (std::find(known.begin(), known.end(), key) == known.end()) {
                errors_.add(join(prefix, key), "unknown field");
            }
        }
    }

    const json* object(const json& parent, std::string_view prefix, const char* key) {
        auto it = parent.find(key);
        if (it == parent.end()) return nullptr;
        if (!it->is_object()) {
            errors_.add(join(prefix, key), "expected an object");
            return nullptr;
        }
        return &*it;
    }

    std::optional<std::string> string(const json& parent, std::string_view prefix, const char* key,
                                      bool required = false) {
        auto it = parent.find(key);
        if (it == parent.end()) {
            if (required) errors_.add(join(prefix, key), "required");
            return std::nullopt;
        }
        if (!it->is_string()) {
            errors_.add(join(prefix, key), "expected a string");
            return std::nullopt;
        }
        return it->get<std::string>();
    }

    std::optional<fs::path> path(const json& parent, std::string_view prefix, const char* key,
                                 bool required = false) {
        auto s = string(parent, prefix, key, required);
        if (!s) return std::nullopt;
        if (s->empty()) {
            errors_.add(join(prefix, key), "empty path");
            return std::nullopt;
        }
        return resolve(*s);
    }

    fs::path resolve(const std::string& s) const {
        fs::path p(s);
        return p.is_absolute() ? p : base_ / p;
    }

    std::optional<std::int64_t> integer(const json& parent, std::string_view prefix, const char* key,
                                        std::int64_t min_value) {
        auto it = parent.find(key);
        if (it == parent.end()) return std::nullopt;
        if (!it->is_number_integer()) {
            errors_.add(join(prefix, key), "expected an integer");
            return std::nullopt;
        }
        const auto v = it->get<std::int64_t>();
        if (v < min_value) {
            errors_.add(join(prefix, key), "must be >= " + std::to_string(min_value));
            return std::nullopt;
        }
        return v;
    }

    std::optional<double> number(const json& parent, std::string_view prefix, const char* key) {
        auto it = parent.find(key);
        if (it == parent.end()) return std::nullopt;
        if (!it->is_number()) {
            errors_.add(join(prefix, key), "expected a number");
            return std::nullopt;
        }
        return it->get<double>();
    }

    std::optional<bool> boolean(const json& parent, std::string_view prefix, const char* key) {
        auto it = parent.find(key);
        if (it == parent.end()) return std::nullopt;
        if (!it->is_boolean()) {
            errors_.add(join(prefix, key), "expected true or false");
            return std::nullopt;
        }
        return it->get<bool>();
    }

    std::optional<DateRange> range(const json& parent, std::string_view prefix, const char* key,
                                   bool required = false) {
        auto s = string(parent, prefix, key, required);
        if (!s) return std::nullopt;
        return range_value(*s, join(prefix, key));
    }

    std::optional<DateRange> range_value(const std::string& s, const std::string& field) {
        try {
            DateRange r = DateRange::parse(s);
            if (r.empty()) {
                errors_.add(field, "range end precedes its start");
                return std::nullopt;
            }
            return r;
        } catch (const std::exception& e) {
            errors_.add(field, e.what());
            return std::nullopt;
        }
    }

    static std::string join(std::string_view prefix, std::string_view key) {
        return prefix.empty() ? std::string(key) : std::string(prefix) + "." + std::string(key);
    }

    FieldErrors& errors() { return errors_; }

private:
    fs::path base_;
    FieldErrors& errors_;
};

void parse_strategy(const json& item, const std::string& field, PipelineConfig& cfg, Reader& r,
                    std::vector<StrategySpec>& out) {
    try {
        if (item.is_string()) {
            StrategySpec spec = StrategySpec::parse(item.get<std::string>());
            spec.seed = cfg.seed;
            spec.trials = cfg.trials;
            out.push_back(spec);
            return;
        }
        if (!item.is_object()) {
            r.errors().add(field, "expected a strategy name or object");
            return;
        }
        r.unknown_keys(item, field, {"kind", "seed", "trials", "range"});
        auto kind = r.string(item, field, "kind", true);
        if (!kind) return;
        StrategySpec spec = StrategySpec::parse(*kind);
        spec.seed = cfg.seed;
        spec.trials = cfg.trials;
        if (auto seed = r.integer(item, field, "seed", 0)) spec.seed = static_cast<std::uint64_t>(*seed);
        if (auto trials = r.integer(item, field, "trials", 1)) spec.trials = static_cast<int>(*trials);
        if (item.contains("range")) spec.date_range = r.range(item, field, "range");
        spec.validate();
        out.push_back(spec);
    } catch (const ArgumentError& e) {
        r.errors().add(field, e.what());
    }
}

void check_invariants(const PipelineConfig& cfg, FieldErrors& errors) {
    if (cfg.date_range.empty()) errors.add("date_range", "required");
    if (cfg.pre_hype_range && !cfg.date_range.contains(*cfg.pre_hype_range)) {
        errors.add("pre_hype_range", "must lie inside date_range " + cfg.date_range.to_string());
    }
    for (const auto& spec : cfg.strategies) {
        if (spec.date_range && !cfg.date_range.contains(*spec.date_range)) {
            errors.add("strategies", spec.name() + " range must lie inside date_range");
        }
    }
}

std::vector<DateRange> year_windows(const DateRange& range) {
    std::vector<DateRange> out;
    for (int y = range.first.year(); y <= range.last.year(); ++y) {
        out.push_back(intersect(DateRange{Date::from_ymd(y, 1, 1), Date::from_ymd(y, 12, 31)}, range));
    }
    return out;
}

}  // namespace

std::vector<StrategySpec> default_strategies() {
    std::vector<StrategySpec> out;
    for (const char* name : {"all", "mentions", "buy", "sell", "equal", "random", "reactive_1d", "reactive_3d",
                             "reactive_1w", "proactive_1d", "proactive_3d", "proactive_1w", "ma_any", "ma_all"}) {
        out.push_back(StrategySpec::parse(name));
    }
    return out;
}

PipelineConfig parse_config(const json& doc, const fs::path& base_dir) {
    FieldErrors errors;
    if (!doc.is_object()) {
        errors.add("<root>", "expected a JSON object");
        errors.raise();
    }
    Reader r(base_dir, errors);
    PipelineConfig cfg;
    r.unknown_keys(doc, "", {"paths", "date_range", "pre_hype_range", "min_score", "drop_deleted", "portfolio",
                             "benchmark", "strategies", "seed", "trials", "windows", "toggles", "archive"});

    if (const json* paths = r.object(doc, "", "paths")) {
        r.unknown_keys(*paths, "paths", {"corpus", "ticker_table", "etf_list", "ticker_stopwords", "stopwords",
                                         "price_dir", "output_dir"});
        if (auto it = paths->find("corpus"); it != paths->end()) {
            if (it->is_string()) {
                cfg.corpus.push_back(r.resolve(it->get<std::string>()));
            } else if (it->is_array()) {
                for (const auto& p : *it) {
                    if (p.is_string()) {
                        cfg.corpus.push_back(r.resolve(p.get<std::string>()));
                    } else {
                        errors.add("paths.corpus", "expected an array of strings");
                    }
                }
            } else {
                errors.add("paths.corpus", "expected a path or an array of paths");
            }
            if (cfg.corpus.empty()) errors.add("paths.corpus", "no corpus files given");
        } else {
            errors.add("paths.corpus", "required");
        }
        if (auto p = r.path(*paths, "paths", "ticker_table", true)) cfg.ticker_table = *p;
        if (auto p = r.path(*paths, "paths", "etf_list")) cfg.etf_list = *p;
        if (auto p = r.path(*paths, "paths", "ticker_stopwords")) cfg.ticker_stopwords = *p;
        if (auto p = r.path(*paths, "paths", "stopwords")) cfg.stopwords = *p;
        if (auto p = r.path(*paths, "paths", "price_dir", true)) cfg.price_dir = *p;
        if (auto p = r.path(*paths, "paths", "output_dir", true)) cfg.output_dir = *p;
    } else {
        errors.add("paths", "required");
    }

    if (auto range = r.range(doc, "", "date_range", true)) cfg.date_range = *range;
    if (doc.contains("pre_hype_range")) cfg.pre_hype_range = r.range(doc, "", "pre_hype_range");
    if (auto v = r.integer(doc, "", "min_score", std::numeric_limits<std::int64_t>::min())) cfg.min_score = *v;
    if (auto v = r.boolean(doc, "", "drop_deleted")) cfg.drop_deleted = *v;
    if (auto v = r.integer(doc, "", "seed", 0)) cfg.seed = static_cast<std::uint64_t>(*v);
    if (auto v = r.integer(doc, "", "trials", 1)) cfg.trials = static_cast<int>(*v);

    if (const json* p = r.object(doc, "", "portfolio")) {
        r.unknown_keys(*p, "portfolio", {"k", "windows", "tickers"});
        if (auto v = r.integer(*p, "portfolio", "k", 1)) cfg.portfolio_k = static_cast<int>(*v);
        if (auto it = p->find("windows"); it != p->end()) {
            if (!it->is_array() || it->empty()) {
                errors.add("portfolio.windows", "expected a non-empty array of ranges");
            } else {
                for (std::size_t i = 0; i < it->size(); ++i) {
                    const std::string field = "portfolio.windows[" + std::to_string(i) + "]";
                    if (!(*it)[i].is_string()) {
                        errors.add(field, "expected a range string");
                    } else if (auto w = r.range_value((*it)[i].get<std::string>(), field)) {
                        cfg.portfolio_windows.push_back(*w);
                    }
                }
            }
        }
        if (auto it = p->find("tickers"); it != p->end()) {
            if (!it->is_array()) {
                errors.add("portfolio.tickers", "expected an array of symbols");
            } else {
                for (const auto& t : *it) {
                    if (!t.is_string() || !is_valid_symbol(to_upper_ascii(t.get<std::string>()))) {
                        errors.add("portfolio.tickers", "invalid symbol " + t.dump());
                    } else {
                        cfg.tickers.push_back(to_upper_ascii(t.get<std::string>()));
                    }
                }
                std::sort(cfg.tickers.begin(), cfg.tickers.end());
                cfg.tickers.erase(std::unique(cfg.tickers.begin(), cfg.tickers.end()), cfg.tickers.end());
            }
        }
    }

    if (const json* b = r.object(doc, "", "benchmark")) {
        r.unknown_keys(*b, "benchmark", {"symbol", "label"});
        if (auto s = r.string(*b, "benchmark", "symbol")) {
            if (!is_valid_symbol(to_upper_ascii(*s))) {
                errors.add("benchmark.symbol", "invalid symbol '" + *s + "'");
            } else {
                cfg.benchmark_symbol = to_upper_ascii(*s);
            }
        }
        if (auto s = r.string(*b, "benchmark", "label")) cfg.benchmark_label = *s;
    }

    if (const json* w = r.object(doc, "", "windows")) {
        r.unknown_keys(*w, "windows", {"week", "month", "quarter", "moving_average"});
        if (auto v = r.integer(*w, "windows", "week", 1)) cfg.windows.week1 = static_cast<int>(*v);
        if (auto v = r.integer(*w, "windows", "month", 1)) cfg.windows.month1 = static_cast<int>(*v);
        if (auto v = r.integer(*w, "windows", "quarter", 1)) cfg.windows.month3 = static_cast<int>(*v);
        if (auto v = r.integer(*w, "windows", "moving_average", 1)) cfg.windows.moving_average = static_cast<int>(*v);
    }

    if (const json* t = r.object(doc, "", "toggles")) {
        r.unknown_keys(*t, "toggles", {"attribution", "trading_days_only", "mention_counting"});
        if (auto s = r.string(*t, "toggles", "attribution")) {
            if (*s == "all_mentioned") {
                cfg.attribution = AttributionMode::AllMentioned;
            } else if (*s == "single_ticker") {
                cfg.attribution = AttributionMode::SingleTicker;
            } else {
                errors.add("toggles.attribution", "expected all_mentioned or single_ticker");
            }
        }
        if (auto s = r.string(*t, "toggles", "mention_counting")) {
            if (*s == "occurrence") {
                cfg.mention_counting = MentionCounting::Occurrence;
            } else if (*s == "submission") {
                cfg.mention_counting = MentionCounting::Submission;
            } else {
                errors.add("toggles.mention_counting", "expected occurrence or submission");
            }
        }
        if (auto v = r.boolean(*t, "toggles", "trading_days_only")) cfg.trading_days_only = *v;
    }

    if (auto it = doc.find("strategies"); it != doc.end()) {
        if (!it->is_array()) {
            errors.add("strategies", "expected an array");
        } else {
            for (std::size_t i = 0; i < it->size(); ++i) {
                parse_strategy((*it)[i], "strategies[" + std::to_string(i) + "]", cfg, r, cfg.strategies);
            }
        }
    } else {
        cfg.strategies = default_strategies();
        for (auto& s : cfg.strategies) {
            s.seed = cfg.seed;
            s.trials = cfg.trials;
        }
    }
    std::set<std::string> names;
    for (const auto& s : cfg.strategies) {
        if (!names.insert(s.name()).second) errors.add("strategies", "duplicate strategy " + s.name());
    }

    if (const json* a = r.object(doc, "", "archive")) {
        r.unknown_keys(*a, "archive", {"endpoint", "subreddit", "page_size", "rate_limit", "max_attempts",
                                       "output", "range"});
        ArchiveClientConfig ac;
        if (auto s = r.string(*a, "archive", "endpoint")) ac.endpoint = *s;
        if (auto s = r.string(*a, "archive", "subreddit")) ac.subreddit = *s;
        if (auto v = r.integer(*a, "archive", "page_size", 1)) ac.page_size = static_cast<int>(*v);
        if (auto v = r.integer(*a, "archive", "max_attempts", 1)) ac.max_attempts = static_cast<int>(*v);
        if (auto v = r.number(*a, "archive", "rate_limit")) {
            if (*v <= 0) {
                errors.add("archive.rate_limit", "must be > 0 requests per second");
            } else {
                ac.rate_limit = *v;
            }
        }
        if (auto p = r.path(*a, "archive", "output", true)) cfg.archive_output = *p;
        if (a->contains("range")) cfg.archive_range = r.range(*a, "archive", "range");
        cfg.archive = ac;
    }

    if (cfg.portfolio_windows.empty() && !cfg.date_range.empty()) cfg.portfolio_windows = year_windows(cfg.date_range);
    check_invariants(cfg, errors);
    if (!errors.empty()) errors.raise();
    return cfg;
}

PipelineConfig load_config(const fs::path& path) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const IoError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path.string() + ": malformed JSON at byte " + std::to_string(e.byte));
    }
    return parse_config(doc, path.parent_path());
}

void apply_overrides(PipelineConfig& config, const ConfigOverrides& overrides) {
    FieldErrors errors;
    if (overrides.range) {
        if (overrides.range->empty()) errors.add("--range", "range end precedes its start");
        config.date_range = *overrides.range;
        if (config.pre_hype_range) {
            const DateRange clipped = intersect(*config.pre_hype_range, config.date_range);
            config.pre_hype_range = clipped.empty() ? std::nullopt : std::optional<DateRange>(clipped);
        }
        config.portfolio_windows = year_windows(config.date_range);
    }
    if (overrides.seed) {
        config.seed = *overrides.seed;
        for (auto& s : config.strategies) s.seed = *overrides.seed;
    }
    if (overrides.output_dir) config.output_dir = *overrides.output_dir;
    check_invariants(config, errors);
    if (!errors.empty()) errors.raise();
}

void check_paths(const PipelineConfig& config) {
    FieldErrors errors;
    auto need_file = [&](const fs::path& p, const std::string& field) {
        if (!p.empty() && !fs::is_regular_file(p)) errors.add(field, "no such file " + p.string());
    };
    for (const auto& p : config.corpus) need_file(p, "paths.corpus");
    need_file(config.ticker_table, "paths.ticker_table");
    need_file(config.etf_list, "paths.etf_list");
    need_file(config.ticker_stopwords, "paths.ticker_stopwords");
    need_file(config.stopwords, "paths.stopwords");
    if (!fs::is_directory(config.price_dir)) {
        errors.add("paths.price_dir", "no such directory " + config.price_dir.string());
    }
    if (!errors.empty()) errors.raise();
}

std::optional<Stage> parse_stage(std::string_view name) {
    for (Stage s : {Stage::Fetch, Stage::Ingest, Stage::Aggregate, Stage::Backtest, Stage::Report, Stage::All}) {
        if (stage_name(s) == name) return s;
    }
    return std::nullopt;
}

std::string_view stage_name(Stage stage) {
    switch (stage) {
        case Stage::Fetch: return "fetch";
        case Stage::Ingest: return "ingest";
        case Stage::Aggregate: return "aggregate";
        case Stage::Backtest: return "backtest";
        case Stage::Report: return "report";
        case Stage::All: return "all";
    }
    return "";
}

// ---------------------------------------------------------------------------
// Stages

namespace {

/// Files produced by the run; written together once every stage succeeded.
class PendingWrites {
public:
    void add(fs::path path, std::string contents) { files_.emplace_back(std::move(path), std::move(contents)); }
    void add_table(const Table& table, const fs::path& stem) {
        for (ReportFormat f : {ReportFormat::Csv, ReportFormat::Text}) {
            fs::path p = stem;
            p += std::string(extension(f));
            add(p, render_table(table, f));
        }
    }
    void commit() const {
        for (const auto& [path, contents] : files_) write_file_atomic(path, contents);
    }
    std::size_t size() const { return files_.size(); }

private:
    std::vector<std::pair<fs::path, std::string>> files_;
};

struct Paths {
    fs::path out;
    fs::path summaries() const { return out / "daily_summaries.csv"; }
    fs::path benchmark() const { return out / "benchmark_summaries.csv"; }
    fs::path ranking() const { return out / "portfolio_ranking.csv"; }
    fs::path portfolio() const { return out / "portfolio_tickers.txt"; }
    fs::path engagement() const { return out / "engagement.csv"; }
    fs::path key() const { return out / "daily_summaries.key"; }
    fs::path tables() const { return out / "tables"; }
    fs::path strategies() const { return out / "strategies"; }
};

struct RunState {
    TickerLexicon lexicon;
    PortfolioSelection selection;
    std::vector<std::string> portfolio;
    SummaryTable summaries;
    SummaryTable benchmark;
    std::map<std::string, PriceSeries> prices;
};

std::string price_file_name(const std::string& ticker) { return ticker + ".csv"; }

TickerLexicon load_configured_lexicon(const PipelineConfig& cfg) {
    auto open = [](const fs::path& p) -> std::string { return p.empty() ? std::string() : read_file(p); };
    std::istringstream table(open(cfg.ticker_table));
    std::istringstream etfs(open(cfg.etf_list));
    std::istringstream stop(open(cfg.ticker_stopwords));
    return load_lexicon(table, etfs, stop);
}

std::string ingest_key(const PipelineConfig& cfg) {
    Fnv1a h;
    h.update("wsb-ingest-v1\n");
    json subset = {
        {"date_range", cfg.date_range.to_string()},
        {"min_score", cfg.min_score},
        {"drop_deleted", cfg.drop_deleted},
        {"k", cfg.portfolio_k},
        {"tickers", cfg.tickers},
        {"benchmark", cfg.benchmark_symbol},
        {"windows", {cfg.windows.day1, cfg.windows.day3, cfg.windows.week1, cfg.windows.month1,
                     cfg.windows.month3, cfg.windows.moving_average}},
        {"attribution", static_cast<int>(cfg.attribution)},
        {"counting", static_cast<int>(cfg.mention_counting)},
    };
    json windows = json::array();
    for (const auto& w : cfg.portfolio_windows) windows.push_back(w.to_string());
    subset["portfolio_windows"] = windows;
    h.update(subset.dump()).update("\n");

    auto add_file = [&](const fs::path& p) {
        if (p.empty()) return;
        const std::string contents = read_file(p);
        h.update(p.filename().string()).update("\n");
        h.update(std::to_string(contents.size())).update("\n");
        h.update(contents);
    };
    for (const auto& p : cfg.corpus) add_file(p);
    add_file(cfg.ticker_table);
    add_file(cfg.etf_list);
    add_file(cfg.ticker_stopwords);
    add_file(cfg.stopwords);
    std::vector<fs::path> prices;
    for (const auto& entry : fs::directory_iterator(cfg.price_dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".csv") prices.push_back(entry.path());
    }
    std::sort(prices.begin(), prices.end());
    for (const auto& p : prices) add_file(p);
    return h.hex();
}

PriceSeries load_series(const PipelineConfig& cfg, const std::string& ticker) {
    const fs::path path = cfg.price_dir / price_file_name(ticker);
    if (!fs::is_regular_file(path)) {
        throw IoError("no price data for ticker " + ticker + " (expected " + path.string() + ")");
    }
    try {
        return build_price_series(ticker, load_price_series(path, ticker), cfg.windows);
    } catch (const CoverageError& e) {
        throw CoverageError("ticker " + ticker + ": " + e.what(), e.missing_dates());
    } catch (const FormatError& e) {
        throw FormatError("ticker " + ticker + ": " + e.what(), e.line());
    }
}

std::string render_summaries(const SummaryTable& table) {
    std::ostringstream out;
    write_summaries_csv(out, table);
    return out.str();
}

SummaryTable read_summaries_file(const fs::path& path) {
    std::istringstream in(read_file(path));
    return read_summaries_csv(in);
}

std::string render_ranking(const PortfolioSelection& sel) {
    std::string out = "window,rank,symbol,mentions\n";
    for (std::size_t w = 0; w < sel.top.size(); ++w) {
        for (std::size_t i = 0; i < sel.top[w].size(); ++i) {
            const auto& r = sel.top[w][i];
            out += sel.windows[w].to_string() + "," + std::to_string(i + 1) + "," + r.symbol + "," +
                   std::to_string(r.mentions) + "\n";
        }
    }
    return out;
}

PortfolioSelection read_ranking(const fs::path& path, const std::vector<DateRange>& windows) {
    PortfolioSelection sel;
    sel.windows = windows;
    sel.top.resize(windows.size());
    std::istringstream in(read_file(path));
    std::string line;
    std::getline(in, line);
    std::map<std::string, int> appearances;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto cells = split_csv_line(line);
        if (cells.size() != 4) throw FormatError("malformed ranking row '" + line + "'", 0);
        const DateRange w = DateRange::parse(cells[0]);
        auto it = std::find(windows.begin(), windows.end(), w);
        if (it == windows.end()) throw FormatError("ranking window " + cells[0] + " not configured", 0);
        sel.top[static_cast<std::size_t>(it - windows.begin())].push_back({cells[2], parse_int(cells[3])});
        ++appearances[cells[2]];
    }
    for (const auto& [symbol, n] : appearances) {
        if (n == static_cast<int>(windows.size())) sel.intersection.push_back(symbol);
    }
    return sel;
}

std::string render_engagement(const EngagementProfile& p) {
    std::string out = "kind,key,count,ratio\n";
    out += "submissions,tagged," + std::to_string(p.tagged_count) + ",NA\n";
    out += "submissions,untagged," + std::to_string(p.untagged_count) + ",NA\n";
    for (const auto& [flair, count] : p.flair_count) {
        out += "flair," + csv_escape(flair) + "," + std::to_string(count) + "," +
               format_double_exact(p.flair_ratio.at(flair)) + "\n";
    }
    for (int h = 0; h < 24; ++h) {
        out += "weekday_hour," + std::to_string(h) + "," + std::to_string(p.weekday_hours[static_cast<std::size_t>(h)]) + ",NA\n";
    }
    for (int h = 0; h < 24; ++h) {
        out += "weekend_hour," + std::to_string(h) + "," + std::to_string(p.weekend_hours[static_cast<std::size_t>(h)]) + ",NA\n";
    }
    return out;
}

void run_fetch(const PipelineConfig& cfg, PendingWrites& pending, std::ostream& log) {
    if (!cfg.archive) throw ConfigError("invalid configuration\n  archive: required for the fetch stage");
    ArchiveClientConfig ac = *cfg.archive;
    ac.apply_env_overrides();
    if (ac.endpoint.empty()) throw ConfigError("invalid configuration\n  archive.endpoint: required (or WSB_ARCHIVE_URL)");
    const DateRange range = cfg.archive_range.value_or(cfg.date_range);
    std::string jsonl;
    const CrawlSummary summary = crawl_archive(ac, range.first_second(), range.last_second(), make_http_fetcher(ac),
                                               [&](const json& record) { jsonl += record.dump() + "\n"; });
    log << "fetch: " << summary.records << " records in " << summary.requests << " pages ("
        << summary.failed_attempts << " failed attempts)\n";
    pending.add(cfg.archive_output, std::move(jsonl));
}

void run_ingest(const PipelineConfig& cfg, const Paths& paths, RunState& state, PendingWrites& pending,
                std::ostream& log) {
    state.lexicon = load_configured_lexicon(cfg);
    const std::string key = ingest_key(cfg);

    const bool cached = fs::is_regular_file(paths.key()) && trim(read_file(paths.key())) == key &&
                        fs::is_regular_file(paths.summaries()) && fs::is_regular_file(paths.benchmark()) &&
                        fs::is_regular_file(paths.ranking()) && fs::is_regular_file(paths.portfolio());
    if (cached) {
        log << "ingest: inputs unchanged, reusing " << paths.summaries().string() << "\n";
        state.summaries = read_summaries_file(paths.summaries());
        state.benchmark = read_summaries_file(paths.benchmark());
        state.selection = read_ranking(paths.ranking(), cfg.portfolio_windows);
        state.portfolio = read_word_list(paths.portfolio());
        return;
    }

    IngestLog ingest_log;
    std::vector<Submission> records = read_submissions(cfg.corpus, &ingest_log);
    log << "ingest: " << ingest_log.lines << " lines, " << ingest_log.rejected << " rejected\n";
    const Corpus corpus = filter_corpus(std::move(records), {cfg.min_score, cfg.drop_deleted, cfg.date_range});
    log << "ingest: " << corpus.submissions.size() << " submissions in " << cfg.date_range.to_string() << "\n";

    const StringSet stopwords = cfg.stopwords.empty() ? StringSet{} : load_stopwords(cfg.stopwords);
    pending.add_table(corpus_table(corpus_stats(corpus, stopwords)), paths.tables() / "table1_corpus");
    pending.add(paths.engagement(), render_engagement(engagement_profile(corpus)));

    AggregationOptions agg;
    agg.attribution = cfg.attribution;
    agg.counting = cfg.mention_counting;
    DailyActivity activity = aggregate_daily(corpus, state.lexicon, {}, agg);

    state.selection = select_portfolio(activity, cfg.portfolio_windows, cfg.portfolio_k);
    state.portfolio = cfg.tickers.empty() ? state.selection.intersection : cfg.tickers;
    if (state.portfolio.empty()) {
        throw Error("portfolio is empty: no ticker is in the top " + std::to_string(cfg.portfolio_k) +
                    " of every window");
    }

    DailyActivity selected;
    selected.range = activity.range;
    for (const auto& t : state.portfolio) {
        auto it = activity.by_ticker.find(t);
        selected.by_ticker.emplace(t, it != activity.by_ticker.end()
                                          ? std::move(it->second)
                                          : std::vector<DayActivity>(static_cast<std::size_t>(activity.range.size())));
    }

    std::vector<PriceSeries> series;
    for (const auto& t : state.portfolio) series.push_back(load_series(cfg, t));
    for (auto& s : series) state.prices.emplace(s.ticker, std::move(s));
    state.summaries = join_market(selected, state.prices);

    DailyActivity bench;
    bench.range = activity.range;
    bench.by_ticker.emplace(cfg.benchmark_symbol,
                            std::vector<DayActivity>(static_cast<std::size_t>(activity.range.size())));
    std::map<std::string, PriceSeries> bench_prices;
    bench_prices.emplace(cfg.benchmark_symbol, load_series(cfg, cfg.benchmark_symbol));
    state.benchmark = join_market(bench, bench_prices);

    std::string tickers;
    for (const auto& t : state.portfolio) tickers += t + "\n";
    pending.add(paths.summaries(), render_summaries(state.summaries));
    pending.add(paths.benchmark(), render_summaries(state.benchmark));
    pending.add(paths.ranking(), render_ranking(state.selection));
    pending.add(paths.portfolio(), tickers);
    pending.add(paths.key(), key + "\n");
    log << "ingest: " << state.portfolio.size() << " portfolio tickers\n";
}

void run_aggregate(const PipelineConfig& cfg, const Paths& paths, RunState& state, PendingWrites& pending) {
    std::vector<std::string> labels;
    for (const auto& w : cfg.portfolio_windows) labels.push_back(w.to_string());
    pending.add_table(sector_table(state.selection, labels, state.lexicon), paths.tables() / "table2_sectors");

    for (const auto& t : state.portfolio) {
        if (!state.prices.contains(t)) state.prices.emplace(t, load_series(cfg, t));
    }
    pending.add_table(portfolio_table(state.portfolio, state.lexicon, state.prices, cfg.date_range.last),
                      paths.tables() / "table3_portfolio");

    std::string csv = "symbol,name,sector\n";
    for (const auto& t : state.portfolio) {
        auto name = state.lexicon.name_of(t);
        auto sector = state.lexicon.sector_of(t);
        csv += t + "," + csv_escape(name ? *name : "") + "," + csv_escape(sector ? *sector : "unknown") + "\n";
    }
    pending.add(paths.out / "portfolio.csv", csv);
}

void run_backtest(const PipelineConfig& cfg, const Paths& paths, const RunState& state, PendingWrites& pending,
                  std::ostream& log) {
    const EvaluationOptions options{cfg.trading_days_only};
    for (const auto& spec : cfg.strategies) {
        const EvaluationReport report = evaluate_strategy(state.summaries, spec, options);
        pending.add_table(strategy_table(report), paths.strategies() / spec.name());
    }
    log << "backtest: " << cfg.strategies.size() << " strategies\n";
}

struct CohortSet {
    std::vector<EvaluationReport> storage;
    CohortReports refs;
};

CohortSet evaluate_cohorts(const SummaryTable& summaries, const PipelineConfig& cfg) {
    const EvaluationOptions options{cfg.trading_days_only};
    std::vector<StrategySpec> specs;
    for (const char* name : {"all", "mentions", "buy", "sell", "equal", "random", "reactive_1d", "reactive_3d",
                             "reactive_1w", "proactive_1d", "proactive_3d", "proactive_1w"}) {
        StrategySpec s = StrategySpec::parse(name);
        s.seed = cfg.seed;
        s.trials = cfg.trials;
        specs.push_back(s);
    }
    CohortSet set;
    set.storage.reserve(specs.size());
    for (const auto& s : specs) set.storage.push_back(evaluate_strategy(summaries, s, options));
    auto& st = set.storage;
    set.refs.all = &st[0];
    set.refs.mentions = &st[1];
    set.refs.buy = &st[2];
    set.refs.sell = &st[3];
    set.refs.equal = &st[4];
    set.refs.random = &st[5];
    for (std::size_t i = 0; i < kNumBefore; ++i) {
        set.refs.reactive[i] = &st[6 + i];
        set.refs.proactive[i] = &st[9 + i];
    }
    return set;
}

void run_report(const PipelineConfig& cfg, const Paths& paths, const RunState& state, PendingWrites& pending,
                std::ostream& log) {
    const CohortSet full = evaluate_cohorts(state.summaries, cfg);
    StrategySpec all_days = StrategySpec::parse("all");
    const EvaluationReport bench =
        evaluate_strategy(state.benchmark, all_days, EvaluationOptions{cfg.trading_days_only});

    std::vector<std::string> tickers;
    for (const auto& t : state.portfolio) {
        if (t != cfg.benchmark_symbol) tickers.push_back(t);
    }
    const fs::path dir = paths.tables();
    pending.add_table(table4_overview(bench, cfg.benchmark_label, full.refs), dir / "table4_overview");
    pending.add_table(table5_success(full.refs), dir / "table5_success");
    pending.add_table(table6_patterns(full.refs), dir / "table6_patterns");
    pending.add_table(table7_tickers(full.refs, tickers), dir / "table7_tickers");
    pending.add_table(table8_reactive(full.refs), dir / "table8_reactive");
    if (cfg.pre_hype_range) {
        const CohortSet pre = evaluate_cohorts(restrict_range(state.summaries, *cfg.pre_hype_range), cfg);
        pending.add_table(table9_phases(full.refs, pre.refs), dir / "table9_phases");
        pending.add_table(table10_phases(full.refs, pre.refs), dir / "table10_phases");
    } else {
        log << "report: no pre_hype_range configured, skipping tables 9 and 10\n";
    }
}

}  // namespace

int run_pipeline(const PipelineConfig& config, Stage stage, std::ostream& log) {
    const Paths paths{config.output_dir};
    PendingWrites pending;
    RunState state;
    Stage current = stage;
    try {
        const bool fetch = stage == Stage::Fetch || (stage == Stage::All && config.archive.has_value());
        if (fetch) {
            // the crawl result is an input of later stages, so it is written right away
            current = Stage::Fetch;
            PendingWrites fetched;
            run_fetch(config, fetched, log);
            fetched.commit();
        }
        if (stage != Stage::Fetch) {
            check_paths(config);
            const auto depth = static_cast<int>(stage);
            current = Stage::Ingest;
            run_ingest(config, paths, state, pending, log);
            if (depth >= static_cast<int>(Stage::Aggregate)) {
                current = Stage::Aggregate;
                run_aggregate(config, paths, state, pending);
            }
            if (depth >= static_cast<int>(Stage::Backtest)) {
                current = Stage::Backtest;
                run_backtest(config, paths, state, pending, log);
            }
            if (depth >= static_cast<int>(Stage::Report)) {
                current = Stage::Report;
                run_report(config, paths, state, pending, log);
            }
        }
        pending.commit();
    } catch (const ConfigError& e) {
        log << "error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        log << "error: stage " << stage_name(current) << ": " << e.what() << "\n";
        return kExitStageFailure;
    }
    log << stage_name(stage) << ": wrote " << pending.size() << " files to " << config.output_dir.string() << "\n";
    return kExitOk;
}

}  // namespace wsb
