#include "wsb/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "wsb/error.hpp"
#include "wsb/text_io.hpp"

namespace wsb {

void Table::add_row(std::vector<std::string> row) {
    if (row.size() != header.size()) {
        throw ContractViolation("table row has " + std::to_string(row.size()) + " cells, header has " +
                                std::to_string(header.size()));
    }
    rows.push_back(std::move(row));
}

std::string_view extension(ReportFormat format) { return format == ReportFormat::Csv ? ".csv" : ".txt"; }

namespace {

void append_csv_row(std::string& out, const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i > 0) out += ',';
        out += csv_escape(row[i]);
    }
    out += '\n';
}

void append_text_row(std::string& out, const std::vector<std::string>& row,
                     const std::vector<std::size_t>& widths) {
    std::string line;
    for (std::size_t i = 0; i < row.size(); ++i) {
        const std::size_t pad = widths[i] - utf8_length(row[i]);
        if (i == 0) {
            line += row[i];
            line.append(pad, ' ');
        } else {
            line.append(2 + pad, ' ');
            line += row[i];
        }
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line;
    out += '\n';
}

std::string fixed2(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    std::string s = buf;
    if (s == "-0.00") s = "0.00";
    return s;
}

}  // namespace

std::string render_table(const Table& table, ReportFormat format) {
    std::string out;
    if (format == ReportFormat::Csv) {
        append_csv_row(out, table.header);
        for (const auto& row : table.rows) append_csv_row(out, row);
        return out;
    }
    std::vector<std::size_t> widths(table.header.size(), 0);
    auto measure = [&](const std::vector<std::string>& row) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            widths[i] = std::max(widths[i], static_cast<std::size_t>(utf8_length(row[i])));
        }
    };
    measure(table.header);
    for (const auto& row : table.rows) measure(row);
    if (!table.caption.empty()) out += table.caption + "\n\n";
    append_text_row(out, table.header, widths);
    for (const auto& row : table.rows) append_text_row(out, row, widths);
    return out;
}

void write_table(const Table& table, const std::filesystem::path& stem) {
    for (ReportFormat f : {ReportFormat::Csv, ReportFormat::Text}) {
        std::filesystem::path path = stem;
        path += std::string(extension(f));
        write_file_atomic(path, render_table(table, f));
    }
}

std::string format_fixed2(const std::optional<double>& v) { return v ? fixed2(*v) : "NA"; }

std::string format_ratio_as_percent(const std::optional<double>& ratio) {
    return ratio ? fixed2(*ratio * 100.0) : "NA";
}

std::string format_volume(const std::optional<double>& v) {
    if (!v) return "NA";
    static constexpr std::pair<double, const char*> kUnits[] = {
        {1e12, "T"}, {1e9, "B"}, {1e6, "M"}, {1e3, "K"}};
    for (const auto& [scale, suffix] : kUnits) {
        if (std::fabs(*v) >= scale) return fixed2(*v / scale) + suffix;
    }
    return fixed2(*v);
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::string_view kAfterLabel = "Avg. price change (%) after";
constexpr std::string_view kSinceLabel = "Avg. price change (%) since";

// Windows shown in the overview tables (3 days is only in the success-rate table).
constexpr std::array<Horizon, 4> kOverviewWindows{Horizon::Day1, Horizon::Week1, Horizon::Month1,
                                                  Horizon::Month3};

std::string long_name(Horizon h) {
    switch (h) {
        case Horizon::Day1: return "1 day";
        case Horizon::Day3: return "3 days";
        case Horizon::Week1: return "1 week";
        case Horizon::Month1: return "1 month";
        case Horizon::Month3: return "3 months";
    }
    return "";
}

const EvaluationReport& need(const EvaluationReport* r, std::string_view what) {
    if (r == nullptr) throw ContractViolation("missing " + std::string(what) + " evaluation");
    return *r;
}

std::string after_cell(const EvaluationReport& r, Horizon y) {
    return format_fixed2(r.pooled.after[index_of(y)].avg_change);
}

std::string before_cell(const EvaluationReport& r, Horizon x) {
    return format_fixed2(r.pooled.before[index_of(x)].avg_change);
}

std::optional<double> percent_change(const PriceSeries& s, Date as_of, int days) {
    const auto to = s.index_of(as_of);
    const auto from = s.index_of(as_of - days);
    if (!to || !from) return std::nullopt;
    const double base = s.bars[*from].close;
    return 100.0 * (s.bars[*to].close - base) / base;
}

std::pair<std::optional<double>, std::optional<double>> mean_median(std::vector<double> v) {
    if (v.empty()) return {std::nullopt, std::nullopt};
    double sum = 0.0;
    for (double x : v) sum += x;
    std::sort(v.begin(), v.end());
    const std::size_t mid = v.size() / 2;
    const double median = v.size() % 2 == 1 ? v[mid] : (v[mid - 1] + v[mid]) / 2.0;
    return {sum / static_cast<double>(v.size()), median};
}

}  // namespace

Table strategy_table(const EvaluationReport& report) {
    Table t;
    t.caption = "Strategy " + report.strategy + " (trials: " + std::to_string(report.trials) +
                ", selected days: " + std::to_string(report.pooled.days) + ")";
    t.header = {"Measure", "Window", "n", "Value", "Success rate (%)", "Ticker mean", "Ticker median",
                "Ticker mean success (%)", "Ticker median success (%)"};
    for (Horizon y : kAfterHorizons) {
        const auto k = index_of(y);
        const WindowResult& w = report.pooled.after[k];
        t.add_row({std::string(kAfterLabel), long_name(y), std::to_string(w.n), format_fixed2(w.avg_change),
                   format_ratio_as_percent(w.success_rate), format_fixed2(report.ticker_avg_change[k].mean),
                   format_fixed2(report.ticker_avg_change[k].median),
                   format_ratio_as_percent(report.ticker_success_rate[k].mean),
                   format_ratio_as_percent(report.ticker_success_rate[k].median)});
    }
    for (Horizon x : kBeforeHorizons) {
        const WindowResult& w = report.pooled.before[index_of(x)];
        t.add_row({std::string(kSinceLabel), long_name(x), std::to_string(w.n), format_fixed2(w.avg_change),
                   format_ratio_as_percent(w.success_rate), "NA", "NA", "NA", "NA"});
    }
    const std::string days = std::to_string(report.pooled.days);
    t.add_row({"Average", "mentions", days, format_fixed2(report.pooled.avg_mentions), "NA", "NA", "NA", "NA",
               "NA"});
    t.add_row({"Average", "daily volat. (%)", days, format_ratio_as_percent(report.pooled.avg_volatility), "NA",
               "NA", "NA", "NA", "NA"});
    t.add_row({"Average", "daily volume", days, format_volume(report.pooled.avg_volume), "NA", "NA", "NA", "NA",
               "NA"});
    return t;
}

std::string render_report(const EvaluationReport& report, ReportFormat format) {
    return render_table(strategy_table(report), format);
}

Table corpus_table(const CorpusStatsPair& stats) {
    Table t;
    t.caption = "Dataset and corpus statistics (s/w = stop words)";
    t.header = {"Measure", "Titles incl. s/w", "Titles excl. s/w", "Submissions incl. s/w",
                "Submissions excl. s/w"};
    const CorpusStats& a = stats.titles;
    const CorpusStats& b = stats.bodies;
    auto n = [](std::int64_t v) { return std::to_string(v); };
    t.add_row({"Words", n(a.word_count_incl_sw), n(a.word_count_excl_sw), n(b.word_count_incl_sw),
               n(b.word_count_excl_sw)});
    t.add_row({"Characters", n(a.char_count_incl_sw), n(a.char_count_excl_sw), n(b.char_count_incl_sw),
               n(b.char_count_excl_sw)});
    auto avg = [](const CorpusStats& s, double v) {
        return s.text_count > 0 ? fixed2(v) : std::string("NA");
    };
    t.add_row({"Avg. Text Length", avg(a, a.avg_text_length_incl_sw), avg(a, a.avg_text_length_excl_sw),
               avg(b, b.avg_text_length_incl_sw), avg(b, b.avg_text_length_excl_sw)});
    t.add_row({"Vocabulary Size", "NA", n(a.vocabulary_size), "NA", n(b.vocabulary_size)});
    t.add_row({"# Texts", n(a.text_count), "NA", n(b.text_count), "NA"});
    std::map<int, std::pair<std::int64_t, std::int64_t>> years;
    for (const auto& [y, c] : a.texts_per_year) years[y].first = c;
    for (const auto& [y, c] : b.texts_per_year) years[y].second = c;
    for (const auto& [y, c] : years) {
        t.add_row({"# Texts (" + std::to_string(y) + " only)", n(c.first), "NA", n(c.second), "NA"});
    }
    return t;
}

Table sector_table(const PortfolioSelection& selection, std::span<const std::string> window_labels,
                   const TickerLexicon& lexicon) {
    if (window_labels.size() != selection.top.size()) {
        throw ContractViolation("sector table needs one label per window");
    }
    Table t;
    t.caption = "Distribution of sectors for the top mentioned stocks per time window";
    t.header = {"Sector"};
    t.header.insert(t.header.end(), window_labels.begin(), window_labels.end());

    std::map<std::string, std::vector<int>> counts;
    for (std::size_t w = 0; w < selection.top.size(); ++w) {
        std::vector<std::string> symbols;
        for (const auto& r : selection.top[w]) symbols.push_back(r.symbol);
        for (const auto& [sector, c] : sector_distribution(symbols, lexicon)) {
            auto& row = counts[sector];
            row.resize(selection.top.size(), 0);
            row[w] = c;
        }
    }
    std::vector<std::pair<std::string, std::vector<int>>> ordered(counts.begin(), counts.end());
    auto total = [](const std::vector<int>& v) {
        int s = 0;
        for (int c : v) s += c;
        return s;
    };
    std::stable_sort(ordered.begin(), ordered.end(), [&](const auto& a, const auto& b) {
        const bool au = a.first == "unknown";
        const bool bu = b.first == "unknown";
        if (au != bu) return bu;
        return total(a.second) > total(b.second);
    });
    for (const auto& [sector, row] : ordered) {
        std::vector<std::string> cells{sector};
        for (int c : row) cells.push_back(std::to_string(c));
        t.add_row(std::move(cells));
    }
    return t;
}

Table portfolio_table(std::span<const std::string> tickers, const TickerLexicon& lexicon,
                      const std::map<std::string, PriceSeries>& prices, Date as_of) {
    Table t;
    t.caption = "Consistently and frequently discussed stock tickers with 1-year and 3-year price development "
                "(as of " + as_of.to_string() + ")";
    t.header = {"Ticker", "Company name", "1-Year Change (%)", "3-Year Change (%)"};
    std::vector<double> one;
    std::vector<double> three;
    for (const auto& symbol : tickers) {
        std::optional<double> c1;
        std::optional<double> c3;
        if (auto it = prices.find(symbol); it != prices.end()) {
            c1 = percent_change(it->second, as_of, 365);
            c3 = percent_change(it->second, as_of, 3 * 365);
        }
        if (c1) one.push_back(*c1);
        if (c3) three.push_back(*c3);
        auto name = lexicon.name_of(symbol);
        t.add_row({symbol, name && !name->empty() ? std::string(*name) : "NA", format_fixed2(c1),
                   format_fixed2(c3)});
    }
    auto [mean1, median1] = mean_median(std::move(one));
    auto [mean3, median3] = mean_median(std::move(three));
    t.add_row({"Mean", "NA", format_fixed2(mean1), format_fixed2(mean3)});
    t.add_row({"Median", "NA", format_fixed2(median1), format_fixed2(median3)});
    return t;
}

Table table4_overview(const EvaluationReport& benchmark, std::string_view benchmark_label,
                      const CohortReports& r) {
    const auto& all = need(r.all, "all-days");
    const auto& mentions = need(r.mentions, "mention-days");
    const auto& buy = need(r.buy, "buy-signal");
    const auto& sell = need(r.sell, "sell-signal");
    const std::array<const EvaluationReport*, 5> cols{&benchmark, &all, &mentions, &buy, &sell};

    Table t;
    t.caption = "Average price change per time window, mentions, daily volatility, and daily volume";
    t.header = {"Measure", "Window", std::string(benchmark_label), "All", "w/ Mention", "w/ Buy Sig.",
                "w/ Sell Sig."};
    for (Horizon y : kOverviewWindows) {
        std::vector<std::string> row{std::string(kAfterLabel), long_name(y)};
        for (const auto* c : cols) row.push_back(after_cell(*c, y));
        t.add_row(std::move(row));
    }
    std::vector<std::string> m{"Average", "mentions"};
    std::vector<std::string> v{"Average", "daily volat. (%)"};
    std::vector<std::string> vol{"Average", "daily volume"};
    for (std::size_t i = 0; i < cols.size(); ++i) {
        m.push_back(i == 0 ? "NA" : format_fixed2(cols[i]->pooled.avg_mentions));
        v.push_back(format_ratio_as_percent(cols[i]->pooled.avg_volatility));
        vol.push_back(format_volume(cols[i]->pooled.avg_volume));
    }
    t.add_row(std::move(m));
    t.add_row(std::move(v));
    t.add_row(std::move(vol));
    return t;
}

Table table5_success(const CohortReports& r) {
    Table t;
    t.caption = "Average success rate (%) of buy signals compared to equally and randomly distributed signals, "
                "and ratio of all positive price developments";
    t.header = {"Strategy", "1 day", "3 days", "1 week", "1 month", "3 months"};
    const std::array<std::pair<const char*, const EvaluationReport*>, 4> rows{{
        {"buy signals", &need(r.buy, "buy-signal")},
        {"equally distr.", &need(r.equal, "equally distributed")},
        {"randomly distr.", &need(r.random, "randomly distributed")},
        {"every day", &need(r.all, "all-days")},
    }};
    for (const auto& [label, report] : rows) {
        std::vector<std::string> row{label};
        for (Horizon y : kAfterHorizons) {
            row.push_back(format_ratio_as_percent(report->ticker_success_rate[index_of(y)].mean));
        }
        t.add_row(std::move(row));
    }
    return t;
}

Table table6_patterns(const CohortReports& r) {
    const std::array<const EvaluationReport*, 6> cols{
        &need(r.all, "all-days"), &need(r.mentions, "mention-days"), &need(r.buy, "buy-signal"),
        &need(r.sell, "sell-signal"), &need(r.equal, "equally distributed"),
        &need(r.random, "randomly distributed")};
    Table t;
    t.caption = "Average portfolio development for different investment patterns";
    t.header = {"Measure", "Window", "Total Avg.", "Mention", "Buy Sig.", "Sell Sig.", "Eq. Distr.",
                "Rnd. Distr."};
    for (Horizon y : kOverviewWindows) {
        std::vector<std::string> row{std::string(kAfterLabel), long_name(y)};
        for (const auto* c : cols) row.push_back(after_cell(*c, y));
        t.add_row(std::move(row));
    }
    return t;
}

Table table7_tickers(const CohortReports& r, std::span<const std::string> tickers) {
    const auto& all = need(r.all, "all-days");
    const auto& buy = need(r.buy, "buy-signal");
    Table t;
    t.caption = "Average price change (%) vs. average price change after buy signal per ticker";
    t.header = {"Ticker", "Pattern", "1 day", "1 week", "1 month", "3 months"};
    auto row_for = [&](const EvaluationReport& rep, const std::string& symbol, const char* label) {
        std::vector<std::string> row{symbol, label};
        auto it = rep.per_ticker.find(symbol);
        for (Horizon y : kOverviewWindows) {
            row.push_back(it == rep.per_ticker.end() ? "NA"
                                                     : format_fixed2(it->second.after[index_of(y)].avg_change));
        }
        return row;
    };
    for (const auto& symbol : tickers) {
        t.add_row(row_for(all, symbol, "Average"));
        t.add_row(row_for(buy, symbol, "Buy Signal"));
    }
    return t;
}

Table table8_reactive(const CohortReports& r) {
    const auto& all = need(r.all, "all-days");
    const auto& buy = need(r.buy, "buy-signal");
    std::vector<const EvaluationReport*> cols{&all, &buy};
    for (const auto* p : r.reactive) cols.push_back(&need(p, "reactive"));
    for (const auto* p : r.proactive) cols.push_back(&need(p, "proactive"));

    Table t;
    t.caption = "Reactive vs. proactive buy signals and baselines: average performance over the preceding x "
                "days and after y days";
    t.header = {"Measure", "Window", "Baseline Avg", "Baseline Buy Sig."};
    for (const char* kind : {"Reactive", "Proactive"}) {
        for (Horizon x : kBeforeHorizons) {
            t.header.push_back(std::string(kind) + " x=" + std::string(horizon_tag(x)));
        }
    }
    for (auto it = kBeforeHorizons.rbegin(); it != kBeforeHorizons.rend(); ++it) {
        std::vector<std::string> row{"AVG perf (%) since", std::string(horizon_tag(*it))};
        for (const auto* c : cols) row.push_back(before_cell(*c, *it));
        t.add_row(std::move(row));
    }
    for (Horizon y : kAfterHorizons) {
        std::vector<std::string> row{"AVG perf (%) after", std::string(horizon_tag(y))};
        for (const auto* c : cols) row.push_back(after_cell(*c, y));
        t.add_row(std::move(row));
    }
    return t;
}

Table table9_phases(const CohortReports& full, const CohortReports& pre_hype) {
    const std::array<const EvaluationReport*, 4> cols{
        &need(full.all, "full all-days"), &need(full.buy, "full buy-signal"),
        &need(pre_hype.all, "pre-hype all-days"), &need(pre_hype.buy, "pre-hype buy-signal")};
    Table t;
    t.caption = "Full vs. pre-hype phase: average price change per time window, mentions, daily volatility, "
                "and daily volume";
    t.header = {"Measure", "Window", "Full All", "Full w/ Buy Sig.", "Pre-hype All", "Pre-hype w/ Buy Sig."};
    for (Horizon y : kOverviewWindows) {
        std::vector<std::string> row{std::string(kAfterLabel), long_name(y)};
        for (const auto* c : cols) row.push_back(after_cell(*c, y));
        t.add_row(std::move(row));
    }
    std::vector<std::string> m{"Average", "mentions"};
    std::vector<std::string> v{"Average", "daily volat. (%)"};
    std::vector<std::string> vol{"Average", "daily volume"};
    for (const auto* c : cols) {
        m.push_back(format_fixed2(c->pooled.avg_mentions));
        v.push_back(format_ratio_as_percent(c->pooled.avg_volatility));
        vol.push_back(format_volume(c->pooled.avg_volume));
    }
    t.add_row(std::move(m));
    t.add_row(std::move(v));
    t.add_row(std::move(vol));
    return t;
}

Table table10_phases(const CohortReports& full, const CohortReports& pre_hype) {
    constexpr std::size_t d1 = index_of(Horizon::Day1);
    constexpr std::size_t w1 = index_of(Horizon::Week1);
    std::vector<const EvaluationReport*> cols;
    Table t;
    t.caption = "Full vs. pre-hype phase: average price change in preceding x days and subsequent y days after "
                "all, reactive and proactive buy signals";
    t.header = {"Measure", "Window"};
    for (const auto& [phase, r] : {std::pair<const char*, const CohortReports*>{"Full", &full},
                                   std::pair<const char*, const CohortReports*>{"Pre-hype", &pre_hype}}) {
        const std::string p = phase;
        cols.push_back(&need(r->buy, "buy-signal"));
        cols.push_back(&need(r->reactive[d1], "reactive 1d"));
        cols.push_back(&need(r->reactive[w1], "reactive 1w"));
        cols.push_back(&need(r->proactive[d1], "proactive 1d"));
        cols.push_back(&need(r->proactive[w1], "proactive 1w"));
        for (const char* h : {"All Buy", "React. Buy 1d", "React. Buy 1w", "Proact. Buy 1d", "Proact. Buy 1w"}) {
            t.header.push_back(p + " " + h);
        }
    }
    for (auto it = kBeforeHorizons.rbegin(); it != kBeforeHorizons.rend(); ++it) {
        std::vector<std::string> row{"% chg. since", std::string(horizon_tag(*it))};
        for (const auto* c : cols) row.push_back(before_cell(*c, *it));
        t.add_row(std::move(row));
    }
    for (Horizon y : kAfterHorizons) {
        std::vector<std::string> row{"% chg. after", std::string(horizon_tag(y))};
        for (const auto* c : cols) row.push_back(after_cell(*c, y));
        t.add_row(std::move(row));
    }
    return t;
}

}  // namespace wsb
