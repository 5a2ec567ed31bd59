#include <gtest/gtest.h>

#include <regex>
#include <sstream>

#include "synthetic.hpp"
#include "wsb/error.hpp"
#include "wsb/report.hpp"
#include "wsb/text_io.hpp"

using namespace wsb;
namespace fx = wsb::testing;

namespace {

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string l;
    while (std::getline(in, l)) out.push_back(l);
    return out;
}

/// Cells of an aligned text row: runs separated by two or more spaces.
std::vector<std::string> text_cells(const std::string& line) {
    static const std::regex sep("\\s{2,}");
    std::vector<std::string> out;
    for (std::sregex_token_iterator it(line.begin(), line.end(), sep, -1), end; it != end; ++it) {
        if (!it->str().empty()) out.push_back(it->str());
    }
    return out;
}

void expect_renderings_agree(const Table& t) {
    const auto csv = lines(render_table(t, ReportFormat::Csv));
    const auto txt = lines(render_table(t, ReportFormat::Text));
    ASSERT_EQ(csv.size(), t.rows.size() + 1);
    ASSERT_EQ(txt.size(), t.rows.size() + 3);  // caption and blank line first
    EXPECT_EQ(txt[0], t.caption);
    EXPECT_TRUE(txt[1].empty());
    EXPECT_EQ(split_csv_line(csv[0]), t.header);
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        EXPECT_EQ(split_csv_line(csv[i + 1]), t.rows[i]);
        EXPECT_EQ(text_cells(txt[i + 3]), t.rows[i]) << txt[i + 3];
    }
    EXPECT_EQ(text_cells(txt[2]), t.header);
}

struct Cohorts {
    std::map<std::string, EvaluationReport> reports;
    CohortReports view;
};

Cohorts build_cohorts(const SummaryTable& table) {
    Cohorts c;
    for (const char* n : {"all", "mentions", "buy", "sell", "equal", "random", "reactive:1d", "reactive:3d",
                          "reactive:1w", "proactive:1d", "proactive:3d", "proactive:1w"}) {
        c.reports[n] = evaluate_strategy(table, StrategySpec::parse(n));
    }
    c.view.all = &c.reports["all"];
    c.view.mentions = &c.reports["mentions"];
    c.view.buy = &c.reports["buy"];
    c.view.sell = &c.reports["sell"];
    c.view.equal = &c.reports["equal"];
    c.view.random = &c.reports["random"];
    const char* tags[] = {"1d", "3d", "1w"};
    for (std::size_t k = 0; k < 3; ++k) {
        c.view.reactive[k] = &c.reports[std::string("reactive:") + tags[k]];
        c.view.proactive[k] = &c.reports[std::string("proactive:") + tags[k]];
    }
    return c;
}

}  // namespace

TEST(Format, Cells) {
    EXPECT_EQ(format_fixed2(0.2873), "0.29");
    EXPECT_EQ(format_fixed2(-0.001), "0.00");
    EXPECT_EQ(format_fixed2(-1.005e1), "-10.05");
    EXPECT_EQ(format_fixed2(std::nullopt), "NA");
    EXPECT_EQ(format_ratio_as_percent(0.5175), "51.75");
    EXPECT_EQ(format_ratio_as_percent(std::nullopt), "NA");
    EXPECT_EQ(format_volume(2.99e9), "2.99B");
    EXPECT_EQ(format_volume(25.56e6), "25.56M");
    EXPECT_EQ(format_volume(1200.0), "1.20K");
    EXPECT_EQ(format_volume(512.0), "512.00");
    EXPECT_EQ(format_volume(std::nullopt), "NA");
}

TEST(Table, RowWidthChecked) {
    Table t{"c", {"a", "b"}, {}};
    EXPECT_THROW(t.add_row({"1"}), ContractViolation);
    t.add_row({"x,y", "2"});
    EXPECT_EQ(render_table(t, ReportFormat::Csv), "a,b\n\"x,y\",2\n");
    EXPECT_EQ(extension(ReportFormat::Csv), ".csv");
}

TEST(StrategyTable, EmptySelectionRendersNA) {
    const Date d = Date::from_ymd(2021, 1, 4);
    DailySummary s;
    s.ticker = "T";
    s.date = d;
    const EvaluationReport r = evaluate_strategy(SummaryTable{{"T", {s}}}, StrategySpec::parse("buy"));
    const Table t = strategy_table(r);
    ASSERT_FALSE(t.rows.empty());
    EXPECT_EQ(t.rows[0][2], "0");
    EXPECT_EQ(t.rows[0][3], "NA");
    EXPECT_EQ(t.rows[0][4], "NA");
    const std::string csv = render_report(r, ReportFormat::Csv);
    EXPECT_EQ(csv.find("nan"), std::string::npos);
    EXPECT_EQ(csv.find("inf"), std::string::npos);
}

TEST(StrategyTable, HeaderAndRows) {
    const auto data = fx::make_synthetic({.tickers = 3, .days = 200, .submissions = 3000, .seed = 2});
    const EvaluationReport r = evaluate_strategy(fx::build_summaries(data), StrategySpec::parse("buy"));
    const Table t = strategy_table(r);
    EXPECT_EQ(t.header, (std::vector<std::string>{"Measure", "Window", "n", "Value", "Success rate (%)", "Ticker mean",
                                                  "Ticker median", "Ticker mean success (%)",
                                                  "Ticker median success (%)"}));
    ASSERT_EQ(t.rows.size(), kNumAfter + kNumBefore + 3);
    EXPECT_EQ(t.rows[0][0], "Avg. price change (%) after");
    EXPECT_EQ(t.rows[0][1], "1 day");
    EXPECT_EQ(t.rows[0][3], format_fixed2(r.pooled.after[0].avg_change));
    EXPECT_EQ(t.rows[0][4], format_ratio_as_percent(r.pooled.after[0].success_rate));
    EXPECT_EQ(t.rows[kNumAfter][0], "Avg. price change (%) since");
    EXPECT_EQ(t.rows.back()[1], "daily volume");
    expect_renderings_agree(t);
}

TEST(ArticleTables, HeadersAndConsistency) {
    const auto data = fx::make_synthetic({.tickers = 4, .days = 500, .submissions = 8000, .seed = 13});
    const SummaryTable table = fx::build_summaries(data);
    const Cohorts full = build_cohorts(table);
    const Cohorts pre = build_cohorts(restrict_range(table, DateRange{data.range.first, data.range.first + 300}));

    std::map<std::string, PriceSeries> bench;
    bench.emplace("SPY", build_price_series("SPY", data.prices.at("SPY")));
    const DailyActivity none = aggregate_daily(Corpus{{}, data.range}, data.lexicon(), {"SPY"});
    const EvaluationReport spy = evaluate_strategy(join_market(none, bench), StrategySpec::parse("all"));

    const Table t4 = table4_overview(spy, "S&P500", full.view);
    EXPECT_EQ(t4.header, (std::vector<std::string>{"Measure", "Window", "S&P500", "All", "w/ Mention", "w/ Buy Sig.",
                                                   "w/ Sell Sig."}));
    EXPECT_EQ(t4.rows[0][3], format_fixed2(full.reports.at("all").pooled.after[0].avg_change));
    expect_renderings_agree(t4);

    const Table t5 = table5_success(full.view);
    EXPECT_EQ(t5.header, (std::vector<std::string>{"Strategy", "1 day", "3 days", "1 week", "1 month", "3 months"}));
    ASSERT_EQ(t5.rows.size(), 4u);
    EXPECT_EQ(t5.rows[0][1], format_ratio_as_percent(full.reports.at("buy").ticker_success_rate[0].mean));
    expect_renderings_agree(t5);

    const Table t6 = table6_patterns(full.view);
    EXPECT_EQ(t6.header, (std::vector<std::string>{"Measure", "Window", "Total Avg.", "Mention", "Buy Sig.",
                                                   "Sell Sig.", "Eq. Distr.", "Rnd. Distr."}));
    expect_renderings_agree(t6);

    const Table t7 = table7_tickers(full.view, data.symbols);
    EXPECT_EQ(t7.header, (std::vector<std::string>{"Ticker", "Pattern", "1 day", "1 week", "1 month", "3 months"}));
    EXPECT_EQ(t7.rows.size(), 2 * data.symbols.size());
    expect_renderings_agree(t7);

    const Table t8 = table8_reactive(full.view);
    EXPECT_EQ(t8.header.size(), 10u);
    EXPECT_EQ(t8.header[2], "Baseline Avg");
    EXPECT_EQ(t8.rows.size(), 8u);
    expect_renderings_agree(t8);

    const Table t9 = table9_phases(full.view, pre.view);
    EXPECT_EQ(t9.header, (std::vector<std::string>{"Measure", "Window", "Full All", "Full w/ Buy Sig.",
                                                   "Pre-hype All", "Pre-hype w/ Buy Sig."}));
    expect_renderings_agree(t9);

    const Table t10 = table10_phases(full.view, pre.view);
    EXPECT_EQ(t10.header.size(), 12u);
    EXPECT_EQ(t10.header[2], "Full All Buy");
    EXPECT_EQ(t10.header[7], "Pre-hype All Buy");
    expect_renderings_agree(t10);

    const Table t1 = corpus_table(corpus_stats(data.corpus(), StringSet{"the"}));
    expect_renderings_agree(t1);

    std::map<std::string, PriceSeries> prices;
    for (const auto& s : data.symbols) prices.emplace(s, build_price_series(s, data.prices.at(s)));
    const Table t3 = portfolio_table(data.symbols, data.lexicon(), prices, data.range.last);
    EXPECT_EQ(t3.rows.size(), data.symbols.size() + 2);
    EXPECT_EQ(t3.rows[t3.rows.size() - 2][0], "Mean");
    EXPECT_EQ(t3.rows.back()[0], "Median");
    expect_renderings_agree(t3);
}

TEST(ArticleTables, SectorTable) {
    TickerLexicon lex;
    lex.add_ticker("A", "", "Technology");
    lex.add_ticker("B", "", "Energy");
    lex.add_ticker("C", "", "Technology");
    lex.add_ticker("D", "", "");
    PortfolioSelection sel;
    sel.top = {{{"A", 9}, {"B", 3}, {"D", 1}}, {{"C", 5}, {"A", 2}}};
    const std::vector<std::string> labels{"2019", "2020"};
    const Table t = sector_table(sel, labels, lex);
    ASSERT_EQ(t.rows.size(), 3u);
    EXPECT_EQ(t.rows[0][0], "Technology");
    EXPECT_EQ(t.rows[0][1], "1");
    EXPECT_EQ(t.rows[0][2], "2");
    EXPECT_EQ(t.rows.back()[0], "unknown");
    expect_renderings_agree(t);
}

TEST(WriteTable, WritesBothFormats) {
    const auto dir = fx::scratch_dir("write_table");
    Table t{"Caption", {"x", "y"}, {}};
    t.add_row({"1", "2"});
    write_table(t, dir / "t");
    EXPECT_EQ(read_file(dir / "t.csv"), render_table(t, ReportFormat::Csv));
    EXPECT_EQ(read_file(dir / "t.txt"), render_table(t, ReportFormat::Text));
}
