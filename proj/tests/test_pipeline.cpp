#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "synthetic.hpp"
#include "wsb/error.hpp"
#include "wsb/pipeline.hpp"
#include "wsb/text_io.hpp"

using namespace wsb;
namespace fs = std::filesystem;
namespace fx = wsb::testing;
using nlohmann::json;

namespace {

const fx::SyntheticData& fixture() {
    static const fx::SyntheticData data =
        fx::make_synthetic({.tickers = 4, .days = 730, .submissions = 6000, .seed = 77});
    return data;
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
    std::map<std::string, std::string> out;
    if (!fs::exists(dir)) return out;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = read_file(e.path());
    }
    return out;
}

int run(const fs::path& config, Stage stage, std::string* log_out = nullptr) {
    std::ostringstream log;
    const int code = run_pipeline(load_config(config), stage, log);
    if (log_out) *log_out = log.str();
    return code;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(WSB_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

}  // namespace

TEST(Config, ParsesAndResolvesPaths) {
    const fs::path dir = fx::scratch_dir("pipeline_config");
    const fs::path path = fx::write_fixture_dir(fixture(), dir,
                                                {{"strategies", {"buy", {{"kind", "random"}, {"trials", 3}}}},
                                                 {"toggles", {{"attribution", "single_ticker"}}}});
    const PipelineConfig cfg = load_config(path);
    EXPECT_EQ(cfg.output_dir, dir / "out");
    ASSERT_EQ(cfg.corpus.size(), 1u);
    EXPECT_EQ(cfg.corpus[0], dir / "corpus.jsonl");
    EXPECT_EQ(cfg.date_range, fixture().range);
    ASSERT_EQ(cfg.strategies.size(), 2u);
    EXPECT_EQ(cfg.strategies[1].trials, 3);
    EXPECT_EQ(cfg.attribution, AttributionMode::SingleTicker);
    ASSERT_EQ(cfg.portfolio_windows.size(), 2u);
    EXPECT_EQ(cfg.portfolio_windows[0], (DateRange{Date::from_ymd(2019, 1, 1), Date::from_ymd(2019, 12, 31)}));
    EXPECT_FALSE(default_strategies().empty());
}

TEST(Config, CollectsEveryProblem) {
    const json doc = {{"paths", {{"ticker_table", 5}}}, {"date_range", "2020-02-01..2020-01-01"}, {"bogus", 1},
                      {"trials", 0}};
    try {
        parse_config(doc, "/tmp");
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        for (const char* field : {"paths.ticker_table", "paths.price_dir", "paths.output_dir", "date_range", "bogus",
                                  "trials"}) {
            EXPECT_NE(msg.find(field), std::string::npos) << field << " not in: " << msg;
        }
    }
    EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

TEST(Config, Overrides) {
    const fs::path dir = fx::scratch_dir("pipeline_overrides");
    PipelineConfig cfg = load_config(fx::write_fixture_dir(fixture(), dir));
    ConfigOverrides o;
    o.seed = 7;
    o.output_dir = dir / "elsewhere";
    o.range = DateRange{Date::from_ymd(2019, 3, 1), Date::from_ymd(2019, 9, 30)};
    apply_overrides(cfg, o);
    EXPECT_EQ(cfg.seed, 7u);
    for (const auto& s : cfg.strategies) EXPECT_EQ(s.seed, 7u);
    EXPECT_EQ(cfg.output_dir, dir / "elsewhere");
    EXPECT_EQ(cfg.date_range, *o.range);
    EXPECT_EQ(parse_stage("backtest"), Stage::Backtest);
    EXPECT_FALSE(parse_stage("deploy").has_value());
}

TEST(Pipeline, IngestWritesSummaries) {
    const fs::path dir = fx::scratch_dir("pipeline_ingest");
    std::string log;
    ASSERT_EQ(run(fx::write_fixture_dir(fixture(), dir), Stage::Ingest, &log), kExitOk) << log;
    const std::string csv = read_file(dir / "out" / "daily_summaries.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')).find("ticker,date"), 0u);
    EXPECT_TRUE(fs::exists(dir / "out" / "portfolio_tickers.txt"));
    EXPECT_FALSE(fs::exists(dir / "out" / "strategies"));
}

TEST(Pipeline, MissingPriceFileFailsWithoutOutput) {
    const fs::path dir = fx::scratch_dir("pipeline_missing_price");
    const fs::path config = fx::write_fixture_dir(fixture(), dir);
    const std::string victim = fixture().symbols.front();
    fs::remove(dir / "prices" / (victim + ".csv"));
    std::string log;
    EXPECT_EQ(run(config, Stage::All, &log), kExitStageFailure);
    EXPECT_NE(log.find(victim), std::string::npos) << log;
    EXPECT_NE(log.find("stage ingest"), std::string::npos) << log;
    EXPECT_TRUE(snapshot(dir / "out").empty());
}

TEST(Pipeline, EmptyPortfolioIsStageFailure) {
    const fs::path dir = fx::scratch_dir("pipeline_empty_portfolio");
    std::string log;
    EXPECT_EQ(run(fx::write_fixture_dir(fixture(), dir, {{"portfolio", {{"k", 1}, {"windows", {"2019-01-01..2019-01-01", "2019-06-01..2019-06-01"}}}}}),
                  Stage::Ingest, &log),
              kExitStageFailure);
    EXPECT_NE(log.find("portfolio is empty"), std::string::npos) << log;
}

TEST(Pipeline, AllIsDeterministicAndCached) {
    const fs::path dir = fx::scratch_dir("pipeline_all");
    const fs::path config = fx::write_fixture_dir(fixture(), dir);
    std::string log;
    ASSERT_EQ(run(config, Stage::All, &log), kExitOk) << log;
    const auto first = snapshot(dir / "out");
    for (const char* f : {"daily_summaries.csv", "benchmark_summaries.csv", "portfolio.csv", "engagement.csv",
                          "tables/table1_corpus.csv", "tables/table4_overview.txt", "tables/table10_phases.csv",
                          "strategies/buy.csv", "strategies/random.txt"}) {
        EXPECT_TRUE(first.contains(f)) << f;
    }
    ASSERT_EQ(run(config, Stage::All, &log), kExitOk) << log;
    EXPECT_NE(log.find("reusing"), std::string::npos) << log;
    EXPECT_EQ(snapshot(dir / "out"), first);

    // a fresh directory reproduces the same bytes without the cache
    const fs::path other = fx::scratch_dir("pipeline_all_again");
    ASSERT_EQ(run(fx::write_fixture_dir(fixture(), other), Stage::All), kExitOk);
    EXPECT_EQ(snapshot(other / "out"), first);

    // changing an input invalidates the cache
    fs::path corpus = dir / "corpus.jsonl";
    write_file_atomic(corpus, read_file(corpus) + R"({"id":"late","created_utc":1546400000,"title":"buy $)" +
                                  fixture().symbols.front() + R"(","score":3})" + "\n");
    ASSERT_EQ(run(config, Stage::Ingest, &log), kExitOk);
    EXPECT_EQ(log.find("reusing"), std::string::npos) << log;
}

TEST(Pipeline, SeedOnlyMovesRandomBaseline) {
    const fs::path a = fx::scratch_dir("pipeline_seed_a");
    const fs::path b = fx::scratch_dir("pipeline_seed_b");
    ASSERT_EQ(run(fx::write_fixture_dir(fixture(), a), Stage::Backtest), kExitOk);
    ASSERT_EQ(run(fx::write_fixture_dir(fixture(), b, {{"seed", 1234}}), Stage::Backtest), kExitOk);
    EXPECT_EQ(read_file(a / "out/strategies/buy.csv"), read_file(b / "out/strategies/buy.csv"));
    EXPECT_EQ(read_file(a / "out/strategies/equal.csv"), read_file(b / "out/strategies/equal.csv"));
    EXPECT_NE(read_file(a / "out/strategies/random.csv"), read_file(b / "out/strategies/random.csv"));
}

TEST(Pipeline, FetchStageWritesArchive) {
    httplib::Server server;
    const auto& data = fixture();
    std::vector<json> sorted = data.records;
    std::sort(sorted.begin(), sorted.end(), [](const json& x, const json& y) {
        return x["created_utc"].get<std::int64_t>() > y["created_utc"].get<std::int64_t>();
    });
    server.Get("/search", [&](const httplib::Request& req, httplib::Response& res) {
        const std::int64_t before = std::stoll(req.get_param_value("before"));
        const std::size_t size = std::stoul(req.get_param_value("size"));
        json page = json::array();
        for (const auto& r : sorted) {
            if (r["created_utc"].get<std::int64_t>() < before && page.size() < size) page.push_back(r);
        }
        res.set_content(json{{"data", page}}.dump(), "application/json");
    });
    const int port = server.bind_to_any_port("127.0.0.1");
    std::thread worker([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    const fs::path dir = fx::scratch_dir("pipeline_fetch");
    const json archive = {{"endpoint", "http://127.0.0.1:" + std::to_string(port) + "/search"},
                          {"page_size", 500},
                          {"rate_limit", 1000},
                          {"output", "fetched.jsonl"}};
    const fs::path config = fx::write_fixture_dir(data, dir, {{"archive", archive}, {"paths", {{"corpus", "fetched.jsonl"}}}});
    std::string log;
    const int code = run(config, Stage::All, &log);
    server.stop();
    worker.join();
    ASSERT_EQ(code, kExitOk) << log;
    std::istringstream fetched(read_file(dir / "fetched.jsonl"));
    std::size_t lines = 0;
    for (std::string l; std::getline(fetched, l);) ++lines;
    EXPECT_EQ(lines, data.records.size());

    // same analysis as reading the original file
    const fs::path plain = fx::scratch_dir("pipeline_fetch_plain");
    ASSERT_EQ(run(fx::write_fixture_dir(data, plain), Stage::All), kExitOk);
    EXPECT_EQ(read_file(dir / "out/strategies/buy.csv"), read_file(plain / "out/strategies/buy.csv"));
}

TEST(Cli, ExitCodes) {
    const fs::path dir = fx::scratch_dir("pipeline_cli");
    const fs::path config = fx::write_fixture_dir(fixture(), dir);
    EXPECT_EQ(run_cli("ingest --config " + config.string()), 0);
    EXPECT_EQ(run_cli("ingest --config " + (dir / "missing.json").string()), 2);
    EXPECT_EQ(run_cli("launch --config " + config.string()), 2);
    EXPECT_EQ(run_cli("ingest --config " + config.string() + " --range 2019-13-01..2019-12-31"), 2);
    EXPECT_EQ(run_cli("fetch --config " + config.string()), 2);
    write_file_atomic(dir / "bad.json", "{\"date_range\": 5}");
    EXPECT_EQ(run_cli("all --config " + (dir / "bad.json").string()), 2);
    fs::remove(dir / "prices" / "SPY.csv");
    EXPECT_EQ(run_cli("ingest --config " + config.string() + " --out " + (dir / "o2").string()), 1);
    EXPECT_FALSE(fs::exists(dir / "o2" / "daily_summaries.csv"));
}
