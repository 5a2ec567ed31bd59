#include "synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "wsb/text_io.hpp"

namespace wsb::testing {

namespace {

constexpr const char* kPool[] = {"AMC", "BB", "GME", "NOK", "TSLA", "PLTR", "AMD", "NIO"};
constexpr const char* kExtras[] = {"MSFT", "AAPL", "F", "CRM"};
constexpr const char* kBuyWords[] = {"buy", "BUY", "bought", "Buying", "buys", "calls", "call"};
constexpr const char* kSellWords[] = {"sell", "SOLD", "selling", "sells", "puts", "put"};
constexpr const char* kOtherWords[] = {"hold", "holding", "HELD", "holds"};
constexpr const char* kFiller[] = {"the",  "moon", "rocket", "is",    "going", "to",   "tendies", "yolo",
                                   "my",   "wife", "GDP",    "CEO",   "DD",    "apes", "strong",  "$1000",
                                   "this", "F",    "week",   "print", "money", "loss", "porn",    "gain"};
constexpr const char* kFlairs[] = {"DD", "YOLO", "Discussion", "Gain", "Loss", "Meme"};

double round_cents(double v) { return std::round(v * 100.0) / 100.0; }

template <std::size_t N>
const char* pick(std::mt19937_64& rng, const char* const (&arr)[N]) {
    return arr[std::uniform_int_distribution<std::size_t>(0, N - 1)(rng)];
}

std::string mention(std::mt19937_64& rng, const std::string& symbol) {
    std::uniform_int_distribution<int> style(0, 9);
    const int s = style(rng);
    if (s < 4) return "$" + symbol;
    if (s < 9) return symbol;
    return to_lower_ascii(symbol);  // not detected
}

std::string make_text(std::mt19937_64& rng, const std::vector<std::string>& symbols,
                      const std::vector<std::string>& extras, int length) {
    std::vector<std::string> words;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int mentions = 1 + static_cast<int>(u(rng) * 2.2);
    for (int i = 0; i < mentions; ++i) {
        if (u(rng) < 0.08) {
            words.push_back(mention(rng, extras[std::uniform_int_distribution<std::size_t>(0, extras.size() - 1)(rng)]));
        } else {
            words.push_back(mention(rng, symbols[std::uniform_int_distribution<std::size_t>(0, symbols.size() - 1)(rng)]));
        }
    }
    const double r = u(rng);
    const int tx = static_cast<int>(u(rng) * 3);
    for (int i = 0; i < tx; ++i) {
        if (r < 0.5) {
            words.push_back(pick(rng, kBuyWords));
        } else if (r < 0.8) {
            words.push_back(pick(rng, kSellWords));
        } else {
            words.push_back(pick(rng, kOtherWords));
        }
    }
    for (int i = 0; i < length; ++i) words.push_back(pick(rng, kFiller));
    std::shuffle(words.begin(), words.end(), rng);
    std::string text;
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (i > 0) text += u(rng) < 0.1 ? ", " : " ";
        text += words[i];
    }
    if (u(rng) < 0.3) text += "!";
    return text;
}

}  // namespace

std::vector<PriceBar> random_price_path(Date first, Date last, std::uint64_t seed, double start_price,
                                        double scale) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> step(0.0005, 0.03);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<PriceBar> bars;
    double close = start_price;
    for (Date d = first; d <= last; ++d) {
        if (d.is_weekend() || u(rng) < 0.03) continue;
        if (u(rng) >= 0.1) close = std::max(0.5, round_cents(close * std::exp(step(rng))));
        const double spread = std::fabs(step(rng)) * close;
        PriceBar b;
        b.date = d;
        b.close = close;
        b.high = round_cents(close + spread * u(rng));
        b.low = std::max(0.01, round_cents(close - spread * u(rng)));
        b.open = round_cents(b.low + (b.high - b.low) * u(rng));
        b.volume = static_cast<std::uint64_t>(1e5 + u(rng) * 5e7);
        b.open *= scale;
        b.high *= scale;
        b.low *= scale;
        b.close *= scale;
        bars.push_back(b);
    }
    return bars;
}

SyntheticData make_synthetic(const SyntheticSpec& spec) {
    SyntheticData data;
    data.spec = spec;
    data.range = DateRange{spec.start, spec.start + (spec.days - 1)};
    const int n = std::clamp(spec.tickers, 1, static_cast<int>(std::size(kPool)));
    for (int i = 0; i < n; ++i) data.symbols.emplace_back(kPool[i]);
    std::sort(data.symbols.begin(), data.symbols.end());
    for (const char* e : kExtras) data.extras.emplace_back(e);

    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const std::int64_t t0 = data.range.first_second();
    const std::int64_t span = data.range.last_second() - t0 + 1;
    for (int i = 0; i < spec.submissions; ++i) {
        nlohmann::json r;
        r["id"] = "s" + std::to_string(i);
        r["created_utc"] = t0 + static_cast<std::int64_t>(u(rng) * static_cast<double>(span));
        r["title"] = make_text(rng, data.symbols, data.extras, 2 + static_cast<int>(u(rng) * 8));
        const double b = u(rng);
        if (b < 0.45) {
            r["selftext"] = make_text(rng, data.symbols, data.extras, 5 + static_cast<int>(u(rng) * 30));
        } else if (b < 0.5) {
            r["selftext"] = "[removed]";
        } else if (b < 0.55) {
            r["selftext"] = "";
        }
        r["score"] = static_cast<int>(u(rng) * 60) - 5;
        if (u(rng) < 0.7) r["link_flair_text"] = pick(rng, kFlairs);
        r["author"] = u(rng) < 0.03 ? "[deleted]" : "user" + std::to_string(static_cast<int>(u(rng) * 500));
        r["num_comments"] = static_cast<int>(u(rng) * 200);
        data.records.push_back(std::move(r));
    }

    const Date first = data.range.first - spec.lead_days;
    const Date last = data.range.last + spec.tail_days;
    std::uint64_t s = spec.seed * 1000 + 1;
    for (const auto& sym : data.symbols) {
        data.prices[sym] = random_price_path(first, last, s++, 5.0 + 10.0 * u(rng), spec.price_scale);
    }
    data.prices[data.benchmark] = random_price_path(first, last, s++, 250.0, spec.price_scale);
    return data;
}

TickerLexicon SyntheticData::lexicon() const {
    TickerLexicon lex;
    const char* sectors[] = {"Communication Services", "Technology", "Consumer Cyclical", "Technology",
                             "Consumer Cyclical", "Technology", "Technology", "Consumer Cyclical"};
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        lex.add_ticker(symbols[i], symbols[i] + " Inc.", i == 1 ? "" : sectors[i]);
    }
    for (const auto& e : extras) lex.add_ticker(e, e + " Corp.", "Technology");
    lex.add_ticker(benchmark, "SPDR S&P 500 ETF", "");
    lex.add_ticker("GDP", "Goodrich Petroleum", "Energy");
    lex.add_ticker("CEO", "Ceo Corp", "Energy");
    lex.add_stopword("GDP");
    lex.add_stopword("CEO");
    lex.add_stopword("DD");
    return lex;
}

std::vector<Submission> SyntheticData::submissions() const {
    std::vector<Submission> out;
    for (const auto& r : records) out.push_back(parse_submission_record(r));
    return out;
}

Corpus SyntheticData::corpus() const { return filter_corpus(submissions(), FilterOptions{1, true, range}); }

SummaryTable build_summaries(const SyntheticData& data, const WindowLengths& lengths) {
    const TickerLexicon lex = data.lexicon();
    const std::set<std::string> tickers(data.symbols.begin(), data.symbols.end());
    const DailyActivity activity = aggregate_daily(data.corpus(), lex, tickers);
    std::map<std::string, PriceSeries> series;
    for (const auto& t : data.symbols) series.emplace(t, build_price_series(t, data.prices.at(t), lengths));
    return join_market(activity, series);
}

oracle::Input oracle_input(const SyntheticData& data) {
    oracle::Input in;
    in.submissions = data.submissions();
    in.range = data.range;
    in.listed.insert(data.symbols.begin(), data.symbols.end());
    in.listed.insert(data.extras.begin(), data.extras.end());
    in.listed.insert({data.benchmark, "GDP", "CEO"});
    in.stopwords = {"GDP", "CEO", "DD"};
    in.tickers = data.symbols;
    for (const auto& t : data.symbols) in.prices[t] = data.prices.at(t);
    return in;
}

std::string price_csv(const std::vector<PriceBar>& bars) {
    std::string out = "date,open,high,low,close,volume\n";
    for (const auto& b : bars) {
        out += b.date.to_string() + "," + format_double_exact(b.open) + "," + format_double_exact(b.high) + "," +
               format_double_exact(b.low) + "," + format_double_exact(b.close) + "," +
               std::to_string(b.volume) + "\n";
    }
    return out;
}

std::filesystem::path write_fixture_dir(const SyntheticData& data, const std::filesystem::path& dir,
                                        const nlohmann::json& overrides) {
    namespace fs = std::filesystem;
    fs::create_directories(dir / "prices");
    std::string jsonl;
    for (const auto& r : data.records) jsonl += r.dump() + "\n";
    write_file_atomic(dir / "corpus.jsonl", jsonl);

    std::string table = "Symbol,Name,Sector\n";
    const TickerLexicon lex = data.lexicon();
    std::vector<std::string> listed = data.symbols;
    listed.insert(listed.end(), data.extras.begin(), data.extras.end());
    listed.push_back("GDP");
    listed.push_back("CEO");
    for (const auto& s : listed) {
        table += s + "," + csv_escape(std::string(lex.name_of(s).value_or(""))) + "," +
                 csv_escape(std::string(lex.sector_of(s).value_or(""))) + "\n";
    }
    write_file_atomic(dir / "tickers.csv", table);
    write_file_atomic(dir / "etfs.txt", data.benchmark + "\n");
    write_file_atomic(dir / "ticker_stopwords.txt", "# ambiguous abbreviations\nGDP\nCEO\nDD\n");
    write_file_atomic(dir / "stopwords.txt", "the\nis\nto\nmy\nthis\n");
    for (const auto& [sym, bars] : data.prices) write_file_atomic(dir / "prices" / (sym + ".csv"), price_csv(bars));

    const int last_year = data.range.last.year();
    Date pre_end = Date::from_ymd(last_year - 1, 12, 31);
    if (pre_end < data.range.first) pre_end = data.range.first + (data.range.size() / 2);
    nlohmann::json cfg = {
        {"paths",
         {{"corpus", {"corpus.jsonl"}},
          {"ticker_table", "tickers.csv"},
          {"etf_list", "etfs.txt"},
          {"ticker_stopwords", "ticker_stopwords.txt"},
          {"stopwords", "stopwords.txt"},
          {"price_dir", "prices"},
          {"output_dir", "out"}}},
        {"date_range", data.range.to_string()},
        {"pre_hype_range", DateRange{data.range.first, pre_end}.to_string()},
        {"portfolio", {{"k", static_cast<int>(data.symbols.size())}}},
        {"benchmark", {{"symbol", data.benchmark}, {"label", "S&P500"}}},
        {"seed", 42},
        {"trials", 5},
    };
    cfg.merge_patch(overrides);
    const fs::path path = dir / "config.json";
    write_file_atomic(path, cfg.dump(2) + "\n");
    return path;
}

std::filesystem::path scratch_dir(const std::string& name) {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / ("wsb_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace wsb::testing
