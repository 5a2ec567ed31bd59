#include "wsb/market.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "wsb/error.hpp"
#include "wsb/text_io.hpp"

namespace wsb {

std::string_view horizon_tag(Horizon h) {
    switch (h) {
        case Horizon::Day1: return "1d";
        case Horizon::Day3: return "3d";
        case Horizon::Week1: return "1w";
        case Horizon::Month1: return "1m";
        case Horizon::Month3: return "3m";
    }
    return "?";
}

std::optional<Horizon> parse_horizon(std::string_view tag) {
    for (Horizon h : kAfterHorizons) {
        if (horizon_tag(h) == tag) return h;
    }
    return std::nullopt;
}

int WindowLengths::days(Horizon h) const {
    switch (h) {
        case Horizon::Day1: return day1;
        case Horizon::Day3: return day3;
        case Horizon::Week1: return week1;
        case Horizon::Month1: return month1;
        case Horizon::Month3: return month3;
    }
    return 0;
}

std::vector<PriceBar> parse_price_csv(std::istream& in, std::string_view source) {
    const std::string src(source);
    std::vector<PriceBar> bars;
    std::string line;
    std::size_t line_no = 0;
    std::array<int, 6> col{-1, -1, -1, -1, -1, -1};  // date, open, high, low, close, volume
    bool have_header = false;

    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_csv_line(line);
        if (!have_header) {
            static constexpr std::array<std::string_view, 6> names{"date", "open", "high",
                                                                   "low",  "close", "volume"};
            for (std::size_t i = 0; i < fields.size(); ++i) {
                const std::string h = to_lower_ascii(trim(fields[i]));
                for (std::size_t k = 0; k < names.size(); ++k) {
                    if (h == names[k]) col[k] = static_cast<int>(i);
                }
            }
            for (std::size_t k = 0; k < names.size(); ++k) {
                if (col[k] < 0) {
                    throw FormatError(src + ": header lacks column '" + std::string(names[k]) + "'",
                                      line_no);
                }
            }
            have_header = true;
            continue;
        }

        auto field = [&](std::size_t k) -> std::string_view {
            const auto c = static_cast<std::size_t>(col[k]);
            if (c >= fields.size()) {
                throw FormatError(src + ":" + std::to_string(line_no) + ": missing fields", line_no);
            }
            return fields[c];
        };

        PriceBar bar;
        try {
            bar.date = Date::parse(trim(field(0)));
            bar.open = parse_double(field(1));
            bar.high = parse_double(field(2));
            bar.low = parse_double(field(3));
            bar.close = parse_double(field(4));
            const double volume = parse_double(field(5));
            if (volume < 0 || !std::isfinite(volume)) throw FormatError("negative volume", line_no);
            bar.volume = static_cast<std::uint64_t>(std::llround(volume));
        } catch (const FormatError& e) {
            throw FormatError(src + ":" + std::to_string(line_no) + ": " + e.what(), line_no);
        }
        if (!(bar.close > 0) || !std::isfinite(bar.close)) {
            throw FormatError(src + ":" + std::to_string(line_no) + ": non-positive close", line_no);
        }
        if (bar.low > bar.high) {
            throw FormatError(src + ":" + std::to_string(line_no) + ": low above high", line_no);
        }
        if (!bars.empty() && bar.date <= bars.back().date) {
            throw FormatError(src + ":" + std::to_string(line_no) + ": dates not strictly ascending",
                              line_no);
        }
        bar.is_trading_day = true;
        bars.push_back(bar);
    }
    if (!have_header) throw FormatError(src + ": empty price file", 0);
    return bars;
}

std::vector<PriceBar> load_price_series(const std::filesystem::path& csv, std::string_view ticker) {
    std::ifstream in(csv);
    if (!in) throw IoError("cannot open price file for " + std::string(ticker) + ": " + csv.string());
    return parse_price_csv(in, csv.string());
}

std::vector<PriceBar> calendar_fill(std::span<const PriceBar> raw, const DateRange& range) {
    std::vector<PriceBar> out;
    if (range.empty()) return out;

    // last raw bar at or before range.first
    auto it = std::upper_bound(raw.begin(), raw.end(), range.first,
                               [](Date d, const PriceBar& b) { return d < b.date; });
    if (it == raw.begin()) {
        std::vector<std::string> missing;
        const Date stop = raw.empty() ? range.last + 1 : std::min(raw.front().date, range.last + 1);
        for (Date d = range.first; d < stop; ++d) missing.push_back(d.to_string());
        throw CoverageError("no trading bar at or before " + range.first.to_string() + " (" +
                                std::to_string(missing.size()) + " uncovered leading days)",
                            std::move(missing));
    }
    auto prev = std::prev(it);

    out.reserve(static_cast<std::size_t>(range.size()));
    for (Date d = range.first; d <= range.last; ++d) {
        while (it != raw.end() && it->date <= d) prev = it++;
        if (prev->date == d) {
            out.push_back(*prev);
            out.back().is_trading_day = true;
        } else {
            PriceBar filled;
            filled.date = d;
            filled.open = filled.high = filled.low = filled.close = prev->close;
            filled.volume = 0;
            filled.is_trading_day = false;
            out.push_back(filled);
        }
    }
    return out;
}

double compute_relative_volatility(const PriceBar& bar) {
    if (!bar.is_trading_day) return 0.0;
    return (bar.high - bar.low) / bar.close;
}

std::optional<std::size_t> PriceSeries::index_of(Date d) const {
    if (bars.empty() || d < bars.front().date || d > bars.back().date) return std::nullopt;
    return static_cast<std::size_t>(d - bars.front().date);
}

void compute_window_features(PriceSeries& series, const WindowLengths& lengths) {
    const std::size_t n = series.bars.size();
    const auto& bars = series.bars;

    series.rel_volatility.resize(n);
    for (std::size_t t = 0; t < n; ++t) series.rel_volatility[t] = compute_relative_volatility(bars[t]);

    auto change = [&](std::size_t from, std::size_t to) {
        return 100.0 * (bars[to].close - bars[from].close) / bars[from].close;
    };

    for (Horizon h : kAfterHorizons) {
        const auto w = static_cast<std::size_t>(lengths.days(h));
        auto& after = series.change_after[index_of(h)];
        after.assign(n, std::nullopt);
        for (std::size_t t = 0; t + w < n; ++t) after[t] = change(t, t + w);

        if (!is_before_horizon(h)) continue;
        auto& before = series.change_before[index_of(h)];
        before.assign(n, std::nullopt);
        for (std::size_t t = w; t < n; ++t) before[t] = change(t - w, t);

        const auto m = static_cast<std::size_t>(lengths.moving_average);
        auto& ma = series.ma_of_change[index_of(h)];
        ma.assign(n, std::nullopt);
        // every value in the trailing window must exist; first is at t - m >= w
        for (std::size_t t = w + m; t < n && m > 0; ++t) {
            double sum = 0.0;
            for (std::size_t s = t - m; s < t; ++s) sum += *before[s];
            ma[t] = sum / static_cast<double>(m);
        }
    }
}

void compute_window_features(std::span<PriceSeries> series, const WindowLengths& lengths) {
    const auto n = static_cast<std::ptrdiff_t>(series.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        compute_window_features(series[static_cast<std::size_t>(i)], lengths);
    }
}

PriceSeries build_price_series(std::string ticker, std::span<const PriceBar> raw,
                               const WindowLengths& lengths) {
    PriceSeries series;
    series.ticker = std::move(ticker);
    if (!raw.empty()) series.bars = calendar_fill(raw, DateRange{raw.front().date, raw.back().date});
    compute_window_features(series, lengths);
    return series;
}

}  // namespace wsb
