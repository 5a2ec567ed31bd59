#include "wsb/archive.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <optional>
#include <thread>

#include <httplib.h>

#include "wsb/error.hpp"
#include "wsb/text_io.hpp"

namespace wsb {

using nlohmann::json;

void ArchiveClientConfig::apply_env_overrides() {
    if (const char* url = std::getenv("WSB_ARCHIVE_URL"); url && *url) endpoint = url;
    if (const char* rate = std::getenv("WSB_RATE_LIMIT"); rate && *rate) {
        try {
            rate_limit = parse_double(rate);
        } catch (const FormatError&) {
            throw ConfigError(std::string("WSB_RATE_LIMIT is not a number: ") + rate);
        }
    }
}

std::chrono::nanoseconds ArchiveClientConfig::min_interval() const {
    if (rate_limit <= 0) return std::chrono::nanoseconds{0};
    return std::chrono::nanoseconds{static_cast<std::int64_t>(1e9 / rate_limit)};
}

PageFetcher make_http_fetcher(const ArchiveClientConfig& config) {
    const std::string& url = config.endpoint;
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("archive endpoint needs a scheme: " + url);
    const auto path_start = url.find('/', scheme_end + 3);
    std::string origin = url.substr(0, path_start);
    std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

    auto client = std::make_shared<httplib::Client>(origin);
    client->set_connection_timeout(10);
    client->set_read_timeout(30);

    // Pacing survives across crawls that share this fetcher, e.g. a resume after a fault.
    struct Pacer {
        std::mutex mu;
        std::optional<std::chrono::steady_clock::time_point> last;
    };
    auto pacer = std::make_shared<Pacer>();

    return [client, path, pacer, interval = config.min_interval(), subreddit = config.subreddit,
            score = config.score_filter](const PageRequest& req) -> std::vector<json> {
        {
            std::lock_guard lock(pacer->mu);
            if (pacer->last) std::this_thread::sleep_until(*pacer->last + interval);
            pacer->last = std::chrono::steady_clock::now();
        }
        httplib::Params params{{"subreddit", subreddit},
                               {"before", std::to_string(req.before)},
                               {"size", std::to_string(req.size)},
                               {"score", score}};
        auto res = client->Get(path, params, httplib::Headers{});
        if (!res) throw IoError("archive request failed: " + httplib::to_string(res.error()));
        if (res->status != 200) throw IoError("archive returned HTTP " + std::to_string(res->status));
        json body;
        try {
            body = json::parse(res->body);
        } catch (const json::parse_error& e) {
            throw IoError(std::string("archive returned malformed JSON: ") + e.what());
        }
        auto data = body.find("data");
        if (data == body.end() || !data->is_array()) throw IoError("archive response lacks a data array");
        return data->get<std::vector<json>>();
    };
}

namespace {

std::int64_t created_of(const json& record) {
    auto it = record.find("created_utc");
    if (it == record.end() || !it->is_number()) return std::numeric_limits<std::int64_t>::min();
    return it->is_number_float() ? static_cast<std::int64_t>(it->get<double>())
                                 : it->get<std::int64_t>();
}

}  // namespace

CrawlSummary crawl_archive(const ArchiveClientConfig& config, std::int64_t start, std::int64_t end,
                           const PageFetcher& fetch, const RecordSink& sink,
                           std::optional<std::int64_t> resume_before) {
    if (end <= start) throw ArgumentError("crawl end must be after start");
    if (config.page_size < 1) throw ArgumentError("page size must be positive");
    if (config.max_attempts < 1) throw ArgumentError("max_attempts must be positive");

    using clock = std::chrono::steady_clock;
    const auto interval = config.min_interval();
    std::optional<clock::time_point> last_request;

    CrawlSummary summary;
    std::int64_t cursor = resume_before.value_or(end + 1);
    summary.last_cursor = cursor;

    while (true) {
        std::vector<json> page;
        for (int attempt = 1;; ++attempt) {
            if (last_request) std::this_thread::sleep_until(*last_request + interval);
            last_request = clock::now();
            try {
                page = fetch(PageRequest{cursor, config.page_size});
                break;
            } catch (const std::exception& e) {
                ++summary.failed_attempts;
                if (attempt >= config.max_attempts) {
                    throw CrawlError("crawl failed after " + std::to_string(attempt) +
                                         " attempts at before=" + std::to_string(cursor) + ": " +
                                         e.what(),
                                     cursor);
                }
                std::this_thread::sleep_for(config.initial_backoff * (1LL << (attempt - 1)));
            }
        }
        ++summary.requests;
        if (page.empty()) break;

        std::int64_t earliest = std::numeric_limits<std::int64_t>::max();
        for (const json& r : page) {
            const std::int64_t t = created_of(r);
            if (t == std::numeric_limits<std::int64_t>::min()) {
                throw CrawlError("archive record without numeric created_utc", cursor);
            }
            earliest = std::min(earliest, t);
        }
        if (earliest >= cursor) {
            throw LoopDetected("pagination cursor did not advance (before=" + std::to_string(cursor) +
                                   ", page earliest=" + std::to_string(earliest) + ")",
                               cursor);
        }

        for (const json& r : page) {
            const std::int64_t t = created_of(r);
            if (t < start || t > end || t >= cursor) continue;
            sink(r);
            ++summary.records;
        }
        cursor = earliest;
        summary.last_cursor = cursor;
        if (earliest <= start) break;
    }
    return summary;
}

std::vector<json> crawl_archive(const ArchiveClientConfig& config, std::int64_t start,
                                std::int64_t end, const PageFetcher& fetch) {
    std::vector<json> out;
    crawl_archive(config, start, end, fetch, [&](const json& r) { out.push_back(r); });
    return out;
}

}  // namespace wsb
