#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace wsb {

/// Connection and pacing settings for a Pushshift-style submission archive.
struct ArchiveClientConfig {
    std::string endpoint;  // e.g. http://localhost:8080/reddit/search/submission
    std::string subreddit = "wallstreetbets";
    int page_size = 100;
    double rate_limit = 1.0;  // requests per second
    int max_attempts = 5;
    std::chrono::milliseconds initial_backoff{500};
    std::string score_filter = ">0";

    /// Applies WSB_ARCHIVE_URL and WSB_RATE_LIMIT when set.
    void apply_env_overrides();
    std::chrono::nanoseconds min_interval() const;
};

struct PageRequest {
    std::int64_t before = 0;  // exclusive upper bound on created_utc
    int size = 0;
};

/// Returns the records of one page. Throws on transport failure; the crawler retries.
using PageFetcher = std::function<std::vector<nlohmann::json>(const PageRequest&)>;
using RecordSink = std::function<void(const nlohmann::json&)>;

/// HTTP GET against `config.endpoint` with subreddit, before, size and score query
/// parameters. Expects {"data": [...]}. Requests through one fetcher are spaced by
/// `config.min_interval()` even across separate crawls.
PageFetcher make_http_fetcher(const ArchiveClientConfig& config);

struct CrawlSummary {
    std::size_t records = 0;
    std::size_t requests = 0;  // successful pages
    std::size_t failed_attempts = 0;
    std::int64_t last_cursor = 0;
};

/// Walks backwards from `end` (inclusive) to `start` (inclusive) by setting `before` to the
/// earliest created_utc of the previous page. Stops on an empty page or once a page reaches
/// below `start`. Records outside [start, end] are dropped; the rest go to `sink` in fetched
/// order. Failed requests are retried with exponential backoff; after `max_attempts` a
/// CrawlError carries the cursor to resume from (pass it as `resume_before`).
CrawlSummary crawl_archive(const ArchiveClientConfig& config, std::int64_t start, std::int64_t end,
                           const PageFetcher& fetch, const RecordSink& sink,
                           std::optional<std::int64_t> resume_before = std::nullopt);

std::vector<nlohmann::json> crawl_archive(const ArchiveClientConfig& config, std::int64_t start,
                                          std::int64_t end, const PageFetcher& fetch);

}  // namespace wsb
