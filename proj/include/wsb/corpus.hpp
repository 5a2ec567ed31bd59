#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "wsb/date.hpp"
#include "wsb/lexer.hpp"

namespace wsb {

enum class BodyState { Absent, Empty, Deleted, Removed, Present };

struct Submission {
    std::string id;
    std::int64_t created_utc = 0;
    std::string title;
    std::optional<std::string> selftext;
    std::int64_t score = 0;
    std::optional<std::string> flair;
    std::optional<std::string> author;
    std::uint64_t num_comments = 0;

    /// Classifies selftext; "[deleted]" and "[removed]" map to their sentinel states.
    BodyState body_state() const;
    /// Body that carries real text (present, non-empty, not a sentinel).
    bool has_body_text() const { return body_state() == BodyState::Present; }
    /// Deleted by the author or removed by moderators.
    bool is_deleted() const;
    Date date() const { return Date::from_unix_seconds(created_utc); }
};

/// Throws ParseError (with byte offset) on malformed JSON and RecordRejected when
/// id, created_utc or a non-empty title is missing.
Submission parse_submission_record(std::string_view json_text);
Submission parse_submission_record(const nlohmann::json& record);

struct IngestLog {
    std::size_t lines = 0;
    std::size_t rejected = 0;
};

/// Reads JSON-lines; rejected records are skipped and counted, malformed JSON throws.
std::vector<Submission> read_submissions(const std::filesystem::path& path, IngestLog* log = nullptr);
/// Reads several files concurrently. Output order is file order, then line order.
std::vector<Submission> read_submissions(std::span<const std::filesystem::path> paths,
                                         IngestLog* log = nullptr);

struct Corpus {
    std::vector<Submission> submissions;  // ascending created_utc, ties by id
    DateRange range;
};

struct FilterOptions {
    std::int64_t min_score = 1;
    bool drop_deleted = true;
    DateRange range;
};

Corpus filter_corpus(std::vector<Submission> records, const FilterOptions& options);

struct CorpusStats {
    std::int64_t word_count_incl_sw = 0;
    std::int64_t word_count_excl_sw = 0;
    std::int64_t char_count_incl_sw = 0;
    std::int64_t char_count_excl_sw = 0;
    double avg_text_length_incl_sw = 0.0;
    double avg_text_length_excl_sw = 0.0;
    std::int64_t vocabulary_size = 0;
    std::int64_t text_count = 0;
    std::map<int, std::int64_t> texts_per_year;

    bool operator==(const CorpusStats&) const = default;
};

struct CorpusStatsPair {
    CorpusStats titles;
    CorpusStats bodies;
};

/// Stopwords must be lowercase. Uses OpenMP over submissions when available.
CorpusStatsPair corpus_stats(const Corpus& corpus, const StringSet& stopwords);

StringSet load_stopwords(const std::filesystem::path& path);

struct EngagementProfile {
    std::map<std::string, double> flair_ratio;  // over tagged submissions
    std::map<std::string, std::int64_t> flair_count;
    std::int64_t tagged_count = 0;
    std::int64_t untagged_count = 0;
    std::array<std::int64_t, 24> weekday_hours{};
    std::array<std::int64_t, 24> weekend_hours{};
};

EngagementProfile engagement_profile(const Corpus& corpus);

/// Counts UTF-8 code points.
std::int64_t utf8_length(std::string_view s);

}  // namespace wsb
