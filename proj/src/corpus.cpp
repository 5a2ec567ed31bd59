#include "wsb/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <nlohmann/json.hpp>

#include "wsb/error.hpp"
#include "wsb/parallel.hpp"
#include "wsb/text_io.hpp"

namespace wsb {

namespace {

using nlohmann::json;

std::optional<std::string> optional_string(const json& record, const char* key) {
    auto it = record.find(key);
    if (it == record.end() || it->is_null()) return std::nullopt;
    if (it->is_string()) return it->get<std::string>();
    return it->dump();
}

std::optional<std::int64_t> optional_integer(const json& record, const char* key) {
    auto it = record.find(key);
    if (it == record.end() || it->is_null()) return std::nullopt;
    if (it->is_number_integer()) return it->get<std::int64_t>();
    if (it->is_number_unsigned()) return static_cast<std::int64_t>(it->get<std::uint64_t>());
    if (it->is_number_float()) return static_cast<std::int64_t>(it->get<double>());
    if (it->is_string()) {
        try {
            return parse_int(it->get_ref<const std::string&>());
        } catch (const FormatError&) {
            return std::nullopt;
        }
    }
    return std::nullopt;
}

}  // namespace

BodyState Submission::body_state() const {
    if (!selftext) return BodyState::Absent;
    if (*selftext == "[deleted]") return BodyState::Deleted;
    if (*selftext == "[removed]") return BodyState::Removed;
    if (trim(*selftext).empty()) return BodyState::Empty;
    return BodyState::Present;
}

bool Submission::is_deleted() const {
    const auto state = body_state();
    return state == BodyState::Deleted || state == BodyState::Removed ||
           (author && *author == "[deleted]");
}

Submission parse_submission_record(const json& record) {
    if (!record.is_object()) throw RecordRejected("submission record is not a JSON object", std::nullopt);

    Submission s;
    auto id = optional_string(record, "id");
    if (!id || id->empty()) throw RecordRejected("submission record without id", std::nullopt);
    s.id = std::move(*id);

    auto created = optional_integer(record, "created_utc");
    if (!created) throw RecordRejected("submission " + s.id + " has no created_utc", s.id);
    if (*created <= 0) throw RecordRejected("submission " + s.id + " has non-positive created_utc", s.id);
    s.created_utc = *created;

    auto title = optional_string(record, "title");
    if (!title || trim(*title).empty()) {
        throw RecordRejected("submission " + s.id + " has no title", s.id);
    }
    s.title = std::move(*title);

    s.selftext = optional_string(record, "selftext");
    s.score = optional_integer(record, "score").value_or(0);
    s.flair = optional_string(record, "flair");
    if (!s.flair) s.flair = optional_string(record, "link_flair_text");
    if (s.flair && trim(*s.flair).empty()) s.flair.reset();
    s.author = optional_string(record, "author");
    s.num_comments = static_cast<std::uint64_t>(std::max<std::int64_t>(
        0, optional_integer(record, "num_comments").value_or(0)));
    return s;
}

Submission parse_submission_record(std::string_view json_text) {
    json record;
    try {
        record = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what(), e.byte);
    }
    return parse_submission_record(record);
}

std::vector<Submission> read_submissions(const std::filesystem::path& path, IngestLog* log) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open corpus file " + path.string());
    std::vector<Submission> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        if (log) ++log->lines;
        try {
            out.push_back(parse_submission_record(std::string_view(line)));
        } catch (const RecordRejected&) {
            if (log) ++log->rejected;
        } catch (const ParseError& e) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + e.what(),
                             e.offset());
        }
    }
    return out;
}

std::vector<Submission> read_submissions(std::span<const std::filesystem::path> paths,
                                         IngestLog* log) {
    const auto n = static_cast<std::ptrdiff_t>(paths.size());
    std::vector<std::vector<Submission>> parts(paths.size());
    std::vector<IngestLog> logs(paths.size());
    std::vector<std::exception_ptr> errors(paths.size());

#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        try {
            parts[k] = read_submissions(paths[k], &logs[k]);
        } catch (...) {
            errors[k] = std::current_exception();
        }
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    std::vector<Submission> out;
    for (std::size_t k = 0; k < parts.size(); ++k) {
        if (log) {
            log->lines += logs[k].lines;
            log->rejected += logs[k].rejected;
        }
        std::move(parts[k].begin(), parts[k].end(), std::back_inserter(out));
    }
    return out;
}

Corpus filter_corpus(std::vector<Submission> records, const FilterOptions& options) {
    const std::int64_t lo = options.range.first_second();
    const std::int64_t hi = options.range.last_second();
    std::erase_if(records, [&](const Submission& s) {
        if (s.score < options.min_score) return true;
        if (s.created_utc < lo || s.created_utc > hi) return true;
        return options.drop_deleted && s.is_deleted();
    });
    std::sort(records.begin(), records.end(), [](const Submission& a, const Submission& b) {
        if (a.created_utc != b.created_utc) return a.created_utc < b.created_utc;
        return a.id < b.id;
    });
    return Corpus{std::move(records), options.range};
}

std::int64_t utf8_length(std::string_view s) {
    std::int64_t n = 0;
    for (char c : s) {
        if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++n;
    }
    return n;
}

namespace {

struct StatsAccumulator {
    CorpusStats stats;
    StringSet vocabulary;

    void add_text(std::string_view text, int year, const StringSet& stopwords) {
        ++stats.text_count;
        ++stats.texts_per_year[year];
        std::string lowered;
        for (std::string_view tok : tokenize(text)) {
            const std::int64_t chars = utf8_length(tok);
            ++stats.word_count_incl_sw;
            stats.char_count_incl_sw += chars;
            lowered = to_lower_ascii(tok);
            if (stopwords.contains(lowered)) continue;
            ++stats.word_count_excl_sw;
            stats.char_count_excl_sw += chars;
            vocabulary.insert(lowered);
        }
    }

    void merge(StatsAccumulator&& other) {
        stats.word_count_incl_sw += other.stats.word_count_incl_sw;
        stats.word_count_excl_sw += other.stats.word_count_excl_sw;
        stats.char_count_incl_sw += other.stats.char_count_incl_sw;
        stats.char_count_excl_sw += other.stats.char_count_excl_sw;
        stats.text_count += other.stats.text_count;
        for (const auto& [year, n] : other.stats.texts_per_year) stats.texts_per_year[year] += n;
        vocabulary.merge(other.vocabulary);
    }

    CorpusStats finish() {
        stats.vocabulary_size = static_cast<std::int64_t>(vocabulary.size());
        if (stats.text_count > 0) {
            const auto texts = static_cast<double>(stats.text_count);
            stats.avg_text_length_incl_sw = static_cast<double>(stats.word_count_incl_sw) / texts;
            stats.avg_text_length_excl_sw = static_cast<double>(stats.word_count_excl_sw) / texts;
        }
        return stats;
    }
};

}  // namespace

CorpusStatsPair corpus_stats(const Corpus& corpus, const StringSet& stopwords) {
    const auto& subs = corpus.submissions;
    const auto n = static_cast<std::ptrdiff_t>(subs.size());
    std::vector<StatsAccumulator> titles(static_cast<std::size_t>(max_threads()));
    std::vector<StatsAccumulator> bodies(titles.size());

#pragma omp parallel
    {
        const auto t = static_cast<std::size_t>(thread_index());
#pragma omp for schedule(static)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            const Submission& s = subs[static_cast<std::size_t>(i)];
            const int year = s.date().year();
            titles[t].add_text(s.title, year, stopwords);
            if (s.has_body_text()) bodies[t].add_text(*s.selftext, year, stopwords);
        }
    }

    for (std::size_t t = 1; t < titles.size(); ++t) {
        titles[0].merge(std::move(titles[t]));
        bodies[0].merge(std::move(bodies[t]));
    }
    return CorpusStatsPair{titles[0].finish(), bodies[0].finish()};
}

StringSet load_stopwords(const std::filesystem::path& path) {
    StringSet out;
    for (auto& w : read_word_list(path)) out.insert(to_lower_ascii(w));
    return out;
}

EngagementProfile engagement_profile(const Corpus& corpus) {
    EngagementProfile p;
    for (const Submission& s : corpus.submissions) {
        if (s.flair) {
            ++p.flair_count[*s.flair];
            ++p.tagged_count;
        } else {
            ++p.untagged_count;
        }
        const std::int64_t seconds_of_day =
            s.created_utc - static_cast<std::int64_t>(s.date().days_since_epoch()) * 86400;
        const auto hour = static_cast<std::size_t>(seconds_of_day / 3600);
        if (s.date().is_weekend()) {
            ++p.weekend_hours[hour];
        } else {
            ++p.weekday_hours[hour];
        }
    }
    for (const auto& [flair, count] : p.flair_count) {
        p.flair_ratio[flair] = static_cast<double>(count) / static_cast<double>(p.tagged_count);
    }
    return p;
}

}  // namespace wsb
