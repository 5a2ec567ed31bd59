#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace wsb {

struct StringHash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
        return std::hash<std::string_view>{}(s);
    }
};

using StringSet = std::unordered_set<std::string, StringHash, std::equal_to<>>;
template <typename V>
using StringMap = std::unordered_map<std::string, V, StringHash, std::equal_to<>>;

/// Characters stripped from token edges, both for ticker detection and corpus statistics.
inline constexpr std::string_view kEdgePunctuation = ".,;:!?()[]{}\"'";

/// Whitespace split with edge punctuation removed; interior characters are kept
/// ("$AAPL," -> "$AAPL", "$GME's" stays as is). Views point into `text`.
std::vector<std::string_view> tokenize(std::string_view text);

/// Known symbols plus the short-token stop list that overrides them.
class TickerLexicon {
public:
    struct Entry {
        std::string name;
        std::string sector;  // empty when unknown
    };

    /// Adds a symbol after uppercasing. Returns false (and leaves the lexicon unchanged)
    /// for symbols that are not 1-5 ASCII letters.
    bool add_ticker(std::string_view symbol, std::string_view name = {}, std::string_view sector = {});
    void add_stopword(std::string_view token);

    /// Listed and not stop-listed.
    bool is_ticker(std::string_view symbol) const;
    bool is_listed(std::string_view symbol) const { return known_.contains(symbol); }
    bool is_stopword(std::string_view symbol) const { return stopwords_.contains(symbol); }
    std::optional<std::string_view> sector_of(std::string_view symbol) const;
    std::optional<std::string_view> name_of(std::string_view symbol) const;

    std::size_t size() const { return known_.size(); }
    std::size_t skipped_rows() const { return skipped_rows_; }
    void note_skipped_row() { ++skipped_rows_; }

private:
    StringMap<Entry> known_;
    StringSet stopwords_;
    std::size_t skipped_rows_ = 0;
};

bool is_valid_symbol(std::string_view symbol);

/// `ticker_table` is CSV with header symbol,name,sector. The ETF and stop lists hold one
/// symbol per line. Invalid symbols are skipped and counted in `skipped_rows()`.
/// Throws IoError for unreadable inputs and ConfigError when no valid ticker remains.
TickerLexicon load_lexicon(std::istream& ticker_table, std::istream& etf_list,
                           std::istream& stopword_list);
TickerLexicon load_lexicon(const std::filesystem::path& ticker_table,
                           const std::filesystem::path& etf_list,
                           const std::filesystem::path& stopword_list);

struct TickerMention {
    std::string symbol;
    bool dollar_prefixed = false;
    std::size_t token_index = 0;

    bool operator==(const TickerMention&) const = default;
};

/// Bare tokens count when they are 2-5 uppercase letters, listed, and not stop-listed.
/// "$" tokens count whenever 1-5 uppercase letters follow, listed or not.
std::vector<TickerMention> detect_tickers(std::string_view text, const TickerLexicon& lexicon);

struct TransactionCounts {
    std::int64_t buy = 0;
    std::int64_t hold = 0;
    std::int64_t sell = 0;
    std::int64_t call = 0;
    std::int64_t put = 0;

    TransactionCounts& operator+=(const TransactionCounts& o) {
        buy += o.buy;
        hold += o.hold;
        sell += o.sell;
        call += o.call;
        put += o.put;
        return *this;
    }
    bool empty() const { return buy == 0 && hold == 0 && sell == 0 && call == 0 && put == 0; }
    bool operator==(const TransactionCounts&) const = default;
};

enum class TransactionKind : std::uint8_t { Buy, Hold, Sell, Call, Put };

/// Lowercase word form -> keyword it folds into.
class TransactionWordTable {
public:
    /// buy/buys/buying/bought, sell/sells/selling/sold, hold/holds/holding/held,
    /// call/calls, put/puts.
    static const TransactionWordTable& standard();

    void add(std::string_view word, TransactionKind kind);
    std::optional<TransactionKind> lookup(std::string_view lowercase_word) const;
    std::size_t max_length() const { return max_length_; }

private:
    StringMap<TransactionKind> words_;
    std::size_t max_length_ = 0;
};

/// Case-insensitive whole-token matching after tokenize().
TransactionCounts count_transaction_words(
    std::string_view text, const TransactionWordTable& table = TransactionWordTable::standard());

}  // namespace wsb
