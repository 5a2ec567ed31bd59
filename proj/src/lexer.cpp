#include "wsb/lexer.hpp"

#include <algorithm>
#include <fstream>

#include "wsb/error.hpp"
#include "wsb/text_io.hpp"

namespace wsb {

namespace {

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_edge_punct(char c) { return kEdgePunctuation.find(c) != std::string_view::npos; }

bool is_upper_alpha(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (c < 'A' || c > 'Z') return false;
    }
    return true;
}

}  // namespace

std::vector<std::string_view> tokenize(std::string_view text) {
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        while (i < n && is_space(text[i])) ++i;
        std::size_t j = i;
        while (j < n && !is_space(text[j])) ++j;
        std::size_t b = i;
        std::size_t e = j;
        while (b < e && is_edge_punct(text[b])) ++b;
        while (e > b && is_edge_punct(text[e - 1])) --e;
        if (e > b) tokens.push_back(text.substr(b, e - b));
        i = j;
    }
    return tokens;
}

bool is_valid_symbol(std::string_view symbol) {
    return symbol.size() >= 1 && symbol.size() <= 5 && is_upper_alpha(symbol);
}

bool TickerLexicon::add_ticker(std::string_view symbol, std::string_view name,
                               std::string_view sector) {
    std::string upper = to_upper_ascii(trim(symbol));
    if (!is_valid_symbol(upper)) return false;
    auto& entry = known_[std::move(upper)];
    if (!name.empty()) entry.name = std::string(trim(name));
    if (!sector.empty()) entry.sector = std::string(trim(sector));
    return true;
}

void TickerLexicon::add_stopword(std::string_view token) {
    std::string upper = to_upper_ascii(trim(token));
    if (!upper.empty()) stopwords_.insert(std::move(upper));
}

bool TickerLexicon::is_ticker(std::string_view symbol) const {
    return known_.contains(symbol) && !stopwords_.contains(symbol);
}

std::optional<std::string_view> TickerLexicon::sector_of(std::string_view symbol) const {
    auto it = known_.find(symbol);
    if (it == known_.end() || it->second.sector.empty()) return std::nullopt;
    return std::string_view(it->second.sector);
}

std::optional<std::string_view> TickerLexicon::name_of(std::string_view symbol) const {
    auto it = known_.find(symbol);
    if (it == known_.end() || it->second.name.empty()) return std::nullopt;
    return std::string_view(it->second.name);
}

TickerLexicon load_lexicon(std::istream& ticker_table, std::istream& etf_list,
                           std::istream& stopword_list) {
    TickerLexicon lex;

    std::string line;
    std::size_t line_no = 0;
    int symbol_col = -1;
    int name_col = -1;
    int sector_col = -1;
    while (std::getline(ticker_table, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto fields = split_csv_line(line);
        if (symbol_col < 0) {
            for (std::size_t i = 0; i < fields.size(); ++i) {
                const std::string h = to_lower_ascii(trim(fields[i]));
                if (h == "symbol") symbol_col = static_cast<int>(i);
                if (h == "name") name_col = static_cast<int>(i);
                if (h == "sector") sector_col = static_cast<int>(i);
            }
            if (symbol_col < 0) throw FormatError("ticker table has no 'symbol' column", line_no);
            continue;
        }
        auto field = [&](int col) -> std::string_view {
            return col >= 0 && static_cast<std::size_t>(col) < fields.size()
                       ? std::string_view(fields[static_cast<std::size_t>(col)])
                       : std::string_view{};
        };
        if (!lex.add_ticker(field(symbol_col), field(name_col), field(sector_col))) {
            lex.note_skipped_row();
        }
    }

    for (const auto& symbol : read_word_list(etf_list)) {
        if (!lex.add_ticker(symbol)) lex.note_skipped_row();
    }
    for (const auto& word : read_word_list(stopword_list)) lex.add_stopword(word);

    if (lex.size() == 0) throw ConfigError("ticker lexicon contains no valid symbols");
    return lex;
}

TickerLexicon load_lexicon(const std::filesystem::path& ticker_table,
                           const std::filesystem::path& etf_list,
                           const std::filesystem::path& stopword_list) {
    std::ifstream table(ticker_table);
    if (!table) throw IoError("cannot open ticker table " + ticker_table.string());
    std::ifstream etfs(etf_list);
    if (!etfs) throw IoError("cannot open ETF list " + etf_list.string());
    std::ifstream stops(stopword_list);
    if (!stops) throw IoError("cannot open ticker stop list " + stopword_list.string());
    return load_lexicon(table, etfs, stops);
}

std::vector<TickerMention> detect_tickers(std::string_view text, const TickerLexicon& lexicon) {
    std::vector<TickerMention> mentions;
    const auto tokens = tokenize(text);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const std::string_view tok = tokens[i];
        if (tok.front() == '$') {
            const std::string_view rest = tok.substr(1);
            if (is_valid_symbol(rest)) mentions.push_back({std::string(rest), true, i});
        } else if (tok.size() >= 2 && tok.size() <= 5 && is_upper_alpha(tok) &&
                   lexicon.is_ticker(tok)) {
            mentions.push_back({std::string(tok), false, i});
        }
    }
    return mentions;
}

const TransactionWordTable& TransactionWordTable::standard() {
    static const TransactionWordTable table = [] {
        TransactionWordTable t;
        for (auto w : {"buy", "buys", "buying", "bought"}) t.add(w, TransactionKind::Buy);
        for (auto w : {"sell", "sells", "selling", "sold"}) t.add(w, TransactionKind::Sell);
        for (auto w : {"hold", "holds", "holding", "held"}) t.add(w, TransactionKind::Hold);
        for (auto w : {"call", "calls"}) t.add(w, TransactionKind::Call);
        for (auto w : {"put", "puts"}) t.add(w, TransactionKind::Put);
        return t;
    }();
    return table;
}

void TransactionWordTable::add(std::string_view word, TransactionKind kind) {
    words_[to_lower_ascii(word)] = kind;
    max_length_ = std::max(max_length_, word.size());
}

std::optional<TransactionKind> TransactionWordTable::lookup(std::string_view lowercase_word) const {
    auto it = words_.find(lowercase_word);
    if (it == words_.end()) return std::nullopt;
    return it->second;
}

TransactionCounts count_transaction_words(std::string_view text,
                                          const TransactionWordTable& table) {
    TransactionCounts counts;
    std::string lowered;
    for (std::string_view tok : tokenize(text)) {
        if (tok.size() > table.max_length()) continue;
        lowered = to_lower_ascii(tok);
        auto kind = table.lookup(lowered);
        if (!kind) continue;
        switch (*kind) {
            case TransactionKind::Buy: ++counts.buy; break;
            case TransactionKind::Hold: ++counts.hold; break;
            case TransactionKind::Sell: ++counts.sell; break;
            case TransactionKind::Call: ++counts.call; break;
            case TransactionKind::Put: ++counts.put; break;
        }
    }
    return counts;
}

}  // namespace wsb
