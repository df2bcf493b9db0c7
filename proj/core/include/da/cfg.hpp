#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "da/error.hpp"

namespace da {

// Context-free grammars without empty productions. "Universal" here means
// every nonempty string over the terminal alphabet is generated; the empty
// word never takes part in anything.

using Word = std::vector<std::string>;

struct Production {
    std::string head;
    std::vector<std::string> body; // nonempty

    bool operator==(const Production& other) const {
        return head == other.head && body == other.body;
    }
};

class Grammar {
public:
    // Nonterminals are the production heads plus the start symbol (plus any
    // declared `extra_nonterminals`, which may generate nothing); every
    // other body symbol is a terminal. `extra_terminals` extends the
    // alphabet beyond the symbols that occur (a word outside the language
    // may use letters no production mentions). Duplicates are dropped.
    Grammar(std::string start, std::vector<Production> productions,
            std::vector<std::string> extra_terminals = {},
            std::vector<std::string> extra_nonterminals = {});

    const std::set<std::string>& terminals() const { return terminals_; }
    const std::set<std::string>& nonterminals() const { return nonterminals_; }
    const std::string& start() const { return start_; }
    const std::vector<Production>& productions() const { return productions_; }

    bool is_terminal(std::string_view symbol) const;

private:
    std::string start_;
    std::vector<Production> productions_;
    std::set<std::string> terminals_;
    std::set<std::string> nonterminals_;
};

// Lines `Head -> body | body`, symbols whitespace-separated, `#` comments.
// The first head is the start symbol. Empty bodies are rejected. An optional
// `@terminals a b` line declares alphabet symbols that occur in no production.
Grammar parse_grammar(std::string_view text);

// Chomsky normal form: every production is `head -> nonterminal nonterminal`
// or `head -> terminal`. Derivable languages of the original nonterminals
// are preserved.
class CnfGrammar {
public:
    explicit CnfGrammar(Grammar grammar);

    const Grammar& grammar() const { return grammar_; }

    // Interned view used by the CYK table.
    std::size_t nonterminal_count() const { return nt_names_.size(); }
    std::optional<std::size_t> nonterminal_id(std::string_view name) const;
    const std::string& nonterminal_name(std::size_t id) const { return nt_names_.at(id); }
    const std::vector<std::tuple<std::size_t, std::size_t, std::size_t>>& binary_rules() const {
        return binary_;
    }
    const std::vector<std::pair<std::size_t, std::string>>& terminal_rules() const {
        return terminal_;
    }

private:
    Grammar grammar_;
    std::vector<std::string> nt_names_;
    std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> binary_; // head -> l r
    std::vector<std::pair<std::size_t, std::string>> terminal_;             // head -> b
};

CnfGrammar to_cnf(const Grammar& g);

// True iff the (nonempty) word derives from `from`. Errors on symbols
// outside the grammar's terminal alphabet and on the empty word.
bool cyk_membership(const CnfGrammar& g, const Word& word, const std::string& from);

// All (Y, i, j) with 1 <= i < j <= n+1 such that the subword from position i
// through j-1 derives from the original nonterminal Y.
class IntervalTable {
public:
    IntervalTable(Word word, std::set<std::tuple<std::string, int, int>> entries)
        : word_(std::move(word)), entries_(std::move(entries)) {}

    const Word& word() const { return word_; }
    const std::set<std::tuple<std::string, int, int>>& entries() const { return entries_; }
    bool contains(const std::string& nonterminal, int i, int j) const {
        return entries_.count({nonterminal, i, j}) > 0;
    }

private:
    Word word_;
    std::set<std::tuple<std::string, int, int>> entries_;
};

IntervalTable interval_table(const Grammar& g, const Word& word);

// Length-lexicographically least nonempty word outside the generated
// language, up to max_length; terminals ordered lexicographically.
std::optional<Word> find_nonmember_word(const Grammar& g, unsigned max_length);

} // namespace da
