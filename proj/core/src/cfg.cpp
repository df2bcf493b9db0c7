#include "da/cfg.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "da/expr.hpp"

namespace da {

Grammar::Grammar(std::string start, std::vector<Production> productions,
                 std::vector<std::string> extra_terminals,
                 std::vector<std::string> extra_nonterminals)
    : start_(std::move(start)) {
    if (productions.empty()) throw Error("grammar needs at least one production");
    for (const auto& p : productions) {
        if (p.body.empty())
            throw Error("empty production for '" + p.head + "': empty bodies are not allowed");
        if (!is_valid_rel_name(p.head)) throw Error("invalid symbol '" + p.head + "'");
        for (const auto& s : p.body)
            if (!is_valid_rel_name(s)) throw Error("invalid symbol '" + s + "'");
        if (std::find(productions_.begin(), productions_.end(), p) == productions_.end())
            productions_.push_back(p);
        nonterminals_.insert(p.head);
    }
    nonterminals_.insert(start_);
    for (const auto& n : extra_nonterminals) {
        if (!is_valid_rel_name(n)) throw Error("invalid symbol '" + n + "'");
        nonterminals_.insert(n);
    }
    for (const auto& p : productions_)
        for (const auto& s : p.body)
            if (!nonterminals_.count(s)) terminals_.insert(s);
    for (const auto& t : extra_terminals) {
        if (!is_valid_rel_name(t)) throw Error("invalid symbol '" + t + "'");
        if (nonterminals_.count(t))
            throw Error("declared terminal '" + t + "' is also a nonterminal");
        terminals_.insert(t);
    }
}

bool Grammar::is_terminal(std::string_view symbol) const {
    return terminals_.count(std::string(symbol)) > 0;
}

Grammar parse_grammar(std::string_view text) {
    std::vector<Production> productions;
    std::vector<std::string> extra_terminals;
    std::string start;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos
                                                                               : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;

        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

        std::vector<std::string> toks;
        std::istringstream in{std::string(line)};
        for (std::string t; in >> t;) toks.push_back(std::move(t));
        if (toks.empty()) continue;

        if (toks[0] == "@terminals") {
            for (std::size_t i = 1; i < toks.size(); ++i) {
                if (!is_valid_rel_name(toks[i]))
                    throw ParseError(line_no, 0, "invalid symbol '" + toks[i] + "'");
                extra_terminals.push_back(toks[i]);
            }
            continue;
        }
        if (toks.size() < 2 || toks[1] != "->")
            throw ParseError(line_no, 0, "expected `Head -> body | body`");
        const std::string& head = toks[0];
        if (!is_valid_rel_name(head))
            throw ParseError(line_no, 0, "invalid symbol '" + head + "'");
        if (start.empty()) start = head;

        std::vector<std::string> body;
        bool saw_alternative = false;
        auto flush = [&] {
            if (body.empty())
                throw ParseError(line_no, 0, "empty production for '" + head + "'");
            productions.push_back({head, body});
            body.clear();
        };
        for (std::size_t i = 2; i < toks.size(); ++i) {
            if (toks[i] == "|") {
                flush();
                saw_alternative = true;
            } else {
                if (!is_valid_rel_name(toks[i]))
                    throw ParseError(line_no, 0, "invalid symbol '" + toks[i] + "'");
                body.push_back(toks[i]);
            }
        }
        (void)saw_alternative;
        flush();
    }
    if (productions.empty()) throw ParseError(line_no, 0, "no productions");
    try {
        return Grammar(start, std::move(productions), std::move(extra_terminals));
    } catch (const Error& e) {
        throw ParseError(line_no, 0, e.what());
    }
}

// ---------------------------------------------------------------------------
// Chomsky normal form

namespace {

std::string fresh_symbol(std::string base, const std::set<std::string>& taken) {
    while (taken.count(base)) base += '\'';
    return base;
}

} // namespace

CnfGrammar to_cnf(const Grammar& g) {
    std::set<std::string> taken;
    for (const auto& s : g.terminals()) taken.insert(s);
    for (const auto& s : g.nonterminals()) taken.insert(s);

    // Lift terminals out of long bodies.
    std::map<std::string, std::string> lift; // terminal -> fresh nonterminal
    std::vector<Production> work;
    for (const auto& p : g.productions()) {
        if (p.body.size() == 1) {
            work.push_back(p);
            continue;
        }
        Production q{p.head, {}};
        for (const auto& s : p.body) {
            if (g.is_terminal(s)) {
                auto it = lift.find(s);
                if (it == lift.end()) {
                    std::string fresh = fresh_symbol("N_" + s, taken);
                    taken.insert(fresh);
                    it = lift.emplace(s, fresh).first;
                }
                q.body.push_back(it->second);
            } else {
                q.body.push_back(s);
            }
        }
        work.push_back(std::move(q));
    }
    for (const auto& [terminal, fresh] : lift) work.push_back({fresh, {terminal}});

    // Binarize long bodies.
    std::vector<Production> binarized;
    unsigned counter = 0;
    for (const auto& p : work) {
        if (p.body.size() <= 2) {
            binarized.push_back(p);
            continue;
        }
        std::string head = p.head;
        for (std::size_t i = 0; i + 2 < p.body.size(); ++i) {
            std::string fresh = fresh_symbol("B" + std::to_string(counter++), taken);
            taken.insert(fresh);
            binarized.push_back({head, {p.body[i], fresh}});
            head = fresh;
        }
        binarized.push_back({head, {p.body[p.body.size() - 2], p.body.back()}});
    }

    // Eliminate unit productions (head -> single nonterminal).
    std::set<std::string> nts;
    for (const auto& p : binarized) nts.insert(p.head);
    nts.insert(g.start());
    auto is_unit = [&](const Production& p) {
        return p.body.size() == 1 && nts.count(p.body[0]) > 0;
    };

    std::map<std::string, std::vector<std::string>> unit_closure;
    for (const auto& a : nts) {
        std::vector<std::string> order{a};
        std::set<std::string> seen{a};
        for (std::size_t i = 0; i < order.size(); ++i)
            for (const auto& p : binarized)
                if (p.head == order[i] && is_unit(p) && seen.insert(p.body[0]).second)
                    order.push_back(p.body[0]);
        unit_closure[a] = std::move(order);
    }

    std::vector<Production> final_prods;
    auto push_unique = [&](Production p) {
        if (std::find(final_prods.begin(), final_prods.end(), p) == final_prods.end())
            final_prods.push_back(std::move(p));
    };
    for (const auto& p : binarized)
        if (!is_unit(p)) push_unique(p);
    for (const auto& a : nts)
        for (const auto& b : unit_closure[a]) {
            if (b == a) continue;
            for (const auto& p : binarized)
                if (p.head == b && !is_unit(p)) push_unique({a, p.body});
        }

    if (final_prods.empty())
        throw Error("grammar collapses to nothing under unit elimination");
    // Original nonterminals stay nonterminals even when every production
    // they had was an eliminated unit cycle (their language is empty).
    std::vector<std::string> alphabet(g.terminals().begin(), g.terminals().end());
    std::vector<std::string> keep_nts(g.nonterminals().begin(), g.nonterminals().end());
    return CnfGrammar(
        Grammar(g.start(), std::move(final_prods), std::move(alphabet), std::move(keep_nts)));
}

CnfGrammar::CnfGrammar(Grammar grammar) : grammar_(std::move(grammar)) {
    std::map<std::string, std::size_t> ids;
    for (const auto& n : grammar_.nonterminals()) {
        ids[n] = nt_names_.size();
        nt_names_.push_back(n);
    }
    for (const auto& p : grammar_.productions()) {
        if (p.body.size() == 1 && grammar_.is_terminal(p.body[0])) {
            terminal_.emplace_back(ids.at(p.head), p.body[0]);
        } else if (p.body.size() == 2 && !grammar_.is_terminal(p.body[0]) &&
                   !grammar_.is_terminal(p.body[1])) {
            binary_.emplace_back(ids.at(p.head), ids.at(p.body[0]), ids.at(p.body[1]));
        } else {
            throw Error("production '" + p.head + " -> ...' is not in Chomsky normal form");
        }
    }
}

std::optional<std::size_t> CnfGrammar::nonterminal_id(std::string_view name) const {
    for (std::size_t i = 0; i < nt_names_.size(); ++i)
        if (nt_names_[i] == name) return i;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// CYK

namespace {

// cell(pos, len) = bitset of nonterminals deriving word[pos .. pos+len-1]
class CykTable {
public:
    CykTable(const CnfGrammar& g, const Word& word) : n_(word.size()), nts_(g.nonterminal_count()) {
        words_per_cell_ = (nts_ + 63) / 64;
        bits_.assign(n_ * n_ * words_per_cell_, 0);

        for (std::size_t pos = 0; pos < n_; ++pos) {
            if (!g.grammar().is_terminal(word[pos]))
                throw Error("word symbol '" + word[pos] + "' is not a terminal of the grammar");
            for (const auto& [head, b] : g.terminal_rules())
                if (b == word[pos]) set(pos, 1, head);
        }
        for (std::size_t len = 2; len <= n_; ++len)
            for (std::size_t pos = 0; pos + len <= n_; ++pos)
                for (std::size_t split = 1; split < len; ++split)
                    for (const auto& [head, l, r] : g.binary_rules())
                        if (test(pos, split, l) && test(pos + split, len - split, r))
                            set(pos, len, head);
    }

    bool test(std::size_t pos, std::size_t len, std::size_t nt) const {
        return (bits_[cell(pos, len) + nt / 64] >> (nt % 64)) & 1u;
    }

private:
    void set(std::size_t pos, std::size_t len, std::size_t nt) {
        bits_[cell(pos, len) + nt / 64] |= std::uint64_t{1} << (nt % 64);
    }

    std::size_t cell(std::size_t pos, std::size_t len) const {
        return ((len - 1) * n_ + pos) * words_per_cell_;
    }

    std::size_t n_;
    std::size_t nts_;
    std::size_t words_per_cell_;
    std::vector<std::uint64_t> bits_;
};

} // namespace

bool cyk_membership(const CnfGrammar& g, const Word& word, const std::string& from) {
    if (word.empty()) throw Error("empty words are excluded");
    auto id = g.nonterminal_id(from);
    if (!id) throw Error("unknown nonterminal '" + from + "'");
    CykTable table(g, word);
    return table.test(0, word.size(), *id);
}

IntervalTable interval_table(const Grammar& g, const Word& word) {
    if (word.empty()) throw Error("empty words are excluded");
    CnfGrammar cnf = to_cnf(g);
    CykTable table(cnf, word);
    std::set<std::tuple<std::string, int, int>> entries;
    for (const auto& y : g.nonterminals()) {
        auto id = cnf.nonterminal_id(y);
        if (!id) continue;
        for (std::size_t pos = 0; pos < word.size(); ++pos)
            for (std::size_t len = 1; pos + len <= word.size(); ++len)
                if (table.test(pos, len, *id))
                    entries.insert({y, static_cast<int>(pos + 1), static_cast<int>(pos + len + 1)});
    }
    return IntervalTable(word, std::move(entries));
}

std::optional<Word> find_nonmember_word(const Grammar& g, unsigned max_length) {
    if (g.terminals().empty()) throw Error("grammar has no terminals");
    if (max_length == 0) throw Error("max_length must be at least 1");
    std::vector<std::string> sigma(g.terminals().begin(), g.terminals().end());
    CnfGrammar cnf = to_cnf(g);
    auto start_id = cnf.nonterminal_id(g.start());

    for (unsigned len = 1; len <= max_length; ++len) {
        std::vector<std::size_t> odometer(len, 0);
        for (;;) {
            Word word;
            word.reserve(len);
            for (std::size_t i = 0; i < len; ++i) word.push_back(sigma[odometer[i]]);
            if (!start_id || !cyk_membership(cnf, word, g.start())) return word;

            std::size_t i = len;
            while (i > 0) {
                if (++odometer[i - 1] < sigma.size()) break;
                odometer[i - 1] = 0;
                --i;
            }
            if (i == 0) break;
        }
    }
    return std::nullopt;
}

} // namespace da
