#include "da/reduce.hpp"

#include <algorithm>
#include <unordered_map>

namespace da {

std::string fresh_name(std::string base, const std::set<std::string>& taken) {
    while (taken.count(base)) base += '\'';
    return base;
}

// ---------------------------------------------------------------------------
// Grammar -> expression

namespace {

ExprPtr compose_all(const std::vector<ExprPtr>& parts) {
    ExprPtr acc = parts.front();
    for (std::size_t i = 1; i < parts.size(); ++i)
        acc = Expr::composition_of(acc, parts[i]);
    return acc;
}

ExprPtr union_all(const std::vector<ExprPtr>& parts) {
    ExprPtr acc = parts.front();
    for (std::size_t i = 1; i < parts.size(); ++i) acc = Expr::union_of(acc, parts[i]);
    return acc;
}

} // namespace

GrammarEncoding grammar_encoding(const Grammar& g) {
    std::set<std::string> taken;
    for (const auto& s : g.terminals()) taken.insert(s);
    for (const auto& s : g.nonterminals()) taken.insert(s);

    GrammarEncoding out;
    out.alpha = fresh_name("alpha", taken);
    taken.insert(out.alpha);
    out.omega = fresh_name("omega", taken);
    taken.insert(out.omega);
    out.chain = fresh_name("X", taken);
    taken.insert(out.chain);
    out.name_map = {{"alpha", out.alpha}, {"omega", out.omega}, {"X", out.chain}};

    std::vector<std::string> vocab;
    for (const auto& s : g.terminals()) vocab.push_back(s);
    for (const auto& s : g.nonterminals()) vocab.push_back(s);
    vocab.push_back(out.alpha);
    vocab.push_back(out.omega);
    vocab.push_back(out.chain);
    out.vocabulary = Vocabulary(std::move(vocab));

    const ExprPtr alpha = Expr::atom(out.alpha);
    const ExprPtr omega = Expr::atom(out.omega);
    const ExprPtr chain = Expr::atom(out.chain);

    std::unordered_map<std::string, ExprPtr> atoms;
    auto atom = [&atoms](const std::string& name) {
        auto it = atoms.find(name);
        if (it == atoms.end()) it = atoms.emplace(name, Expr::atom(name)).first;
        return it->second;
    };

    // The terminal alphabet as one expression: the union of its atoms.
    std::vector<ExprPtr> sigma_atoms;
    for (const auto& t : g.terminals()) sigma_atoms.push_back(atom(t));
    if (sigma_atoms.empty()) throw Error("grammar has no terminals");
    const ExprPtr sigma = union_all(sigma_atoms);

    out.phi[0] = compose_all({alpha, sigma, omega});
    out.phi[1] = compose_all({alpha, sigma, Expr::difference_of(omega, alpha)});
    out.phi[2] = Expr::composition_of(
        alpha, Expr::difference_of(Expr::composition_of(sigma, alpha), alpha));

    std::vector<ExprPtr> per_production;
    for (const auto& p : g.productions()) {
        std::vector<ExprPtr> body;
        for (const auto& s : p.body) body.push_back(atom(s));
        per_production.push_back(compose_all(
            {alpha, Expr::difference_of(compose_all(body), atom(p.head)), alpha}));
    }
    out.phi[3] = union_all(per_production);

    out.phi[4] = compose_all(
        {Expr::difference_of(alpha, Expr::composition_of(alpha, sigma)), atom(g.start()), omega});
    out.phi[5] = compose_all({alpha, Expr::difference_of(sigma, chain), alpha});
    out.phi[6] = compose_all(
        {alpha, Expr::difference_of(Expr::composition_of(chain, chain), chain), alpha});
    out.phi[7] = compose_all(
        {alpha, Expr::intersection_of(Expr::composition_of(chain, sigma), sigma), alpha});

    out.expression = Expr::difference_of(
        out.phi[0], union_all({out.phi[1], out.phi[2], out.phi[3], out.phi[4], out.phi[5],
                               out.phi[6], out.phi[7]}));
    return out;
}

ReductionOutput grammar_to_expression(const Grammar& g) {
    GrammarEncoding enc = grammar_encoding(g);
    return ReductionOutput{std::move(enc.vocabulary), std::move(enc.expression),
                           std::move(enc.name_map)};
}

// ---------------------------------------------------------------------------
// Witness structure

Structure witness_structure(const Grammar& g, const Word& word) {
    if (word.empty()) throw Error("witness words must be nonempty");
    CnfGrammar cnf = to_cnf(g);
    if (cyk_membership(cnf, word, g.start()))
        throw Error("word is generated by the grammar; no witness structure exists");

    GrammarEncoding enc = grammar_encoding(g);
    const int n = static_cast<int>(word.size());
    auto tok = [](int i) { return std::to_string(i); };
    const std::string inf = "inf";

    Structure s(enc.vocabulary);
    // alpha: fan-out from 0 to the word positions, fan-in from every
    // position (including n+1) to inf.
    for (int i = 1; i <= n; ++i) s.add_edge(enc.alpha, tok(0), tok(i));
    for (int i = 1; i <= n + 1; ++i) s.add_edge(enc.alpha, tok(i), inf);
    s.add_edge(enc.omega, tok(n + 1), inf);
    for (int i = 1; i <= n; ++i) s.add_edge(word[static_cast<std::size_t>(i - 1)], tok(i), tok(i + 1));
    // Strict order over positions 1..n+1.
    for (int i = 1; i <= n + 1; ++i)
        for (int j = i + 1; j <= n + 1; ++j) s.add_edge(enc.chain, tok(i), tok(j));
    // Derivation intervals per nonterminal.
    IntervalTable intervals = interval_table(g, word);
    for (const auto& [y, i, j] : intervals.entries()) s.add_edge(y, tok(i), tok(j));

    auto witness = is_satisfied(*enc.expression, s);
    if (!witness || s.token(witness->src) != "0" || s.token(witness->dst) != inf)
        throw Error("internal error: witness structure does not satisfy the grammar encoding");
    return s;
}

// ---------------------------------------------------------------------------
// Vocabulary reductions

namespace {

// Bottom-up rewrite of atoms, memoized over shared subtrees.
class AtomRewriter {
public:
    explicit AtomRewriter(std::unordered_map<std::string, ExprPtr> replacements)
        : replacements_(std::move(replacements)) {}

    ExprPtr rewrite(const ExprPtr& e) {
        if (auto it = memo_.find(e); it != memo_.end()) return it->second;
        ExprPtr out;
        if (e->is_atom()) {
            auto it = replacements_.find(e->name());
            if (it == replacements_.end())
                throw Error("relation name '" + e->name() + "' is not in the vocabulary");
            out = it->second;
        } else {
            out = Expr::make(e->kind(), rewrite(e->left()), rewrite(e->right()));
        }
        memo_.emplace(e, out);
        return out;
    }

private:
    std::unordered_map<std::string, ExprPtr> replacements_;
    std::unordered_map<ExprPtr, ExprPtr, ExprPtrHash, ExprPtrEqual> memo_;
};

ExprPtr two_name_gadget(const ExprPtr& b, const ExprPtr& c, std::size_t index_1based) {
    // b (c & c^(i+1)) b
    ExprPtr chain = Expr::power_of(c, static_cast<unsigned>(index_1based) + 1);
    return Expr::composition_of(Expr::composition_of(b, Expr::intersection_of(c, chain)), b);
}

ExprPtr one_name_gadget(const ExprPtr& a, unsigned power) {
    // a (a & a^power) a
    return Expr::composition_of(
        Expr::composition_of(a, Expr::intersection_of(a, Expr::power_of(a, power))), a);
}

std::string place_fresh_node(Structure& s, const std::string& base, std::set<std::string>& used) {
    std::string token = fresh_name(base, used);
    used.insert(token);
    s.intern(token);
    return token;
}

std::set<std::string> active_tokens(const Structure& s) {
    std::set<std::string> out;
    for (NodeId id : s.active_domain()) out.insert(s.token(id));
    return out;
}

} // namespace

std::pair<std::string, std::string> two_name_pair(const Vocabulary& vocabulary) {
    std::set<std::string> taken(vocabulary.names().begin(), vocabulary.names().end());
    std::string b = fresh_name("b", taken);
    taken.insert(b);
    std::string c = fresh_name("c", taken);
    return {b, c};
}

std::string one_name(const Vocabulary& two_names) {
    std::set<std::string> taken(two_names.names().begin(), two_names.names().end());
    return fresh_name("a", taken);
}

ReductionOutput reduce_to_two(const Expr& e, const Vocabulary& vocabulary) {
    if (vocabulary.empty()) throw Error("vocabulary must not be empty");
    auto [b_name, c_name] = two_name_pair(vocabulary);
    const ExprPtr b = Expr::atom(b_name);
    const ExprPtr c = Expr::atom(c_name);

    ReductionOutput out;
    out.vocabulary = Vocabulary({b_name, c_name});
    std::unordered_map<std::string, ExprPtr> map;
    for (std::size_t i = 0; i < vocabulary.size(); ++i) {
        ExprPtr gadget = two_name_gadget(b, c, i + 1);
        map.emplace(vocabulary.at(i), gadget);
        out.name_map.emplace_back(vocabulary.at(i), render_expression(gadget));
    }
    ExprPtr root(std::shared_ptr<const Expr>(), &e);
    out.expression = AtomRewriter(std::move(map)).rewrite(root);
    return out;
}

Structure model_to_two(const Structure& k) {
    auto [b_name, c_name] = two_name_pair(k.vocabulary());
    Structure j(Vocabulary({b_name, c_name}));
    std::set<std::string> used = active_tokens(k);

    for (std::size_t idx = 0; idx < k.vocabulary().size(); ++idx) {
        const std::string& name = k.vocabulary().at(idx);
        const std::size_t inner = idx + 1 + 2; // i+2 fresh nodes for the i-th name
        for (const auto& [x, y] : k.relation(name).pairs()) {
            const std::string& xt = k.token(x);
            const std::string& yt = k.token(y);
            std::vector<std::string> u;
            for (std::size_t t = 1; t <= inner; ++t)
                u.push_back(place_fresh_node(
                    j, "u_" + name + "_" + xt + "_" + yt + "_" + std::to_string(t), used));
            j.add_edge(b_name, xt, u.front());
            j.add_edge(b_name, u.back(), yt);
            for (std::size_t t = 0; t + 1 < u.size(); ++t) j.add_edge(c_name, u[t], u[t + 1]);
            j.add_edge(c_name, u.front(), u.back());
        }
    }
    return j;
}

Structure model_from_two(const Structure& j, const Vocabulary& vocabulary) {
    auto [b_name, c_name] = two_name_pair(vocabulary);
    Structure padded = j;
    padded.declare(b_name);
    padded.declare(c_name);

    const ExprPtr b = Expr::atom(b_name);
    const ExprPtr c = Expr::atom(c_name);
    Structure k(vocabulary);
    for (std::size_t i = 0; i < vocabulary.size(); ++i) {
        Relation r = evaluate(*two_name_gadget(b, c, i + 1), padded);
        for (const auto& [s, d] : r.pairs())
            k.add_edge(vocabulary.at(i), padded.token(s), padded.token(d));
    }
    return k;
}

ReductionOutput reduce_to_one(const Expr& e, const Vocabulary& two_names) {
    if (two_names.size() != 2)
        throw Error("the single-name reduction starts from exactly two names");
    for (const auto& name : relation_names(e))
        if (!two_names.contains(name))
            throw Error("relation name '" + name + "' is not in the two-name vocabulary");

    std::string a_name = one_name(two_names);
    const ExprPtr a = Expr::atom(a_name);

    ReductionOutput out;
    out.vocabulary = Vocabulary({a_name});
    ExprPtr b_gadget = one_name_gadget(a, 2);
    ExprPtr c_gadget = one_name_gadget(a, 3);
    out.name_map.emplace_back(two_names.at(0), render_expression(b_gadget));
    out.name_map.emplace_back(two_names.at(1), render_expression(c_gadget));

    std::unordered_map<std::string, ExprPtr> map;
    map.emplace(two_names.at(0), std::move(b_gadget));
    map.emplace(two_names.at(1), std::move(c_gadget));
    ExprPtr root(std::shared_ptr<const Expr>(), &e);
    out.expression = AtomRewriter(std::move(map)).rewrite(root);
    return out;
}

Structure model_to_one(const Structure& i) {
    if (i.vocabulary().size() > 2)
        throw Error("the single-name gadget expects a structure over at most two names");
    std::string a_name = one_name(i.vocabulary());
    Structure j(Vocabulary({a_name}));
    std::set<std::string> used = active_tokens(i);

    for (std::size_t idx = 0; idx < i.vocabulary().size(); ++idx) {
        const std::string& name = i.vocabulary().at(idx);
        const std::size_t inner = idx == 0 ? 3 : 4; // b role: 3 fresh nodes, c role: 4
        for (const auto& [x, y] : i.relation(name).pairs()) {
            const std::string& xt = i.token(x);
            const std::string& yt = i.token(y);
            std::vector<std::string> u;
            for (std::size_t t = 1; t <= inner; ++t)
                u.push_back(place_fresh_node(
                    j, "u_" + name + "_" + xt + "_" + yt + "_" + std::to_string(t), used));
            j.add_edge(a_name, xt, u.front());
            for (std::size_t t = 0; t + 1 < u.size(); ++t) j.add_edge(a_name, u[t], u[t + 1]);
            j.add_edge(a_name, u.back(), yt);
            j.add_edge(a_name, u.front(), u.back());
        }
    }
    return j;
}

Structure model_from_one(const Structure& j, const Vocabulary& two_names) {
    if (two_names.size() != 2)
        throw Error("the single-name reduction uses exactly two target names");
    std::string a_name = one_name(two_names);
    Structure padded = j;
    padded.declare(a_name);

    const ExprPtr a = Expr::atom(a_name);
    Structure out(two_names);
    for (std::size_t idx = 0; idx < 2; ++idx) {
        Relation r = evaluate(*one_name_gadget(a, idx == 0 ? 2 : 3), padded);
        for (const auto& [s, d] : r.pairs())
            out.add_edge(two_names.at(idx), padded.token(s), padded.token(d));
    }
    return out;
}

ReductionOutput reduce_full(const Expr& e, const Vocabulary& vocabulary) {
    ReductionOutput two = reduce_to_two(e, vocabulary);
    ReductionOutput one = reduce_to_one(*two.expression, two.vocabulary);

    ReductionOutput out;
    out.vocabulary = one.vocabulary;
    out.expression = one.expression;
    // Report the composed rewrite per source name.
    std::unordered_map<std::string, ExprPtr> stage2;
    std::string a_name = one_name(two.vocabulary);
    const ExprPtr a = Expr::atom(a_name);
    stage2.emplace(two.vocabulary.at(0), one_name_gadget(a, 2));
    stage2.emplace(two.vocabulary.at(1), one_name_gadget(a, 3));
    AtomRewriter rewriter(std::move(stage2));
    const ExprPtr b = Expr::atom(two.vocabulary.at(0));
    const ExprPtr c = Expr::atom(two.vocabulary.at(1));
    for (std::size_t i = 0; i < vocabulary.size(); ++i) {
        ExprPtr composed = rewriter.rewrite(two_name_gadget(b, c, i + 1));
        out.name_map.emplace_back(vocabulary.at(i), render_expression(composed));
    }
    return out;
}

} // namespace da
