#include "da/graph.hpp"

#include <algorithm>
#include <bit>
#include <sstream>
#include <unordered_map>

namespace da {

// ---------------------------------------------------------------------------
// Relation

Relation::Relation(std::vector<NodePair> pairs) : pairs_(std::move(pairs)) {
    std::sort(pairs_.begin(), pairs_.end());
    pairs_.erase(std::unique(pairs_.begin(), pairs_.end()), pairs_.end());
}

bool Relation::contains(NodeId src, NodeId dst) const {
    return std::binary_search(pairs_.begin(), pairs_.end(), NodePair{src, dst});
}

void Relation::insert(NodeId src, NodeId dst) {
    NodePair p{src, dst};
    auto it = std::lower_bound(pairs_.begin(), pairs_.end(), p);
    if (it == pairs_.end() || *it != p) pairs_.insert(it, p);
}

Relation Relation::union_of(const Relation& a, const Relation& b) {
    std::vector<NodePair> out;
    out.reserve(a.pairs_.size() + b.pairs_.size());
    std::set_union(a.pairs_.begin(), a.pairs_.end(), b.pairs_.begin(), b.pairs_.end(),
                   std::back_inserter(out));
    Relation r;
    r.pairs_ = std::move(out);
    return r;
}

Relation Relation::intersection_of(const Relation& a, const Relation& b) {
    std::vector<NodePair> out;
    std::set_intersection(a.pairs_.begin(), a.pairs_.end(), b.pairs_.begin(), b.pairs_.end(),
                          std::back_inserter(out));
    Relation r;
    r.pairs_ = std::move(out);
    return r;
}

Relation Relation::difference_of(const Relation& a, const Relation& b) {
    std::vector<NodePair> out;
    std::set_difference(a.pairs_.begin(), a.pairs_.end(), b.pairs_.begin(), b.pairs_.end(),
                        std::back_inserter(out));
    Relation r;
    r.pairs_ = std::move(out);
    return r;
}

Relation Relation::composition_of(const Relation& a, const Relation& b) {
    std::vector<NodePair> out;
    for (const auto& [x, z] : a.pairs_) {
        auto lo = std::lower_bound(b.pairs_.begin(), b.pairs_.end(), NodePair{z, 0});
        for (auto it = lo; it != b.pairs_.end() && it->first == z; ++it)
            out.emplace_back(x, it->second);
    }
    return Relation(std::move(out));
}

// ---------------------------------------------------------------------------
// BitMatrix

BitMatrix::BitMatrix(std::size_t n)
    : n_(n), words_per_row_((n + 63) / 64), bits_(n * words_per_row_, 0) {}

bool BitMatrix::test(std::size_t i, std::size_t j) const {
    return (bits_[i * words_per_row_ + j / 64] >> (j % 64)) & 1u;
}

void BitMatrix::set(std::size_t i, std::size_t j) {
    bits_[i * words_per_row_ + j / 64] |= std::uint64_t{1} << (j % 64);
}

BitMatrix BitMatrix::or_with(const BitMatrix& other) const {
    BitMatrix out(n_);
    for (std::size_t w = 0; w < bits_.size(); ++w) out.bits_[w] = bits_[w] | other.bits_[w];
    return out;
}

BitMatrix BitMatrix::and_with(const BitMatrix& other) const {
    BitMatrix out(n_);
    for (std::size_t w = 0; w < bits_.size(); ++w) out.bits_[w] = bits_[w] & other.bits_[w];
    return out;
}

BitMatrix BitMatrix::and_not(const BitMatrix& other) const {
    BitMatrix out(n_);
    for (std::size_t w = 0; w < bits_.size(); ++w) out.bits_[w] = bits_[w] & ~other.bits_[w];
    return out;
}

BitMatrix BitMatrix::multiply(const BitMatrix& other) const {
    BitMatrix out(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        const std::uint64_t* row = &bits_[i * words_per_row_];
        std::uint64_t* out_row = &out.bits_[i * words_per_row_];
        for (std::size_t w = 0; w < words_per_row_; ++w) {
            std::uint64_t word = row[w];
            while (word) {
                std::size_t k = w * 64 + static_cast<std::size_t>(std::countr_zero(word));
                word &= word - 1;
                const std::uint64_t* k_row = &other.bits_[k * words_per_row_];
                for (std::size_t v = 0; v < words_per_row_; ++v) out_row[v] |= k_row[v];
            }
        }
    }
    return out;
}

BitMatrix BitMatrix::from_relation(const Relation& r, std::size_t n) {
    BitMatrix m(n);
    for (const auto& [i, j] : r.pairs()) m.set(i, j);
    return m;
}

Relation BitMatrix::to_relation() const {
    std::vector<NodePair> pairs;
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t w = 0; w < words_per_row_; ++w) {
            std::uint64_t word = bits_[i * words_per_row_ + w];
            while (word) {
                std::size_t j = w * 64 + static_cast<std::size_t>(std::countr_zero(word));
                word &= word - 1;
                pairs.emplace_back(static_cast<NodeId>(i), static_cast<NodeId>(j));
            }
        }
    return Relation(std::move(pairs));
}

// ---------------------------------------------------------------------------
// Structure

Structure::Structure(const Vocabulary& vocabulary) : vocabulary_(vocabulary) {
    relations_.resize(vocabulary_.size());
}

NodeId Structure::intern(std::string_view token) {
    auto it = node_ids_.find(token);
    if (it != node_ids_.end()) return it->second;
    NodeId id = static_cast<NodeId>(node_tokens_.size());
    node_tokens_.emplace_back(token);
    node_ids_.emplace(node_tokens_.back(), id);
    return id;
}

std::optional<NodeId> Structure::find_node(std::string_view token) const {
    auto it = node_ids_.find(token);
    if (it == node_ids_.end()) return std::nullopt;
    return it->second;
}

const std::string& Structure::token(NodeId id) const {
    return node_tokens_.at(id);
}

void Structure::declare(const std::string& name) {
    if (vocabulary_.contains(name)) return;
    std::vector<std::string> names = vocabulary_.names();
    names.push_back(name);
    vocabulary_ = Vocabulary(std::move(names));
    relations_.emplace_back();
}

void Structure::add_edge(const std::string& name, std::string_view src, std::string_view dst) {
    declare(name);
    NodeId s = intern(src);
    NodeId d = intern(dst);
    relations_[*vocabulary_.index_of(name)].insert(s, d);
}

void Structure::set_relation(const std::string& name, Relation r) {
    declare(name);
    relations_[*vocabulary_.index_of(name)] = std::move(r);
}

bool Structure::has_relation(std::string_view name) const {
    return vocabulary_.contains(name);
}

const Relation& Structure::relation(std::string_view name) const {
    auto idx = vocabulary_.index_of(name);
    if (!idx) throw Error("unknown relation name: '" + std::string(name) + "'");
    return relations_[*idx];
}

std::vector<NodeId> Structure::active_domain() const {
    std::vector<NodeId> out;
    for (const auto& rel : relations_)
        for (const auto& [s, d] : rel.pairs()) {
            out.push_back(s);
            out.push_back(d);
        }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::string Structure::to_text() const {
    std::ostringstream out;
    if (!vocabulary_.empty()) {
        out << "@names";
        for (const auto& n : vocabulary_.names()) out << ' ' << n;
        out << '\n';
    }
    for (std::size_t i = 0; i < relations_.size(); ++i)
        for (const auto& [s, d] : relations_[i].pairs())
            out << vocabulary_.names()[i] << ' ' << token(s) << ' ' << token(d) << '\n';
    return out.str();
}

Structure parse_structure(std::string_view text) {
    Structure s;
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

        if (toks[0] == "@names") {
            for (std::size_t i = 1; i < toks.size(); ++i) {
                if (!is_valid_rel_name(toks[i]))
                    throw ParseError(line_no, 0, "invalid relation name '" + toks[i] + "'");
                s.declare(toks[i]);
            }
            continue;
        }
        if (toks.size() != 3)
            throw ParseError(line_no, 0, "expected `<relname> <src> <dst>`, got " +
                                             std::to_string(toks.size()) + " tokens");
        if (!is_valid_rel_name(toks[0]))
            throw ParseError(line_no, 0, "invalid relation name '" + toks[0] + "'");
        s.add_edge(toks[0], toks[1], toks[2]);
    }
    return s;
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

template <typename Value>
using ExprMemo = std::unordered_map<ExprPtr, Value, ExprPtrHash, ExprPtrEqual>;

// Wraps the raw recursion so subresults are shared across structurally equal
// subtrees within one evaluate() call.
Relation eval_pairs(const ExprPtr& e, const Structure& s, ExprMemo<Relation>& memo) {
    if (auto it = memo.find(e); it != memo.end()) return it->second;
    Relation out;
    switch (e->kind()) {
        case ExprKind::Atom: out = s.relation(e->name()); break;
        case ExprKind::Union:
            out = Relation::union_of(eval_pairs(e->left(), s, memo), eval_pairs(e->right(), s, memo));
            break;
        case ExprKind::Intersection:
            out = Relation::intersection_of(eval_pairs(e->left(), s, memo),
                                            eval_pairs(e->right(), s, memo));
            break;
        case ExprKind::Difference:
            out = Relation::difference_of(eval_pairs(e->left(), s, memo),
                                          eval_pairs(e->right(), s, memo));
            break;
        case ExprKind::Composition:
            out = Relation::composition_of(eval_pairs(e->left(), s, memo),
                                           eval_pairs(e->right(), s, memo));
            break;
    }
    memo.emplace(e, out);
    return out;
}

BitMatrix eval_matrix(const ExprPtr& e, const Structure& s, std::size_t n,
                      ExprMemo<BitMatrix>& memo) {
    if (auto it = memo.find(e); it != memo.end()) return it->second;
    BitMatrix out(n);
    switch (e->kind()) {
        case ExprKind::Atom: out = BitMatrix::from_relation(s.relation(e->name()), n); break;
        case ExprKind::Union:
            out = eval_matrix(e->left(), s, n, memo).or_with(eval_matrix(e->right(), s, n, memo));
            break;
        case ExprKind::Intersection:
            out = eval_matrix(e->left(), s, n, memo).and_with(eval_matrix(e->right(), s, n, memo));
            break;
        case ExprKind::Difference:
            out = eval_matrix(e->left(), s, n, memo).and_not(eval_matrix(e->right(), s, n, memo));
            break;
        case ExprKind::Composition:
            out = eval_matrix(e->left(), s, n, memo).multiply(eval_matrix(e->right(), s, n, memo));
            break;
    }
    memo.emplace(e, out);
    return out;
}

} // namespace

Relation evaluate(const Expr& e, const Structure& structure, EvalStrategy strategy) {
    // Aliasing shared_ptr: memo keys point into the caller's tree.
    ExprPtr root(std::shared_ptr<const Expr>(), &e);
    for (const auto& name : relation_names(e))
        if (!structure.has_relation(name))
            throw Error("unknown relation name: '" + name + "'");
    if (strategy == EvalStrategy::Pairs) {
        ExprMemo<Relation> memo;
        return eval_pairs(root, structure, memo);
    }
    ExprMemo<BitMatrix> memo;
    return eval_matrix(root, structure, structure.node_count(), memo).to_relation();
}

std::optional<Witness> is_satisfied(const Expr& e, const Structure& structure,
                                    EvalStrategy strategy) {
    Relation r = evaluate(e, structure, strategy);
    if (r.empty()) return std::nullopt;
    return Witness{r.pairs().front().first, r.pairs().front().second};
}

} // namespace da
