#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "da/expr.hpp"

namespace da {

// Finite structures: edge-labeled directed graphs assigning a finite binary
// relation to every vocabulary name, plus the evaluation semantics over them.

using NodeId = std::uint32_t;
using NodePair = std::pair<NodeId, NodeId>;

// A finite set of ordered node pairs, kept sorted for canonical iteration.
class Relation {
public:
    Relation() = default;
    explicit Relation(std::vector<NodePair> pairs);

    const std::vector<NodePair>& pairs() const { return pairs_; }
    std::size_t size() const { return pairs_.size(); }
    bool empty() const { return pairs_.empty(); }
    bool contains(NodeId src, NodeId dst) const;
    void insert(NodeId src, NodeId dst);

    bool operator==(const Relation& other) const { return pairs_ == other.pairs_; }

    static Relation union_of(const Relation& a, const Relation& b);
    static Relation intersection_of(const Relation& a, const Relation& b);
    static Relation difference_of(const Relation& a, const Relation& b);
    // { (x,y) | exists z: (x,z) in a and (z,y) in b }
    static Relation composition_of(const Relation& a, const Relation& b);

private:
    std::vector<NodePair> pairs_; // sorted, unique
};

// Square boolean adjacency matrix over interned node indices; the second
// evaluation strategy works on these.
class BitMatrix {
public:
    explicit BitMatrix(std::size_t n);

    std::size_t dim() const { return n_; }
    bool test(std::size_t i, std::size_t j) const;
    void set(std::size_t i, std::size_t j);

    BitMatrix or_with(const BitMatrix& other) const;
    BitMatrix and_with(const BitMatrix& other) const;
    BitMatrix and_not(const BitMatrix& other) const;
    // boolean matrix product
    BitMatrix multiply(const BitMatrix& other) const;

    static BitMatrix from_relation(const Relation& r, std::size_t n);
    Relation to_relation() const;

private:
    std::size_t n_;
    std::size_t words_per_row_;
    std::vector<std::uint64_t> bits_;
};

struct Witness {
    NodeId src;
    NodeId dst;
};

class Structure {
public:
    Structure() = default;
    explicit Structure(const Vocabulary& vocabulary);

    // Node interning: tokens are opaque; ids are dense and per-structure.
    NodeId intern(std::string_view token);
    std::optional<NodeId> find_node(std::string_view token) const;
    const std::string& token(NodeId id) const;
    std::size_t node_count() const { return node_tokens_.size(); }

    // Adds the name to the vocabulary (with an empty relation) if absent.
    void declare(const std::string& name);
    void add_edge(const std::string& name, std::string_view src, std::string_view dst);
    void set_relation(const std::string& name, Relation r);

    const Vocabulary& vocabulary() const { return vocabulary_; }
    bool has_relation(std::string_view name) const;
    const Relation& relation(std::string_view name) const;

    // Nodes occurring as first or second component of some pair, sorted.
    std::vector<NodeId> active_domain() const;

    // Edge-list text form; round-trips through parse_structure.
    std::string to_text() const;

private:
    Vocabulary vocabulary_;
    std::vector<Relation> relations_; // parallel to vocabulary_.names()
    std::vector<std::string> node_tokens_;
    std::map<std::string, NodeId, std::less<>> node_ids_;
};

// One edge per line: `<relname> <src-token> <dst-token>`. `#` starts a
// comment; `@names a b c` declares names with (initially) empty relations.
Structure parse_structure(std::string_view text);

enum class EvalStrategy { Pairs, Matrix };

// The inductive semantics: atoms look up their relation; union, intersection
// and difference are set operations; composition is the relational join.
// Both strategies return identical pair sets.
Relation evaluate(const Expr& e, const Structure& structure,
                  EvalStrategy strategy = EvalStrategy::Pairs);

// Least pair of e(I) in interned-index order, or nullopt when e(I) is empty.
std::optional<Witness> is_satisfied(const Expr& e, const Structure& structure,
                                    EvalStrategy strategy = EvalStrategy::Pairs);

} // namespace da
