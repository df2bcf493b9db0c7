#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "da/error.hpp"

namespace da {

// Expressions over binary relation names, built with union, intersection,
// difference and composition. There is deliberately no identity, inverse,
// complement or closure operator.

enum class ExprKind : std::uint8_t { Atom, Union, Intersection, Difference, Composition };

class Expr;
using ExprPtr = std::shared_ptr<const Expr>;

class Expr {
public:
    ExprKind kind() const { return kind_; }
    bool is_atom() const { return kind_ == ExprKind::Atom; }

    // Atom nodes only.
    const std::string& name() const;

    // Binary nodes only.
    const ExprPtr& left() const;
    const ExprPtr& right() const;

    // Structural hash, computed once at construction.
    std::size_t hash() const { return hash_; }

    static ExprPtr atom(std::string name);
    static ExprPtr make(ExprKind op, ExprPtr left, ExprPtr right);

    static ExprPtr union_of(ExprPtr l, ExprPtr r) { return make(ExprKind::Union, std::move(l), std::move(r)); }
    static ExprPtr intersection_of(ExprPtr l, ExprPtr r) { return make(ExprKind::Intersection, std::move(l), std::move(r)); }
    static ExprPtr difference_of(ExprPtr l, ExprPtr r) { return make(ExprKind::Difference, std::move(l), std::move(r)); }
    static ExprPtr composition_of(ExprPtr l, ExprPtr r) { return make(ExprKind::Composition, std::move(l), std::move(r)); }

    // n-fold composition of e with itself, right-nested; n >= 1.
    static ExprPtr power_of(const ExprPtr& e, unsigned n);

private:
    Expr(ExprKind kind, std::string name, ExprPtr left, ExprPtr right);

    ExprKind kind_;
    std::string name_;
    ExprPtr left_;
    ExprPtr right_;
    std::size_t hash_;
};

// Structural equality (pointer equality is a shortcut, shared subtrees are common).
bool expr_equal(const Expr& a, const Expr& b);
bool expr_equal(const ExprPtr& a, const ExprPtr& b);

// Hash/equality adaptors for structural maps keyed by ExprPtr.
struct ExprPtrHash {
    std::size_t operator()(const ExprPtr& e) const { return e->hash(); }
};
struct ExprPtrEqual {
    bool operator()(const ExprPtr& a, const ExprPtr& b) const { return expr_equal(a, b); }
};

// Nesting depth of the difference operator: atoms 0; union, intersection
// and composition take the max of their children; difference adds one.
unsigned difference_degree(const Expr& e);

// Set of relation names occurring in e.
std::set<std::string> relation_names(const Expr& e);

// Whether any intersection node occurs in e.
bool uses_intersection(const Expr& e);

// Relation names are identifiers: [A-Za-z_][A-Za-z0-9_']*.
bool is_valid_rel_name(std::string_view name);

// An ordered list of distinct relation names. Order is significant: the
// vocabulary reductions index names by position.
class Vocabulary {
public:
    Vocabulary() = default;
    explicit Vocabulary(std::vector<std::string> names);

    const std::vector<std::string>& names() const { return names_; }
    std::size_t size() const { return names_.size(); }
    bool empty() const { return names_.empty(); }
    const std::string& at(std::size_t i) const { return names_.at(i); }

    bool contains(std::string_view name) const;
    // 0-based position, or nullopt.
    std::optional<std::size_t> index_of(std::string_view name) const;

private:
    std::vector<std::string> names_;
};

// Concrete syntax. Precedence, loosest first: union `|`, difference `-`,
// intersection `&`, composition (juxtaposition or `.`). `e^n` is sugar for
// the n-fold composition, n >= 1. `#` starts a comment.
ExprPtr parse_expression(std::string_view text);

// Minimal-parentheses rendering; parse_expression(render_expression(e))
// is structurally identical to e. Never emits `^`.
std::string render_expression(const Expr& e);
std::string render_expression(const ExprPtr& e);

// Canonical s-expression dump, used for golden tests and diagnostics.
std::string to_sexpr(const Expr& e);

} // namespace da
