#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "da/cfg.hpp"
#include "da/expr.hpp"
#include "da/graph.hpp"

namespace da {

// The three satisfiability-preserving reductions, plus the model-level gadget
// transformations that justify them:
//   grammar nonuniversality  ->  expression over Sigma + V + {alpha, omega, X}
//   k-name vocabulary        ->  {b, c}
//   {b, c}                   ->  {a}
// All rewrites preserve the difference degree.

struct ReductionOutput {
    Vocabulary vocabulary;
    ExprPtr expression;
    // How source names were rewritten (or which fresh names were chosen).
    std::vector<std::pair<std::string, std::string>> name_map;
};

// The grammar encoding keeps its pieces visible: the whole expression is
// phi[0] - (phi[1] | ... | phi[7]), and tests poke at the phis one by one.
struct GrammarEncoding {
    Vocabulary vocabulary; // terminals, nonterminals, alpha, omega, chain
    ExprPtr expression;
    std::array<ExprPtr, 8> phi;
    std::string alpha;
    std::string omega;
    std::string chain; // the strict-order name, "X" unless taken
    std::vector<std::pair<std::string, std::string>> name_map;
};

GrammarEncoding grammar_encoding(const Grammar& g);
ReductionOutput grammar_to_expression(const Grammar& g);

// Finite structure on which the grammar encoding evaluates nonempty,
// built from a nonempty word outside the generated language. The domain is
// {0, 1, ..., n+1, inf}; construction is rejected if the word is generated.
Structure witness_structure(const Grammar& g, const Word& word);

// Replaces the i-th name of the vocabulary (1-based) by b (c & c^(i+1)) b
// with fresh b, c.
ReductionOutput reduce_to_two(const Expr& e, const Vocabulary& vocabulary);

// Gadget transformation matching reduce_to_two: each a_i edge (x, y) becomes
// a fresh b/c path-with-shortcut of i+2 inner nodes between x and y.
Structure model_to_two(const Structure& k);

// Inverse direction: reads each a_i relation off a {b, c} structure by
// evaluating the gadget expression.
Structure model_from_two(const Structure& j, const Vocabulary& vocabulary);

// Replaces the first name (b role) by a (a & a^2) a and the second (c role)
// by a (a & a^3) a, with a fresh.
ReductionOutput reduce_to_one(const Expr& e, const Vocabulary& two_names);

// Gadget transformation matching reduce_to_one: b edges become 3-node
// chains with a shortcut, c edges 4-node chains with a shortcut, all over a
// single relation. Roles are taken from the structure's vocabulary order.
Structure model_to_one(const Structure& i);

// Reads b and c off a single-name structure by evaluating the two gadget
// expressions.
Structure model_from_one(const Structure& j, const Vocabulary& two_names);

// reduce_to_one after reduce_to_two: any vocabulary down to a single name.
ReductionOutput reduce_full(const Expr& e, const Vocabulary& vocabulary);

// Fresh-name policy used throughout: append primes until the name is unused.
std::string fresh_name(std::string base, const std::set<std::string>& taken);

// The fresh {b, c} pair reduce_to_two/model_to_two derive from a vocabulary.
std::pair<std::string, std::string> two_name_pair(const Vocabulary& vocabulary);

// The fresh single name reduce_to_one/model_to_one derive from a two-name
// vocabulary.
std::string one_name(const Vocabulary& two_names);

} // namespace da
