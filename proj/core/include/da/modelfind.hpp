#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "da/expr.hpp"
#include "da/graph.hpp"

namespace da {

// Bounded finite-satisfiability checking. There is no decision procedure to
// be had here, only search up to a domain-size bound, via exhaustive
// enumeration or a propositional encoding solved by the built-in solver.

enum class Backend { Enumeration, Cnf };

struct Bounds {
    unsigned max_domain_size = 1;
    std::uint64_t budget_ms = 0; // per-size wall-clock budget; 0 = unlimited
};

struct SatReport {
    enum class Verdict : std::uint8_t {
        Sat,      // model + witness attached, re-verified by evaluation
        UnsatUpTo, // every domain size up to `size` exhausted
        Timeout   // sizes up to `size` exhausted, the next one was cut short
    };

    Verdict verdict;
    Backend backend;
    unsigned size = 0;
    std::optional<Structure> model;
    std::optional<Witness> witness;
    std::uint64_t explored = 0; // candidate structures or solver decisions
    std::string note;           // budget/guard detail for Timeout
};

// Propositional encoding of "e has a nonempty result on some structure with
// domain {0..m-1}". Variables are annotated so models decode to structures.
struct VarAnnotation {
    enum class Role : std::uint8_t { Base, Defined, Aux };
    Role role;
    int ref;   // Base: index into base_names; Defined/Aux: subexpression id
    int i, j;  // pair coordinates
    int k;     // Aux only: middle element, else -1
};

class CnfFormula {
public:
    CnfFormula() = default;
    explicit CnfFormula(int variable_count) : variable_count_(variable_count) {}

    int variable_count() const { return variable_count_; }
    void set_variable_count(int n);
    int new_variable();

    const std::vector<std::vector<int>>& clauses() const { return clauses_; }
    void add_clause(std::vector<int> literals);

    // Annotation: present on encoder output, empty on hand-built formulas.
    unsigned domain_size() const { return domain_size_; }
    const std::vector<std::string>& base_names() const { return base_names_; }
    const std::vector<std::string>& subexpr_texts() const { return subexpr_texts_; }
    const std::vector<VarAnnotation>& annotations() const { return annotations_; }

    void set_annotation_header(unsigned domain_size, std::vector<std::string> base_names,
                               std::vector<std::string> subexpr_texts);
    void annotate(int variable, VarAnnotation a);

private:
    int variable_count_ = 0;
    std::vector<std::vector<int>> clauses_;
    unsigned domain_size_ = 0;
    std::vector<std::string> base_names_;
    std::vector<std::string> subexpr_texts_;
    std::vector<VarAnnotation> annotations_; // indexed by variable - 1
};

struct SolveResult {
    enum class Status : std::uint8_t { Sat, Unsat, Budget };
    Status status;
    std::vector<std::uint8_t> assignment; // 1-based; meaningful when Sat
    std::uint64_t decisions = 0;
};

// Exhaustive search over all structures with domain {0..m-1} for
// m = 1..max_domain_size, in a fixed deterministic order. Refuses sizes
// whose assignment space exceeds 28 bits; use the cnf backend there.
SatReport enumerate_models(const Expr& e, const Bounds& bounds);

// Tseitin-style encoding: one base variable per (name, i, j), one defined
// variable per distinct subexpression and pair, conjunction auxiliaries for
// composition, and a top-level nonemptiness clause.
CnfFormula encode_cnf(const Expr& e, unsigned domain_size);

// Complete DPLL/CDCL search with watched literals; deterministic branching
// (lowest unassigned variable first, false before true). Budget exhaustion
// is reported distinctly from unsatisfiability.
SolveResult solve_cnf(const CnfFormula& f, std::uint64_t budget_ms = 0);

// Reads the structure a satisfying assignment describes off the base
// variables. The formula must carry annotations.
Structure decode_model(const CnfFormula& f, const std::vector<std::uint8_t>& assignment);

// Size-by-size search with the chosen backend. Every reported model is
// re-verified with evaluate() before the verdict goes out.
SatReport check_finite_sat(const Expr& e, const Bounds& bounds, Backend backend);

// Standard DIMACS CNF; annotations ride along as `c` comment lines.
std::string export_dimacs(const CnfFormula& f);

// Parses DIMACS text (comments ignored, annotations not reconstructed).
CnfFormula parse_dimacs(std::string_view text);

} // namespace da
