#include "da/modelfind.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <sstream>
#include <unordered_map>

namespace da {

namespace {

constexpr unsigned kEnumerationBitLimit = 28;
constexpr int kCnfVariableLimit = 1 << 24;

std::vector<std::string> sorted_names(const Expr& e) {
    auto names = relation_names(e);
    return std::vector<std::string>(names.begin(), names.end());
}

void preorder_names(const Expr& e, std::vector<std::string>& order, std::set<std::string>& seen) {
    if (e.is_atom()) {
        if (seen.insert(e.name()).second) order.push_back(e.name());
        return;
    }
    preorder_names(*e.left(), order, seen);
    preorder_names(*e.right(), order, seen);
}

// Base-variable blocks are laid out in first-occurrence order. The solver
// branches lowest-variable-first, so names that gate the expression's
// outermost chain get decided early; conflicts then stay local and the
// learned clauses short. On the grammar encodings this ordering is worth
// orders of magnitude over an alphabetical layout.
std::vector<std::string> first_use_names(const Expr& e) {
    std::vector<std::string> order;
    std::set<std::string> seen;
    preorder_names(e, order, seen);
    return order;
}

} // namespace

// ---------------------------------------------------------------------------
// Enumeration backend

SatReport enumerate_models(const Expr& e, const Bounds& bounds) {
    if (bounds.max_domain_size < 1) throw Error("max domain size must be at least 1");
    const std::vector<std::string> names = sorted_names(e);
    if (names.empty()) throw Error("expression mentions no relation names");

    SatReport report;
    report.backend = Backend::Enumeration;
    std::uint64_t candidates = 0;

    for (unsigned m = 1; m <= bounds.max_domain_size; ++m) {
        const unsigned bits = static_cast<unsigned>(names.size()) * m * m;
        if (bits > kEnumerationBitLimit) {
            report.verdict = SatReport::Verdict::Timeout;
            report.size = m - 1;
            report.explored = candidates;
            report.note = "enumeration guard: " + std::to_string(names.size()) + " names at size " +
                          std::to_string(m) + " need " + std::to_string(bits) +
                          " assignment bits (limit " + std::to_string(kEnumerationBitLimit) +
                          "); use the cnf backend";
            return report;
        }

        std::optional<std::chrono::steady_clock::time_point> deadline;
        if (bounds.budget_ms > 0)
            deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(bounds.budget_ms);

        Structure base;
        for (const auto& n : names) base.declare(n);
        for (unsigned i = 0; i < m; ++i) base.intern(std::to_string(i));

        const std::uint64_t total = std::uint64_t{1} << bits;
        for (std::uint64_t counter = 0; counter < total; ++counter) {
            if ((counter & 1023) == 0 && deadline &&
                std::chrono::steady_clock::now() > *deadline) {
                report.verdict = SatReport::Verdict::Timeout;
                report.size = m - 1;
                report.explored = candidates;
                report.note = "enumeration budget exhausted at size " + std::to_string(m);
                return report;
            }

            // Symmetry breaking: element k may appear only if k-1 does, i.e.
            // the set of active elements is a prefix of {0..m-1}.
            std::uint32_t active = 0;
            for (std::uint64_t rest = counter; rest;) {
                unsigned b = static_cast<unsigned>(std::countr_zero(rest));
                rest &= rest - 1;
                unsigned pair = b % (m * m);
                active |= std::uint32_t{1} << (pair / m);
                active |= std::uint32_t{1} << (pair % m);
            }
            if ((active & (active + 1)) != 0) continue;

            for (std::size_t r = 0; r < names.size(); ++r) {
                std::vector<NodePair> pairs;
                std::uint64_t block = (counter >> (r * m * m)) & ((std::uint64_t{1} << (m * m)) - 1);
                while (block) {
                    unsigned b = static_cast<unsigned>(std::countr_zero(block));
                    block &= block - 1;
                    pairs.emplace_back(b / m, b % m);
                }
                base.set_relation(names[r], Relation(std::move(pairs)));
            }

            ++candidates;
            if (auto witness = is_satisfied(e, base)) {
                report.verdict = SatReport::Verdict::Sat;
                report.size = m;
                report.model = base;
                report.witness = witness;
                report.explored = candidates;
                return report;
            }
        }
    }

    report.verdict = SatReport::Verdict::UnsatUpTo;
    report.size = bounds.max_domain_size;
    report.explored = candidates;
    return report;
}

// ---------------------------------------------------------------------------
// CNF encoding

namespace {

struct Encoder {
    const unsigned m;
    std::vector<std::string> names;
    std::vector<ExprPtr> subexprs; // post-order, children before parents
    std::unordered_map<ExprPtr, int, ExprPtrHash, ExprPtrEqual> subexpr_ids;
    std::vector<int> defined_base;     // subexpr id -> first defined var - 1, or 0 for atoms
    std::vector<int> aux_base;         // subexpr id -> first aux var - 1 (compositions only)
    std::vector<int> atom_name_index;  // subexpr id -> index into names for atoms
    CnfFormula formula;

    explicit Encoder(unsigned domain_size) : m(domain_size) {}

    void collect(const ExprPtr& e) {
        if (subexpr_ids.count(e)) return;
        if (!e->is_atom()) {
            collect(e->left());
            collect(e->right());
        }
        int id = static_cast<int>(subexprs.size());
        subexpr_ids.emplace(e, id);
        subexprs.push_back(e);
    }

    int base_var(int name_index, unsigned i, unsigned j) const {
        return 1 + name_index * static_cast<int>(m * m) + static_cast<int>(i * m + j);
    }

    // defined_base/aux_base hold the first variable of the block
    int y_var(const ExprPtr& e, unsigned i, unsigned j) const {
        int id = subexpr_ids.at(e);
        if (subexprs[static_cast<std::size_t>(id)]->is_atom())
            return base_var(atom_name_index[static_cast<std::size_t>(id)], i, j);
        return defined_base[static_cast<std::size_t>(id)] + static_cast<int>(i * m + j);
    }

    int aux_var(int id, unsigned i, unsigned k, unsigned j) const {
        return aux_base[static_cast<std::size_t>(id)] + static_cast<int>((i * m + k) * m + j);
    }
};

} // namespace

CnfFormula encode_cnf(const Expr& e, unsigned domain_size) {
    if (domain_size < 1) throw Error("domain size must be at least 1");
    Encoder enc(domain_size);
    ExprPtr root(std::shared_ptr<const Expr>(), &e);
    enc.names = first_use_names(e);
    enc.collect(root);

    const unsigned m = domain_size;
    const std::uint64_t m2 = std::uint64_t{1} * m * m;

    // Layout: base variables first, then per-subexpression blocks.
    std::uint64_t next = 1 + enc.names.size() * m2;
    enc.defined_base.assign(enc.subexprs.size(), 0);
    enc.aux_base.assign(enc.subexprs.size(), 0);
    enc.atom_name_index.assign(enc.subexprs.size(), -1);
    for (std::size_t id = 0; id < enc.subexprs.size(); ++id) {
        const ExprPtr& s = enc.subexprs[id];
        if (s->is_atom()) {
            auto it = std::find(enc.names.begin(), enc.names.end(), s->name());
            enc.atom_name_index[id] = static_cast<int>(it - enc.names.begin());
            continue;
        }
        enc.defined_base[id] = static_cast<int>(next);
        next += m2;
        if (s->kind() == ExprKind::Composition) {
            enc.aux_base[id] = static_cast<int>(next);
            next += m2 * m;
        }
    }
    if (next - 1 > static_cast<std::uint64_t>(kCnfVariableLimit))
        throw Error("cnf guard: encoding needs " + std::to_string(next - 1) +
                    " variables (limit " + std::to_string(kCnfVariableLimit) + ")");

    CnfFormula& f = enc.formula;
    f.set_variable_count(static_cast<int>(next - 1));

    std::vector<std::string> subexpr_texts;
    subexpr_texts.reserve(enc.subexprs.size());
    for (const auto& s : enc.subexprs) subexpr_texts.push_back(render_expression(s));
    f.set_annotation_header(m, enc.names, std::move(subexpr_texts));

    for (std::size_t nm = 0; nm < enc.names.size(); ++nm)
        for (unsigned i = 0; i < m; ++i)
            for (unsigned j = 0; j < m; ++j)
                f.annotate(enc.base_var(static_cast<int>(nm), i, j),
                           {VarAnnotation::Role::Base, static_cast<int>(nm), static_cast<int>(i),
                            static_cast<int>(j), -1});

    for (std::size_t id = 0; id < enc.subexprs.size(); ++id) {
        const ExprPtr& s = enc.subexprs[id];
        if (s->is_atom()) continue;
        for (unsigned i = 0; i < m; ++i)
            for (unsigned j = 0; j < m; ++j) {
                int y = enc.y_var(s, i, j);
                f.annotate(y, {VarAnnotation::Role::Defined, static_cast<int>(id),
                               static_cast<int>(i), static_cast<int>(j), -1});
                int l = enc.y_var(s->left(), i, j);
                int r = enc.y_var(s->right(), i, j);
                switch (s->kind()) {
                    case ExprKind::Union:
                        f.add_clause({-y, l, r});
                        f.add_clause({-l, y});
                        f.add_clause({-r, y});
                        break;
                    case ExprKind::Intersection:
                        f.add_clause({-y, l});
                        f.add_clause({-y, r});
                        f.add_clause({y, -l, -r});
                        break;
                    case ExprKind::Difference:
                        f.add_clause({-y, l});
                        f.add_clause({-y, -r});
                        f.add_clause({y, -l, r});
                        break;
                    case ExprKind::Composition: {
                        std::vector<int> any{-y};
                        for (unsigned k = 0; k < m; ++k) {
                            int a = enc.aux_var(static_cast<int>(id), i, k, j);
                            int lk = enc.y_var(s->left(), i, k);
                            int rk = enc.y_var(s->right(), k, j);
                            f.annotate(a, {VarAnnotation::Role::Aux, static_cast<int>(id),
                                           static_cast<int>(i), static_cast<int>(j),
                                           static_cast<int>(k)});
                            f.add_clause({-a, lk});
                            f.add_clause({-a, rk});
                            f.add_clause({a, -lk, -rk});
                            f.add_clause({-a, y});
                            any.push_back(a);
                        }
                        f.add_clause(std::move(any));
                        break;
                    }
                    case ExprKind::Atom: break;
                }
            }
    }

    // Nonemptiness of the whole expression.
    std::vector<int> top;
    top.reserve(m2);
    for (unsigned i = 0; i < m; ++i)
        for (unsigned j = 0; j < m; ++j) top.push_back(enc.y_var(root, i, j));
    f.add_clause(std::move(top));

    return std::move(enc.formula);
}

Structure decode_model(const CnfFormula& f, const std::vector<std::uint8_t>& assignment) {
    if (f.annotations().empty()) throw Error("formula carries no annotation; cannot decode");
    Structure s;
    for (const auto& name : f.base_names()) s.declare(name);
    for (unsigned i = 0; i < f.domain_size(); ++i) s.intern(std::to_string(i));
    for (int v = 1; v <= f.variable_count(); ++v) {
        const VarAnnotation& a = f.annotations()[static_cast<std::size_t>(v - 1)];
        if (a.role != VarAnnotation::Role::Base || a.ref < 0) continue;
        if (static_cast<std::size_t>(v) < assignment.size() && assignment[static_cast<std::size_t>(v)])
            s.add_edge(f.base_names()[static_cast<std::size_t>(a.ref)], std::to_string(a.i),
                       std::to_string(a.j));
    }
    return s;
}

// ---------------------------------------------------------------------------
// Size-by-size driver

SatReport check_finite_sat(const Expr& e, const Bounds& bounds, Backend backend) {
    if (backend == Backend::Enumeration) return enumerate_models(e, bounds);

    SatReport report;
    report.backend = Backend::Cnf;
    std::uint64_t decisions = 0;
    for (unsigned m = 1; m <= bounds.max_domain_size; ++m) {
        CnfFormula f;
        try {
            f = encode_cnf(e, m);
        } catch (const Error& guard) {
            report.verdict = SatReport::Verdict::Timeout;
            report.size = m - 1;
            report.explored = decisions;
            report.note = guard.what();
            return report;
        }
        SolveResult r = solve_cnf(f, bounds.budget_ms);
        decisions += r.decisions;
        if (r.status == SolveResult::Status::Budget) {
            report.verdict = SatReport::Verdict::Timeout;
            report.size = m - 1;
            report.explored = decisions;
            report.note = "solver budget exhausted at size " + std::to_string(m);
            return report;
        }
        if (r.status == SolveResult::Status::Sat) {
            Structure model = decode_model(f, r.assignment);
            auto witness = is_satisfied(e, model);
            if (!witness)
                throw Error("internal error: decoded model failed evaluation re-verification");
            report.verdict = SatReport::Verdict::Sat;
            report.size = m;
            report.model = std::move(model);
            report.witness = witness;
            report.explored = decisions;
            return report;
        }
    }
    report.verdict = SatReport::Verdict::UnsatUpTo;
    report.size = bounds.max_domain_size;
    report.explored = decisions;
    return report;
}

// ---------------------------------------------------------------------------
// DIMACS

std::string export_dimacs(const CnfFormula& f) {
    std::ostringstream out;
    if (!f.annotations().empty()) {
        out << "c da domain-size " << f.domain_size() << '\n';
        for (std::size_t i = 0; i < f.base_names().size(); ++i)
            out << "c da name " << i << ' ' << f.base_names()[i] << '\n';
        for (std::size_t i = 0; i < f.subexpr_texts().size(); ++i)
            out << "c da sub " << i << ' ' << f.subexpr_texts()[i] << '\n';
        for (int v = 1; v <= f.variable_count(); ++v) {
            const VarAnnotation& a = f.annotations()[static_cast<std::size_t>(v - 1)];
            switch (a.role) {
                case VarAnnotation::Role::Base:
                    if (a.ref >= 0)
                        out << "c da var " << v << " base " << a.ref << ' ' << a.i << ' ' << a.j
                            << '\n';
                    break;
                case VarAnnotation::Role::Defined:
                    out << "c da var " << v << " def " << a.ref << ' ' << a.i << ' ' << a.j << '\n';
                    break;
                case VarAnnotation::Role::Aux:
                    out << "c da var " << v << " aux " << a.ref << ' ' << a.i << ' ' << a.k << ' '
                        << a.j << '\n';
                    break;
            }
        }
    }
    out << "p cnf " << f.variable_count() << ' ' << f.clauses().size() << '\n';
    for (const auto& c : f.clauses()) {
        for (int lit : c) out << lit << ' ';
        out << "0\n";
    }
    return out.str();
}

CnfFormula parse_dimacs(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    int vars = -1;
    long clauses = -1;
    CnfFormula f;
    std::vector<int> current;
    long done = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == 'c') continue;
        if (line[0] == 'p') {
            std::istringstream header(line);
            std::string p, cnf;
            if (!(header >> p >> cnf >> vars >> clauses) || cnf != "cnf" || vars < 0 || clauses < 0)
                throw Error("malformed DIMACS header: " + line);
            f.set_variable_count(vars);
            continue;
        }
        if (vars < 0) throw Error("DIMACS clause before header");
        std::istringstream body(line);
        int lit;
        while (body >> lit) {
            if (lit == 0) {
                f.add_clause(current);
                current.clear();
                ++done;
            } else {
                current.push_back(lit);
            }
        }
    }
    if (vars < 0) throw Error("missing DIMACS header");
    if (!current.empty()) throw Error("unterminated DIMACS clause");
    if (done != clauses)
        throw Error("DIMACS clause count mismatch: header says " + std::to_string(clauses) +
                    ", found " + std::to_string(done));
    return f;
}

} // namespace da
