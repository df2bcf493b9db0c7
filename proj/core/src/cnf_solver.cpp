#include <algorithm>
#include <chrono>

#include "da/modelfind.hpp"

namespace da {

void CnfFormula::set_variable_count(int n) {
    if (n < 0) throw Error("negative variable count");
    for (const auto& c : clauses_)
        for (int lit : c)
            if (std::abs(lit) > n) throw Error("shrinking variable count below an existing literal");
    variable_count_ = n;
}

int CnfFormula::new_variable() {
    return ++variable_count_;
}

void CnfFormula::add_clause(std::vector<int> literals) {
    for (int lit : literals) {
        if (lit == 0) throw Error("literal 0 in clause");
        if (std::abs(lit) > variable_count_)
            throw Error("literal " + std::to_string(lit) + " exceeds variable count");
    }
    clauses_.push_back(std::move(literals));
}

void CnfFormula::set_annotation_header(unsigned domain_size, std::vector<std::string> base_names,
                                       std::vector<std::string> subexpr_texts) {
    domain_size_ = domain_size;
    base_names_ = std::move(base_names);
    subexpr_texts_ = std::move(subexpr_texts);
    annotations_.resize(static_cast<std::size_t>(variable_count_),
                        VarAnnotation{VarAnnotation::Role::Base, -1, 0, 0, -1});
}

void CnfFormula::annotate(int variable, VarAnnotation a) {
    if (variable < 1 || variable > variable_count_) throw Error("annotation for unknown variable");
    if (annotations_.size() < static_cast<std::size_t>(variable_count_))
        annotations_.resize(static_cast<std::size_t>(variable_count_),
                            VarAnnotation{VarAnnotation::Role::Base, -1, 0, 0, -1});
    annotations_[static_cast<std::size_t>(variable - 1)] = a;
}

namespace {

// Conflict-driven clause learning on top of the classic DPLL loop: watched
// literals, first-UIP learning with basic self-subsumption minimization,
// backjumping, and periodic deletion of long learned clauses. Branching is
// fixed (lowest unassigned variable, false first) and every policy below is
// counter-driven, so runs are bit-for-bit reproducible. No restarts.
class Solver {
public:
    Solver(const CnfFormula& f, std::uint64_t budget_ms)
        : nvars_(f.variable_count()),
          value_(static_cast<std::size_t>(nvars_) + 1, Unassigned),
          reason_(static_cast<std::size_t>(nvars_) + 1, -1),
          level_(static_cast<std::size_t>(nvars_) + 1, 0),
          seen_(static_cast<std::size_t>(nvars_) + 1, 0),
          watches_(2 * static_cast<std::size_t>(nvars_) + 2) {
        if (budget_ms > 0)
            deadline_ = std::chrono::steady_clock::now() + std::chrono::milliseconds(budget_ms);

        for (const auto& raw : f.clauses()) {
            std::vector<int> c = raw;
            std::sort(c.begin(), c.end(), [](int a, int b) {
                return std::abs(a) != std::abs(b) ? std::abs(a) < std::abs(b) : a < b;
            });
            c.erase(std::unique(c.begin(), c.end()), c.end());
            bool tautology = false;
            for (std::size_t i = 0; i + 1 < c.size(); ++i)
                if (c[i] == -c[i + 1]) tautology = true;
            if (tautology) continue;
            if (c.empty()) {
                trivially_unsat_ = true;
                return;
            }
            if (c.size() == 1) {
                units_.push_back(c[0]);
                continue;
            }
            attach(std::move(c));
        }
        first_learnt_ = static_cast<int>(clauses_.size());
    }

    SolveResult run() {
        SolveResult out;
        if (trivially_unsat_) {
            out.status = SolveResult::Status::Unsat;
            return out;
        }
        for (int lit : units_) {
            if (value_of(lit) == False) {
                out.status = SolveResult::Status::Unsat;
                return out;
            }
            if (value_of(lit) == Unassigned) enqueue(lit, -1);
        }

        for (;;) {
            int confl = propagate();
            if (budget_hit_) {
                out.status = SolveResult::Status::Budget;
                out.decisions = decisions_;
                return out;
            }
            if (confl >= 0) {
                if (current_level() == 0) {
                    out.status = SolveResult::Status::Unsat;
                    out.decisions = decisions_;
                    return out;
                }
                ++conflicts_;
                int backjump_level = 0;
                std::vector<int> learnt = analyze(confl, backjump_level);
                backtrack(backjump_level);
                if (learnt.size() == 1) {
                    enqueue(learnt[0], -1);
                } else {
                    int id = attach(std::move(learnt));
                    enqueue(clauses_[static_cast<std::size_t>(id)][0], id);
                }
                if (conflicts_ >= next_reduce_) reduce_learnt_db();
            } else {
                while (next_var_ <= nvars_ && value_[static_cast<std::size_t>(next_var_)] != Unassigned)
                    ++next_var_;
                if (next_var_ > nvars_) {
                    out.status = SolveResult::Status::Sat;
                    out.assignment.assign(static_cast<std::size_t>(nvars_) + 1, 0);
                    for (int v = 1; v <= nvars_; ++v)
                        out.assignment[static_cast<std::size_t>(v)] =
                            value_[static_cast<std::size_t>(v)] == True ? 1 : 0;
                    out.decisions = decisions_;
                    return out;
                }
                ++decisions_;
                lim_.push_back(static_cast<int>(trail_.size()));
                enqueue(-next_var_, -1); // false first
            }
        }
    }

private:
    static constexpr std::int8_t Unassigned = -1;
    static constexpr std::int8_t False = 0;
    static constexpr std::int8_t True = 1;

    static std::size_t lit_index(int lit) {
        return 2 * static_cast<std::size_t>(std::abs(lit)) + (lit < 0 ? 1 : 0);
    }

    std::int8_t value_of(int lit) const {
        std::int8_t v = value_[static_cast<std::size_t>(std::abs(lit))];
        if (v == Unassigned) return Unassigned;
        return (lit > 0) == (v == True) ? True : False;
    }

    int current_level() const { return static_cast<int>(lim_.size()); }

    int attach(std::vector<int> clause) {
        int id = static_cast<int>(clauses_.size());
        watches_[lit_index(clause[0])].push_back(id);
        watches_[lit_index(clause[1])].push_back(id);
        clauses_.push_back(std::move(clause));
        return id;
    }

    void enqueue(int lit, int reason) {
        int v = std::abs(lit);
        value_[static_cast<std::size_t>(v)] = lit > 0 ? True : False;
        reason_[static_cast<std::size_t>(v)] = reason;
        level_[static_cast<std::size_t>(v)] = current_level();
        trail_.push_back(lit);
    }

    bool dead(int ci) const {
        return clauses_[static_cast<std::size_t>(ci)].empty();
    }

    // Returns a conflicting clause id, or -1.
    int propagate() {
        while (qhead_ < trail_.size()) {
            if ((++propagations_ & 2047) == 0 && deadline_ &&
                std::chrono::steady_clock::now() > *deadline_) {
                budget_hit_ = true;
                return -1;
            }
            int lit = trail_[qhead_++];
            int false_lit = -lit;
            std::vector<int>& watch = watches_[lit_index(false_lit)];
            std::size_t keep = 0;
            for (std::size_t wi = 0; wi < watch.size(); ++wi) {
                int ci = watch[wi];
                if (dead(ci)) continue; // lazily drop deleted clauses
                std::vector<int>& c = clauses_[static_cast<std::size_t>(ci)];
                if (c[0] == false_lit) std::swap(c[0], c[1]);
                if (value_of(c[0]) == True) {
                    watch[keep++] = ci;
                    continue;
                }
                bool moved = false;
                for (std::size_t k = 2; k < c.size(); ++k) {
                    if (value_of(c[k]) != False) {
                        std::swap(c[1], c[k]);
                        watches_[lit_index(c[1])].push_back(ci);
                        moved = true;
                        break;
                    }
                }
                if (moved) continue;
                watch[keep++] = ci;
                if (value_of(c[0]) == False) {
                    // conflict: restore untouched watches and report
                    for (std::size_t rest = wi + 1; rest < watch.size(); ++rest)
                        watch[keep++] = watch[rest];
                    watch.resize(keep);
                    qhead_ = trail_.size();
                    return ci;
                }
                enqueue(c[0], ci);
            }
            watch.resize(keep);
        }
        return -1;
    }

    std::vector<int> analyze(int confl, int& backjump_level) {
        std::vector<int> learnt{0};
        int counter = 0;
        int p = 0;
        std::size_t index = trail_.size();

        // First-UIP cut. seen_ marks the whole resolution cone and stays set
        // until the end so minimization can consult it.
        for (;;) {
            const std::vector<int>& c = clauses_[static_cast<std::size_t>(confl)];
            for (std::size_t k = (p == 0 ? 0 : 1); k < c.size(); ++k) {
                int q = c[k];
                int v = std::abs(q);
                if (seen_[static_cast<std::size_t>(v)] || level_[static_cast<std::size_t>(v)] == 0)
                    continue;
                seen_[static_cast<std::size_t>(v)] = 1;
                to_clear_.push_back(v);
                if (level_[static_cast<std::size_t>(v)] == current_level())
                    ++counter;
                else
                    learnt.push_back(q);
            }
            while (!seen_[static_cast<std::size_t>(std::abs(trail_[index - 1]))]) --index;
            p = trail_[index - 1];
            --index;
            if (--counter == 0) break;
            confl = reason_[static_cast<std::size_t>(std::abs(p))];
        }
        learnt[0] = -p;

        // Basic self-subsumption: drop literals whose reason clause is fully
        // inside the cone (or at level 0).
        std::size_t w = 1;
        for (std::size_t k = 1; k < learnt.size(); ++k) {
            int v = std::abs(learnt[k]);
            int r = reason_[static_cast<std::size_t>(v)];
            bool redundant = r >= 0;
            if (redundant) {
                const std::vector<int>& rc = clauses_[static_cast<std::size_t>(r)];
                for (std::size_t t = 1; t < rc.size(); ++t) {
                    int u = std::abs(rc[t]);
                    if (level_[static_cast<std::size_t>(u)] > 0 &&
                        !seen_[static_cast<std::size_t>(u)]) {
                        redundant = false;
                        break;
                    }
                }
            }
            if (!redundant) learnt[w++] = learnt[k];
        }
        learnt.resize(w);

        backjump_level = 0;
        if (learnt.size() > 1) {
            std::size_t best = 1;
            for (std::size_t k = 2; k < learnt.size(); ++k)
                if (level_[static_cast<std::size_t>(std::abs(learnt[k]))] >
                    level_[static_cast<std::size_t>(std::abs(learnt[best]))])
                    best = k;
            std::swap(learnt[1], learnt[best]);
            backjump_level = level_[static_cast<std::size_t>(std::abs(learnt[1]))];
        }

        for (int v : to_clear_) seen_[static_cast<std::size_t>(v)] = 0;
        to_clear_.clear();
        return learnt;
    }

    void backtrack(int target_level) {
        if (current_level() <= target_level) return;
        std::size_t bound = static_cast<std::size_t>(lim_[static_cast<std::size_t>(target_level)]);
        for (std::size_t i = trail_.size(); i > bound; --i) {
            int v = std::abs(trail_[i - 1]);
            value_[static_cast<std::size_t>(v)] = Unassigned;
            reason_[static_cast<std::size_t>(v)] = -1;
            if (v < next_var_) next_var_ = v;
        }
        trail_.resize(bound);
        qhead_ = bound;
        lim_.resize(static_cast<std::size_t>(target_level));
    }

    // Deterministic clause-database maintenance: drop long learned clauses
    // that are not currently reasons. Short clauses stay for good.
    void reduce_learnt_db() {
        next_reduce_ += reduce_step_;
        std::vector<char> locked(clauses_.size(), 0);
        for (int lit : trail_) {
            int r = reason_[static_cast<std::size_t>(std::abs(lit))];
            if (r >= 0) locked[static_cast<std::size_t>(r)] = 1;
        }
        std::vector<std::size_t> lengths;
        for (std::size_t ci = static_cast<std::size_t>(first_learnt_); ci < clauses_.size(); ++ci)
            if (!clauses_[ci].empty() && !locked[ci]) lengths.push_back(clauses_[ci].size());
        if (lengths.empty()) return;
        std::sort(lengths.begin(), lengths.end());
        std::size_t cutoff = std::max<std::size_t>(lengths[lengths.size() / 2], 6);
        for (std::size_t ci = static_cast<std::size_t>(first_learnt_); ci < clauses_.size(); ++ci) {
            if (clauses_[ci].empty() || locked[ci]) continue;
            if (clauses_[ci].size() > cutoff) {
                clauses_[ci].clear();
                clauses_[ci].shrink_to_fit();
            }
        }
    }

    int nvars_;
    bool trivially_unsat_ = false;
    std::vector<int> units_;
    std::vector<std::vector<int>> clauses_;
    int first_learnt_ = 0;
    std::vector<std::int8_t> value_;
    std::vector<int> reason_;
    std::vector<int> level_;
    std::vector<char> seen_;
    std::vector<int> to_clear_;
    std::vector<std::vector<int>> watches_;
    std::vector<int> trail_;
    std::vector<int> lim_;
    std::size_t qhead_ = 0;
    int next_var_ = 1;
    std::uint64_t decisions_ = 0;
    std::uint64_t propagations_ = 0;
    std::uint64_t conflicts_ = 0;
    std::uint64_t next_reduce_ = 4096;
    std::uint64_t reduce_step_ = 4096;
    std::optional<std::chrono::steady_clock::time_point> deadline_;
    bool budget_hit_ = false;
};

} // namespace

SolveResult solve_cnf(const CnfFormula& f, std::uint64_t budget_ms) {
    return Solver(f, budget_ms).run();
}

} // namespace da
