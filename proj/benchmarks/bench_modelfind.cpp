#include <benchmark/benchmark.h>

#include "da/cfg.hpp"
#include "da/modelfind.hpp"
#include "da/reduce.hpp"

namespace {

const char* kUnsat = "a a a - ((a a - b) a | b a)";

void BM_enumerate_unsat(benchmark::State& state) {
    da::ExprPtr e = da::parse_expression(kUnsat);
    da::Bounds bounds{static_cast<unsigned>(state.range(0)), 0};
    for (auto _ : state) {
        da::SatReport r = da::enumerate_models(*e, bounds);
        benchmark::DoNotOptimize(r);
    }
    state.counters["explored"] = static_cast<double>(
        da::enumerate_models(*e, bounds).explored);
}
BENCHMARK(BM_enumerate_unsat)->DenseRange(1, 3);

void BM_cnf_unsat(benchmark::State& state) {
    da::ExprPtr e = da::parse_expression(kUnsat);
    da::Bounds bounds{static_cast<unsigned>(state.range(0)), 0};
    for (auto _ : state) {
        da::SatReport r = da::check_finite_sat(*e, bounds, da::Backend::Cnf);
        benchmark::DoNotOptimize(r);
    }
}
BENCHMARK(BM_cnf_unsat)->DenseRange(1, 4);

void BM_encode_grammar_expression(benchmark::State& state) {
    da::Grammar g = da::parse_grammar("S -> a S | b S | a | b");
    da::ReductionOutput enc = da::grammar_to_expression(g);
    unsigned size = static_cast<unsigned>(state.range(0));
    for (auto _ : state) {
        da::CnfFormula f = da::encode_cnf(*enc.expression, size);
        benchmark::DoNotOptimize(f);
    }
}
BENCHMARK(BM_encode_grammar_expression)->DenseRange(1, 3);

void BM_solve_grammar_encoding(benchmark::State& state) {
    da::Grammar g = da::parse_grammar("S -> a S | b S | a | b");
    da::ReductionOutput enc = da::grammar_to_expression(g);
    da::CnfFormula f = da::encode_cnf(*enc.expression, static_cast<unsigned>(state.range(0)));
    for (auto _ : state) {
        da::SolveResult r = da::solve_cnf(f);
        benchmark::DoNotOptimize(r);
    }
}
BENCHMARK(BM_solve_grammar_encoding)->DenseRange(1, 3);

void BM_cyk(benchmark::State& state) {
    da::Grammar g = da::parse_grammar("S -> S S | a");
    da::CnfGrammar cnf = da::to_cnf(g);
    da::Word word(static_cast<std::size_t>(state.range(0)), "a");
    for (auto _ : state) {
        bool member = da::cyk_membership(cnf, word, "S");
        benchmark::DoNotOptimize(member);
    }
}
BENCHMARK(BM_cyk)->RangeMultiplier(2)->Range(4, 64);

} // namespace

BENCHMARK_MAIN();
