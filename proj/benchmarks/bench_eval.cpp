#include <benchmark/benchmark.h>

#include <random>
#include <string>

#include "da/expr.hpp"
#include "da/graph.hpp"

namespace {

// Deterministic random graph over two relation names.
da::Structure make_graph(std::size_t nodes, double edge_probability) {
    std::mt19937_64 rng(nodes * 7919 + 17);
    std::uniform_real_distribution<double> coin(0, 1);
    da::Structure s;
    s.declare("a");
    s.declare("b");
    for (std::size_t i = 0; i < nodes; ++i) s.intern("n" + std::to_string(i));
    for (const char* name : {"a", "b"})
        for (std::size_t i = 0; i < nodes; ++i)
            for (std::size_t j = 0; j < nodes; ++j)
                if (coin(rng) < edge_probability)
                    s.add_edge(name, "n" + std::to_string(i), "n" + std::to_string(j));
    return s;
}

const char* kQuery = "a (a & a a) - (a a - a) a | (a b - b a) (a | b)";

void BM_evaluate_pairs(benchmark::State& state) {
    da::Structure s = make_graph(static_cast<std::size_t>(state.range(0)), 0.15);
    da::ExprPtr e = da::parse_expression(kQuery);
    for (auto _ : state) {
        da::Relation r = da::evaluate(*e, s, da::EvalStrategy::Pairs);
        benchmark::DoNotOptimize(r);
    }
}
BENCHMARK(BM_evaluate_pairs)->RangeMultiplier(2)->Range(8, 128);

void BM_evaluate_matrix(benchmark::State& state) {
    da::Structure s = make_graph(static_cast<std::size_t>(state.range(0)), 0.15);
    da::ExprPtr e = da::parse_expression(kQuery);
    for (auto _ : state) {
        da::Relation r = da::evaluate(*e, s, da::EvalStrategy::Matrix);
        benchmark::DoNotOptimize(r);
    }
}
BENCHMARK(BM_evaluate_matrix)->RangeMultiplier(2)->Range(8, 128);

void BM_parse_render_round_trip(benchmark::State& state) {
    da::ExprPtr e = da::parse_expression(kQuery);
    std::string text = da::render_expression(e);
    for (auto _ : state) {
        da::ExprPtr parsed = da::parse_expression(text);
        benchmark::DoNotOptimize(parsed);
    }
}
BENCHMARK(BM_parse_render_round_trip);

} // namespace

BENCHMARK_MAIN();
