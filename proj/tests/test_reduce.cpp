#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "da/modelfind.hpp"
#include "da/reduce.hpp"
#include "testutil.hpp"

using namespace da;

namespace {

testutil::TokRel eval_tokens(const Expr& e, const Structure& s) {
    return testutil::relation_tokens(evaluate(e, s), s);
}

std::set<std::string> adom_tokens(const Structure& s) {
    std::set<std::string> out;
    for (NodeId id : s.active_domain()) out.insert(s.token(id));
    return out;
}

} // namespace

TEST_CASE("grammar_encoding: the one-production grammar, piece by piece") {
    Grammar g = parse_grammar("S -> b");
    GrammarEncoding enc = grammar_encoding(g);

    CHECK(enc.alpha == "alpha");
    CHECK(enc.omega == "omega");
    CHECK(enc.chain == "X");
    CHECK(enc.vocabulary.names() ==
          std::vector<std::string>{"b", "S", "alpha", "omega", "X"});

    CHECK(expr_equal(enc.phi[0], parse_expression("alpha b omega")));
    CHECK(expr_equal(enc.phi[1], parse_expression("alpha b (omega - alpha)")));
    CHECK(expr_equal(enc.phi[2], parse_expression("alpha (b alpha - alpha)")));
    CHECK(expr_equal(enc.phi[3], parse_expression("alpha (b - S) alpha")));
    CHECK(expr_equal(enc.phi[4], parse_expression("(alpha - alpha b) S omega")));
    CHECK(expr_equal(enc.phi[5], parse_expression("alpha (b - X) alpha")));
    CHECK(expr_equal(enc.phi[6], parse_expression("alpha (X X - X) alpha")));
    CHECK(expr_equal(enc.phi[7], parse_expression("alpha ((X b) & b) alpha")));

    CHECK(difference_degree(*enc.expression) == 2);
    CHECK(relation_names(*enc.expression) ==
          std::set<std::string>{"b", "S", "alpha", "omega", "X"});
}

TEST_CASE("grammar_encoding: multi-symbol bodies and alphabet unions") {
    Grammar g = parse_grammar("S -> a S b | c");
    GrammarEncoding enc = grammar_encoding(g);
    // phi3 folds over both productions with the bodies verbatim
    CHECK(expr_equal(enc.phi[3], parse_expression(
                                     "alpha (a S b - S) alpha | alpha (c - S) alpha")));
    CHECK(expr_equal(enc.phi[0], parse_expression("alpha (a | b | c) omega")));
}

TEST_CASE("grammar_encoding: reserved names get primed") {
    Grammar g = Grammar("S", {{"S", {"alpha"}}, {"S", {"X"}}});
    GrammarEncoding enc = grammar_encoding(g);
    CHECK(enc.alpha == "alpha'");
    CHECK(enc.chain == "X'");
    auto mapped = std::find_if(enc.name_map.begin(), enc.name_map.end(),
                               [](const auto& kv) { return kv.first == "alpha"; });
    REQUIRE(mapped != enc.name_map.end());
    CHECK(mapped->second == "alpha'");
}

TEST_CASE("grammar_to_expression: always difference degree two") {
    testutil::Rng rng(20260808);
    for (int i = 0; i < 10; ++i) {
        Grammar g = testutil::random_grammar(rng);
        ReductionOutput out = grammar_to_expression(g);
        CHECK(difference_degree(*out.expression) == 2);
    }
}

TEST_CASE("witness_structure: the n=1 instance, relation by relation") {
    Grammar g = parse_grammar(testutil::read_fixture("g_sb.cfg"));
    Structure s = witness_structure(g, {"d"});

    CHECK(testutil::relation_tokens(s.relation("alpha"), s) ==
          testutil::TokRel{{"0", "1"}, {"1", "inf"}, {"2", "inf"}});
    CHECK(testutil::relation_tokens(s.relation("omega"), s) == testutil::TokRel{{"2", "inf"}});
    CHECK(testutil::relation_tokens(s.relation("d"), s) == testutil::TokRel{{"1", "2"}});
    CHECK(testutil::relation_tokens(s.relation("X"), s) == testutil::TokRel{{"1", "2"}});
    CHECK(s.relation("S").empty());
    CHECK(s.relation("b").empty());
    CHECK(s.active_domain().size() == 4); // 0, 1, 2, inf

    GrammarEncoding enc = grammar_encoding(g);
    auto result = eval_tokens(*enc.expression, s);
    CHECK(result.count({"0", "inf"}) == 1);
    for (int k = 1; k <= 7; ++k)
        CHECK(eval_tokens(*enc.phi[static_cast<std::size_t>(k)], s).count({"0", "inf"}) == 0);
}

TEST_CASE("witness_structure: domain size is word length plus three") {
    Grammar g = parse_grammar("S -> a S | a");
    // "a a" is generated; use a declared-but-unused letter
    Grammar g2 = Grammar("S", {{"S", {"a"}}}, {"b"});
    Structure s = witness_structure(g2, {"b", "a", "b"});
    CHECK(s.active_domain().size() == 3 + 3);
}

TEST_CASE("witness_structure: generated words are rejected") {
    Grammar g = parse_grammar("S -> b");
    CHECK_THROWS_AS(witness_structure(g, {"b"}), Error);
    CHECK_THROWS_AS(witness_structure(g, {}), Error);
}

TEST_CASE("witness_structure: random nonuniversal grammars go through") {
    testutil::Rng rng(20260808);
    int done = 0;
    int attempts = 0;
    while (done < 10 && attempts < 200) {
        ++attempts;
        Grammar g = testutil::random_grammar(rng);
        auto word = find_nonmember_word(g, 4);
        if (!word) continue;
        Structure s = witness_structure(g, *word);
        GrammarEncoding enc = grammar_encoding(g);
        auto witness = is_satisfied(*enc.expression, s);
        REQUIRE(witness.has_value());
        CHECK(s.token(witness->src) == "0");
        CHECK(s.token(witness->dst) == "inf");
        ++done;
    }
    CHECK(done == 10);
}

TEST_CASE("reduce_to_two: the printed templates") {
    Vocabulary one({"a"});
    ReductionOutput out = reduce_to_two(*parse_expression("a - a"), one);
    CHECK(out.vocabulary.names() == std::vector<std::string>{"b", "c"});
    CHECK(expr_equal(out.expression,
                     parse_expression("b.(c & c^2).b - b.(c & c^2).b")));

    Vocabulary two({"a1", "a2"});
    ReductionOutput second = reduce_to_two(*parse_expression("a2"), two);
    CHECK(expr_equal(second.expression, parse_expression("b.(c & c^3).b")));
    REQUIRE(second.name_map.size() == 2);
    CHECK(second.name_map[1].first == "a2");
}

TEST_CASE("reduce_to_two: fresh names dodge the vocabulary") {
    Vocabulary taken({"b", "c"});
    ReductionOutput out = reduce_to_two(*parse_expression("b c"), taken);
    CHECK(out.vocabulary.names() == std::vector<std::string>{"b'", "c'"});
    CHECK(relation_names(*out.expression) == std::set<std::string>{"b'", "c'"});
}

TEST_CASE("reduce_to_two: names outside the vocabulary are rejected") {
    CHECK_THROWS_AS(reduce_to_two(*parse_expression("z"), Vocabulary({"a"})), Error);
}

TEST_CASE("vocabulary reductions preserve difference degree") {
    testutil::Rng rng(20260808);
    std::vector<std::string> names = {"a1", "a2", "a3"};
    Vocabulary vocab(names);
    for (int i = 0; i < 50; ++i) {
        ExprPtr e = testutil::random_expression(rng, names, 6);
        unsigned d = difference_degree(*e);
        ReductionOutput two = reduce_to_two(*e, vocab);
        CHECK(difference_degree(*two.expression) == d);
        ReductionOutput one = reduce_to_one(*two.expression, two.vocabulary);
        CHECK(difference_degree(*one.expression) == d);
        ReductionOutput full = reduce_full(*e, vocab);
        CHECK(difference_degree(*full.expression) == d);
        CHECK(full.vocabulary.size() == 1);
    }
}

TEST_CASE("model_to_two: single-edge gadget") {
    Structure k;
    k.declare("a1");
    k.add_edge("a1", "x", "y");
    Structure j = model_to_two(k);

    CHECK(j.vocabulary().names() == std::vector<std::string>{"b", "c"});
    CHECK(j.relation("b").size() == 2);
    CHECK(j.relation("c").size() == 3);
    CHECK(j.active_domain().size() == 5); // x, y, three fresh
    auto shared = adom_tokens(j);
    CHECK(shared.count("x") == 1);
    CHECK(shared.count("y") == 1);

    Structure empty;
    empty.declare("a1");
    Structure j_empty = model_to_two(empty);
    CHECK(j_empty.relation("b").empty());
    CHECK(j_empty.relation("c").empty());
}

TEST_CASE("model_to_two: gadget nodes are fresh and per-edge disjoint") {
    testutil::Rng rng(606);
    for (int i = 0; i < 30; ++i) {
        Structure k = testutil::random_structure(rng, {"a1", "a2"}, 4);
        Structure j = model_to_two(k);
        std::size_t edges1 = k.relation("a1").size();
        std::size_t edges2 = k.relation("a2").size();
        // i+2 fresh nodes per edge of the i-th name, on top of the sources
        CHECK(j.active_domain().size() == adom_tokens(k).size() + 3 * edges1 + 4 * edges2);
        for (const auto& t : adom_tokens(k)) CHECK(adom_tokens(j).count(t) == 1);
    }
}

TEST_CASE("two-name reduction: evaluation transfers exactly") {
    testutil::Rng rng(20260808);
    std::vector<std::string> names = {"a1", "a2"};
    Vocabulary vocab(names);
    for (int i = 0; i < 60; ++i) {
        Structure k = testutil::random_structure(rng, names, 4);
        ExprPtr e = testutil::random_expression(rng, names, 5);
        ReductionOutput out = reduce_to_two(*e, vocab);
        Structure j = model_to_two(k);
        CHECK(eval_tokens(*e, k) == eval_tokens(*out.expression, j));
    }
}

TEST_CASE("model_from_two: gadget round trip restores the relations") {
    testutil::Rng rng(2121);
    std::vector<std::string> names = {"a1", "a2"};
    Vocabulary vocab(names);
    for (int i = 0; i < 30; ++i) {
        Structure k = testutil::random_structure(rng, names, 4);
        Structure back = model_from_two(model_to_two(k), vocab);
        for (const auto& n : names)
            CHECK(testutil::relation_tokens(back.relation(n), back) ==
                  testutil::relation_tokens(k.relation(n), k));
    }
}

TEST_CASE("model_from_two: arbitrary structures still commute with evaluation") {
    testutil::Rng rng(343434);
    std::vector<std::string> names = {"a1", "a2"};
    Vocabulary vocab(names);
    for (int i = 0; i < 40; ++i) {
        Structure j = testutil::random_structure(rng, {"b", "c"}, 5);
        ExprPtr e = testutil::random_expression(rng, names, 4);
        ReductionOutput out = reduce_to_two(*e, vocab);
        Structure k = model_from_two(j, vocab);
        CHECK(eval_tokens(*out.expression, j) == eval_tokens(*e, k));
    }
}

TEST_CASE("reduce_to_one: atom templates and the name check") {
    Vocabulary bc({"b", "c"});
    CHECK(expr_equal(reduce_to_one(*parse_expression("b"), bc).expression,
                     parse_expression("a.(a & a^2).a")));
    CHECK(expr_equal(reduce_to_one(*parse_expression("c"), bc).expression,
                     parse_expression("a.(a & a^3).a")));
    CHECK_THROWS_AS(reduce_to_one(*parse_expression("q"), bc), Error);
    CHECK_THROWS_AS(reduce_to_one(*parse_expression("b"), Vocabulary({"b"})), Error);
}

TEST_CASE("model_to_one: edge gadgets") {
    Structure b_only;
    b_only.declare("b");
    b_only.declare("c");
    b_only.add_edge("b", "x", "y");
    Structure jb = model_to_one(b_only);
    CHECK(jb.vocabulary().names() == std::vector<std::string>{"a"});
    CHECK(jb.relation("a").size() == 5); // chain of four plus the shortcut

    Structure c_only;
    c_only.declare("b");
    c_only.declare("c");
    c_only.add_edge("c", "x", "y");
    Structure jc = model_to_one(c_only);
    CHECK(jc.relation("a").size() == 6);
}

TEST_CASE("one-name reduction: evaluation transfers exactly") {
    testutil::Rng rng(20260808);
    std::vector<std::string> bc = {"b", "c"};
    Vocabulary vocab(bc);
    for (int i = 0; i < 60; ++i) {
        Structure k = testutil::random_structure(rng, bc, 4);
        ExprPtr e = testutil::random_expression(rng, bc, 5);
        ReductionOutput out = reduce_to_one(*e, vocab);
        Structure j = model_to_one(k);
        CHECK(eval_tokens(*e, k) == eval_tokens(*out.expression, j));
    }
}

TEST_CASE("one-name gadgets read back the source relations") {
    testutil::Rng rng(777);
    std::vector<std::string> bc = {"b", "c"};
    Vocabulary vocab(bc);
    for (int i = 0; i < 30; ++i) {
        Structure k = testutil::random_structure(rng, bc, 4);
        Structure j = model_to_one(k);
        Structure back = model_from_one(j, vocab);
        for (const auto& n : bc)
            CHECK(testutil::relation_tokens(back.relation(n), back) ==
                  testutil::relation_tokens(k.relation(n), k));
    }
}

TEST_CASE("reduce_full: single name out, satisfiability story intact") {
    Vocabulary one({"a"});
    ReductionOutput out = reduce_full(*parse_expression("a - a"), one);
    CHECK(out.vocabulary.size() == 1);
    CHECK(relation_names(*out.expression).size() == 1);
    CHECK(difference_degree(*out.expression) == 1);
    SatReport r = check_finite_sat(*out.expression, {2, 0}, Backend::Cnf);
    CHECK(r.verdict == SatReport::Verdict::UnsatUpTo);
}

TEST_CASE("reduce_full: a witness survives the composed gadgets") {
    testutil::Rng rng(111213);
    std::vector<std::string> names = {"a1", "a2"};
    Vocabulary vocab(names);
    int transferred = 0;
    for (int i = 0; i < 60; ++i) {
        Structure k = testutil::random_structure(rng, names, 3);
        ExprPtr e = testutil::random_expression(rng, names, 4);
        if (!is_satisfied(*e, k)) continue;
        ReductionOutput full = reduce_full(*e, vocab);
        Structure j = model_to_one(model_to_two(k));
        CHECK(is_satisfied(*full.expression, j).has_value());
        ++transferred;
    }
    CHECK(transferred >= 20);
}

TEST_CASE("reduce_full: the grammar encoding lands in one name at degree two") {
    Grammar g = parse_grammar("S -> b S | b");
    ReductionOutput enc = grammar_to_expression(g);
    ReductionOutput full = reduce_full(*enc.expression, enc.vocabulary);
    CHECK(full.vocabulary.size() == 1);
    CHECK(relation_names(*full.expression) ==
          std::set<std::string>{full.vocabulary.at(0)});
    CHECK(difference_degree(*full.expression) == 2);
}
