#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "da/graph.hpp"
#include "testutil.hpp"

using namespace da;

namespace {

testutil::TokRel tokens_of(const Relation& r, const Structure& s) {
    return testutil::relation_tokens(r, s);
}

} // namespace

TEST_CASE("parse_structure: chains, duplicates, empties") {
    Structure chain = parse_structure("a 1 2\na 2 3");
    CHECK(chain.relation("a").size() == 2);
    CHECK(chain.vocabulary().names() == std::vector<std::string>{"a"});

    Structure dup = parse_structure("a 1 2\na 1 2\n");
    CHECK(dup.relation("a").size() == 1);

    Structure empty = parse_structure("");
    CHECK(empty.vocabulary().empty());
    CHECK(empty.active_domain().empty());

    Structure declared = parse_structure("@names a b\n# nothing else\n");
    CHECK(declared.relation("b").empty());
    CHECK(declared.vocabulary().names() == std::vector<std::string>{"a", "b"});
}

TEST_CASE("parse_structure: the diamond fixture") {
    Structure w = parse_structure(testutil::read_fixture("w.g"));
    testutil::TokRel expect = {{"1", "2"}, {"2", "3"}, {"3", "4"}, {"1", "3"}, {"2", "4"}};
    CHECK(tokens_of(w.relation("a"), w) == expect);
}

TEST_CASE("parse_structure: malformed lines") {
    CHECK_THROWS_AS(parse_structure("a 1\n"), ParseError);
    CHECK_THROWS_AS(parse_structure("a 1 2 3\n"), ParseError);
    CHECK_THROWS_AS(parse_structure("9bad 1 2\n"), ParseError);
}

TEST_CASE("structure text round-trips") {
    Structure w = parse_structure(testutil::read_fixture("w.g"));
    Structure back = parse_structure(w.to_text());
    CHECK(testutil::to_tokens(back) == testutil::to_tokens(w));
    CHECK(back.vocabulary().names() == w.vocabulary().names());
}

TEST_CASE("evaluate: the diamond pins down exactly one pair") {
    Structure w = parse_structure(testutil::read_fixture("w.g"));
    ExprPtr e = parse_expression(testutil::read_fixture("wexpr.da"));
    for (EvalStrategy strat : {EvalStrategy::Pairs, EvalStrategy::Matrix}) {
        Relation r = evaluate(*e, w, strat);
        CHECK(tokens_of(r, w) == testutil::TokRel{{"1", "4"}});
    }
    // the intermediate pieces, against hand evaluation
    CHECK(tokens_of(evaluate(*parse_expression("a & a a"), w), w) ==
          testutil::TokRel{{"1", "3"}, {"2", "4"}});
    CHECK(tokens_of(evaluate(*parse_expression("a (a & a a)"), w), w) ==
          testutil::TokRel{{"1", "4"}});
    CHECK(evaluate(*parse_expression("(a a - a) a"), w).empty());
}

TEST_CASE("evaluate: self-difference is empty everywhere") {
    testutil::Rng rng(7);
    ExprPtr e = parse_expression("a - a");
    for (int i = 0; i < 20; ++i) {
        Structure s = testutil::random_structure(rng, {"a"}, 4);
        CHECK(evaluate(*e, s).empty());
    }
}

TEST_CASE("evaluate: composition on a chain") {
    Structure s = parse_structure("a 1 2\na 2 3");
    CHECK(tokens_of(evaluate(*parse_expression("a.a"), s), s) == testutil::TokRel{{"1", "3"}});
}

TEST_CASE("evaluate: unknown names are rejected") {
    Structure s = parse_structure("a 1 2");
    CHECK_THROWS_AS(evaluate(*parse_expression("a . q"), s), Error);
}

TEST_CASE("evaluate: strategies agree and match the reference oracle") {
    testutil::Rng rng(20260808);
    std::vector<std::string> names = {"a", "b"};
    for (int i = 0; i < 300; ++i) {
        Structure s = testutil::random_structure(rng, names, 5);
        ExprPtr e = testutil::random_expression(rng, names, 6);
        Relation pairs = evaluate(*e, s, EvalStrategy::Pairs);
        Relation matrix = evaluate(*e, s, EvalStrategy::Matrix);
        REQUIRE(pairs == matrix);
        REQUIRE(tokens_of(pairs, s) == testutil::ref_eval(*e, testutil::to_tokens(s)));
    }
}

TEST_CASE("evaluate: monotone on difference-free expressions") {
    testutil::Rng rng(99);
    std::vector<std::string> names = {"a", "b"};
    for (int i = 0; i < 100; ++i) {
        Structure small = testutil::random_structure(rng, names, 4);
        // grow: copy plus extra edges
        Structure big;
        for (const auto& n : names) big.declare(n);
        for (const auto& n : names)
            for (const auto& [x, y] : small.relation(n).pairs())
                big.add_edge(n, small.token(x), small.token(y));
        for (int extra = 0; extra < 3; ++extra)
            big.add_edge(names[rng.range(0, 1)], "n" + std::to_string(rng.range(0, 4)),
                         "n" + std::to_string(rng.range(0, 4)));

        ExprPtr e = testutil::random_expression(rng, names, 5, /*allow_difference=*/false);
        auto lo = tokens_of(evaluate(*e, small), small);
        auto hi = tokens_of(evaluate(*e, big), big);
        CHECK(std::includes(hi.begin(), hi.end(), lo.begin(), lo.end()));
    }
}

TEST_CASE("evaluate: results stay inside the active domain square") {
    testutil::Rng rng(123);
    std::vector<std::string> names = {"a", "b"};
    for (int i = 0; i < 100; ++i) {
        Structure s = testutil::random_structure(rng, names, 5);
        ExprPtr e = testutil::random_expression(rng, names, 6);
        auto adom = s.active_domain();
        Relation result = evaluate(*e, s);
        for (const auto& [x, y] : result.pairs()) {
            CHECK(std::binary_search(adom.begin(), adom.end(), x));
            CHECK(std::binary_search(adom.begin(), adom.end(), y));
        }
    }
}

TEST_CASE("active_domain") {
    Structure w = parse_structure(testutil::read_fixture("w.g"));
    std::vector<std::string> toks;
    for (NodeId id : w.active_domain()) toks.push_back(w.token(id));
    CHECK(toks == std::vector<std::string>{"1", "2", "3", "4"});
    CHECK(parse_structure("").active_domain().empty());
    // declared-but-unused names add nothing
    CHECK(parse_structure("@names a b c").active_domain().empty());
}

TEST_CASE("is_satisfied: least pair, absence, self-loop") {
    // W extended with an empty b relation, so the two-name fixture applies
    Structure w = parse_structure("@names a b\n" + testutil::read_fixture("w.g"));
    ExprPtr e2 = parse_expression(testutil::read_fixture("example2.da"));
    CHECK(!is_satisfied(*e2, w).has_value());

    ExprPtr we = parse_expression(testutil::read_fixture("wexpr.da"));
    auto witness = is_satisfied(*we, w);
    REQUIRE(witness.has_value());
    CHECK(w.token(witness->src) == "1");
    CHECK(w.token(witness->dst) == "4");

    CHECK(!is_satisfied(*parse_expression("a - a"), w).has_value());

    Structure loop = parse_structure("a x x");
    auto self = is_satisfied(*parse_expression("a"), loop);
    REQUIRE(self.has_value());
    CHECK(loop.token(self->src) == "x");
    CHECK(loop.token(self->dst) == "x");

    // least pair in interned order
    Structure multi = parse_structure("a p q\na m n");
    auto least = is_satisfied(*parse_expression("a"), multi);
    REQUIRE(least.has_value());
    CHECK(multi.token(least->src) == "p"); // "p" interned before "m"
}
