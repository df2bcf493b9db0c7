#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "da/cfg.hpp"
#include "testutil.hpp"

using namespace da;

TEST_CASE("parse_grammar: alternatives, inferred alphabets, start symbol") {
    Grammar g = parse_grammar("S -> a S | a");
    CHECK(g.terminals() == std::set<std::string>{"a"});
    CHECK(g.nonterminals() == std::set<std::string>{"S"});
    CHECK(g.start() == "S");
    CHECK(g.productions().size() == 2);

    Grammar two = parse_grammar("S -> A b\nA -> a");
    CHECK(two.nonterminals() == std::set<std::string>{"S", "A"});
    CHECK(two.terminals() == std::set<std::string>{"a", "b"});

    Grammar declared = parse_grammar("@terminals d\nS -> b");
    CHECK(declared.terminals() == std::set<std::string>{"b", "d"});
}

TEST_CASE("parse_grammar: rejects empty productions and stray lines") {
    CHECK_THROWS_AS(parse_grammar("S -> "), ParseError);
    CHECK_THROWS_AS(parse_grammar("S -> a |"), ParseError);
    CHECK_THROWS_AS(parse_grammar("S -> | a"), ParseError);
    CHECK_THROWS_AS(parse_grammar("S a b"), ParseError);
    CHECK_THROWS_AS(parse_grammar(""), ParseError);
    // duplicates collapse
    CHECK(parse_grammar("S -> a | a").productions().size() == 1);
}

TEST_CASE("to_cnf: the classic split") {
    Grammar g = parse_grammar("S -> a S | a");
    CnfGrammar cnf = to_cnf(g);
    // fresh lift nonterminal for `a`, S -> N_a S kept binary, S -> a kept
    CHECK(cnf.grammar().terminals() == std::set<std::string>{"a"});
    CHECK(cyk_membership(cnf, {"a"}, "S"));
    CHECK(cyk_membership(cnf, {"a", "a"}, "S"));
    CHECK(cyk_membership(cnf, {"a", "a", "a"}, "S"));
}

TEST_CASE("to_cnf: already-normal grammars survive unchanged") {
    Grammar g = parse_grammar("S -> S S | a");
    CnfGrammar cnf = to_cnf(g);
    CHECK(cnf.grammar().productions() == g.productions());
}

TEST_CASE("to_cnf: unit chains collapse") {
    Grammar g = parse_grammar("S -> A\nA -> B\nB -> a | S b");
    CnfGrammar cnf = to_cnf(g);
    CHECK(cyk_membership(cnf, {"a"}, "S"));
    CHECK(cyk_membership(cnf, {"a", "b"}, "S"));
    CHECK(cyk_membership(cnf, {"a", "b", "b"}, "B"));
    CHECK(!cyk_membership(cnf, {"b"}, "S"));
}

TEST_CASE("to_cnf: per-nonterminal languages match the derivation oracle") {
    testutil::Rng rng(20260808);
    int grammars = 0;
    while (grammars < 100) {
        Grammar g = testutil::random_grammar(rng);
        CnfGrammar cnf = to_cnf(g);
        ++grammars;
        for (const auto& y : g.nonterminals()) {
            auto oracle = testutil::derivable_words(g, y, 6);
            for (const auto& w : testutil::all_words(g, 6)) {
                bool expect = oracle.count(w) > 0;
                REQUIRE(cyk_membership(cnf, w, y) == expect);
            }
        }
    }
}

TEST_CASE("cyk_membership: base cases and errors") {
    CnfGrammar single = to_cnf(parse_grammar("S -> a"));
    CHECK(cyk_membership(single, {"a"}, "S"));
    CHECK(!cyk_membership(single, {"a", "a"}, "S"));

    CnfGrammar balanced = to_cnf(parse_grammar("S -> S S | a"));
    CHECK(cyk_membership(balanced, {"a", "a", "a"}, "S"));

    CHECK_THROWS_AS(cyk_membership(single, {}, "S"), Error);
    CHECK_THROWS_AS(cyk_membership(single, {"z"}, "S"), Error);
    CHECK_THROWS_AS(cyk_membership(single, {"a"}, "Q"), Error);
}

TEST_CASE("interval_table: unit word, miss, and double cover") {
    Grammar g = parse_grammar("@terminals d\nS -> b");
    IntervalTable hit = interval_table(g, {"b"});
    CHECK(hit.entries() == std::set<std::tuple<std::string, int, int>>{{"S", 1, 2}});

    IntervalTable miss = interval_table(g, {"d"});
    CHECK(miss.entries().empty());

    IntervalTable both = interval_table(g, {"b", "b"});
    CHECK(both.entries() ==
          std::set<std::tuple<std::string, int, int>>{{"S", 1, 2}, {"S", 2, 3}});
}

TEST_CASE("interval_table: whole-word entry tracks membership") {
    testutil::Rng rng(17);
    for (int i = 0; i < 40; ++i) {
        Grammar g = testutil::random_grammar(rng);
        CnfGrammar cnf = to_cnf(g);
        for (const auto& w : testutil::all_words(g, 3)) {
            IntervalTable t = interval_table(g, w);
            CHECK(t.contains(g.start(), 1, static_cast<int>(w.size()) + 1) ==
                  cyk_membership(cnf, w, g.start()));
        }
    }
}

TEST_CASE("find_nonmember_word: least misses") {
    Grammar ab = Grammar("S", {{"S", {"a"}}}, {"b"});
    auto w = find_nonmember_word(ab, 3);
    REQUIRE(w.has_value());
    CHECK(*w == Word{"b"});

    Grammar aa = parse_grammar("S -> a a");
    auto one = find_nonmember_word(aa, 3);
    REQUIRE(one.has_value());
    CHECK(*one == Word{"a"});

    Grammar universal = parse_grammar(testutil::read_fixture("universal.cfg"));
    CHECK(!find_nonmember_word(universal, 5).has_value());
}

TEST_CASE("find_nonmember_word: result always fails CYK from the start symbol") {
    testutil::Rng rng(4242);
    for (int i = 0; i < 60; ++i) {
        Grammar g = testutil::random_grammar(rng);
        auto w = find_nonmember_word(g, 4);
        if (!w) continue;
        CHECK(!cyk_membership(to_cnf(g), *w, g.start()));
    }
}
