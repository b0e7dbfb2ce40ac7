#include "support.hpp"
#include "tqp/oracle.hpp"

#include <doctest.h>

using namespace tqp;
using namespace tqp::testing;

namespace {

TreeAutomaton parse(const char* text) { return parse_automaton(text); }

const char* kEvenF = R"(
automaton even
sym f 2
sym a 0
state e o
initial e
rule e -> f(e, e)
rule e -> f(o, o)
rule o -> f(e, o)
rule o -> f(o, e)
rule o -> a
)";

const char* kLeftComb = R"(
automaton comb
sym f 2
sym a 0
state p l
initial p
rule p -> f(p, l)
rule p -> a
rule l -> a
)";

const char* kWithEpsilon = R"(
automaton eps
sym f 2
sym g 1
sym a 0
state p q r dead
initial p
rule p -> q
rule q -> g(r)
rule q -> f(p, p)
rule r -> p
rule r -> a
rule dead -> f(dead, dead)
)";

// Language of p in kWithEpsilon, written out by hand.
bool in_eps(const Tree& t) {
    const std::string& f = t.label().name;
    if (f == "g") return in_eps(t.child(1)) || t.child(1).label().name == "a";
    if (f == "f") return in_eps(t.child(1)) && in_eps(t.child(2));
    return false;
}

EnumerationBudget up_to(std::size_t n) {
    EnumerationBudget b;
    b.max_nodes = n;
    return b;
}

} // namespace

TEST_CASE("automaton text round trip") {
    TreeAutomaton a = parse(kEvenF);
    CHECK(a.state_count() == 2);
    CHECK(a.rules().size() == 5);
    TreeAutomaton b = parse_automaton(format_automaton(a));
    CHECK(format_automaton(b) == format_automaton(a));
    CHECK(equivalent(a, b).holds);
}

TEST_CASE("automaton parse errors") {
    CHECK_THROWS_AS(parse("automaton x\nsym a 0\nstate p\nrule p -> b"), ParseError);
    CHECK_THROWS_AS(parse("automaton x\nsym a 0\nstate p\nrule q -> a"), ParseError);
    CHECK_THROWS_AS(parse("automaton x\nsym f 2\nstate p\nrule p -> f(p)"), ParseError);
    try {
        parse("automaton x\nsym a 0\nstate p\ninitial p\nrule p -> a(\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 5);
    }
}

TEST_CASE("acceptance and runs") {
    TreeAutomaton a = parse(kEvenF);
    RankedAlphabet sigma = a.alphabet();
    CHECK(accepts(a, parse_tree("(f (a) (a))", sigma)));
    CHECK_FALSE(accepts(a, parse_tree("(f (a) (f (a) (a)))", sigma)));
    CHECK_FALSE(accepts(a, parse_tree("(a)", sigma)));
    CHECK(enumerate_runs(a, parse_tree("(f (f (a) (a)) (f (a) (a)))", sigma)).size() == 1);
    TreeAutomaton g = parse("automaton g\nsym f 1\nsym a 0\nstate p\ninitial p\nrule p -> a");
    CHECK_THROWS_AS(accepts(g, parse_tree("(f (a) (a))")), AlphabetMismatch);
}

TEST_CASE("reduce and epsilon elimination keep the language" * doctest::test_suite("prop-b")) {
    for (const char* text : {kEvenF, kLeftComb, kWithEpsilon}) {
        TreeAutomaton a = parse(text);
        TreeAutomaton r = a.has_epsilon() ? eliminate_epsilon(a) : reduce(a);
        CHECK_FALSE(r.has_epsilon());
        auto report = check_language_construction(
            "reduce", r, [&](const Tree& t) { return a.has_epsilon() ? in_eps(t) : accepts(a, t); }, a.alphabet(),
            up_to(8));
        CHECK_MESSAGE(report.pass(), report.text());
        CHECK(r.state_count() <= a.state_count());
    }
    TreeAutomaton r = eliminate_epsilon(parse(kWithEpsilon));
    CHECK_FALSE(r.find_state("dead").has_value());
}

TEST_CASE("reduce and epsilon elimination on random automata" * doctest::test_suite("prop-b")) {
    InstanceGenerator gen(7);
    std::size_t nonempty = 0;
    for (int i = 0; i < 60; ++i) {
        TreeAutomaton a = gen.automaton(5, i % 2 ? 0.2 : 0.0);
        TreeAutomaton r = a.has_epsilon() ? eliminate_epsilon(a) : reduce(a);
        CHECK_FALSE(r.has_epsilon());
        auto report = check_language_construction(
            "reduce", r, [&](const Tree& t) { return member(a, t); }, a.alphabet(), up_to(8));
        CHECK_MESSAGE(report.pass(), "instance " << i << ": " << report.text());
        TreeAutomaton rr = reduce(r);
        CHECK(rr.state_count() == reduce(rr).state_count());
        if (!is_empty(a)) ++nonempty;
    }
    CHECK(nonempty > 20);
}

TEST_CASE("boolean operations on random automata" * doctest::test_suite("prop-c")) {
    InstanceGenerator gen(11);
    for (int i = 0; i < 40; ++i) {
        TreeAutomaton a = gen.automaton(4), b = gen.automaton(4);
        auto sigma = a.alphabet();
        auto p = check_language_construction(
            "product", product(a, b), [&](const Tree& t) { return member(a, t) && member(b, t); }, sigma, up_to(8));
        auto u = check_language_construction(
            "union", union_of(a, b), [&](const Tree& t) { return member(a, t) || member(b, t); }, sigma, up_to(8));
        auto c = check_language_construction(
            "complement", complement(a), [&](const Tree& t) { return !member(a, t); }, sigma, up_to(8));
        CHECK_MESSAGE(p.pass(), "instance " << i << ": " << p.text());
        CHECK_MESSAGE(u.pass(), "instance " << i << ": " << u.text());
        CHECK_MESSAGE(c.pass(), "instance " << i << ": " << c.text());
        auto inc = included(a, b);
        if (inc.holds)
            CHECK(is_empty(product(a, complement(b))));
        else
            CHECK((member(a, *inc.counterexample) && !member(b, *inc.counterexample)));
    }
}

TEST_CASE("boolean operations agree with membership" * doctest::test_suite("prop-c")) {
    TreeAutomaton a = parse(kEvenF), b = parse(kLeftComb);
    TreeAutomaton prod = product(a, b), uni = union_of(a, b), comp = complement(a);
    auto sigma = a.alphabet();
    auto p = check_language_construction(
        "product", prod, [&](const Tree& t) { return accepts(a, t) && accepts(b, t); }, sigma, up_to(9));
    auto u = check_language_construction(
        "union", uni, [&](const Tree& t) { return accepts(a, t) || accepts(b, t); }, sigma, up_to(9));
    auto c = check_language_construction(
        "complement", comp, [&](const Tree& t) { return !accepts(a, t); }, sigma, up_to(9));
    CHECK_MESSAGE(p.pass(), p.text());
    CHECK_MESSAGE(u.pass(), u.text());
    CHECK_MESSAGE(c.pass(), c.text());
    CHECK(p.checked > 0);
}

TEST_CASE("complement of the empty language is universal" * doctest::test_suite("prop-c")) {
    TreeAutomaton empty = parse("automaton e\nsym f 2\nsym a 0\nstate p\ninitial p\nrule p -> f(p, p)");
    CHECK(is_empty(empty));
    CHECK(equivalent(complement(empty), universal_automaton(empty.alphabet())).holds);
    CHECK(is_empty(product(complement(parse(kEvenF)), parse(kEvenF))));
}

TEST_CASE("inclusion and equivalence witnesses are minimal" * doctest::test_suite("prop-c")) {
    TreeAutomaton even = parse(kEvenF), comb = parse(kLeftComb);
    auto sigma = even.alphabet();
    auto c = included(comb, even);
    REQUIRE_FALSE(c.holds);
    REQUIRE(c.counterexample);
    CHECK(accepts(comb, *c.counterexample));
    CHECK_FALSE(accepts(even, *c.counterexample));
    // no smaller tree separates the languages
    for (const auto& t : enumerate_shapes(sigma, up_to(c.counterexample->size() - 1)))
        CHECK_FALSE((accepts(comb, t) && !accepts(even, t)));
    CHECK(to_string(*c.counterexample) == "(a)");
    CHECK(included(product(even, comb), even).holds);
    auto e = equivalent(even, union_of(even, comb));
    CHECK_FALSE(e.holds);
    CHECK(e.counterexample);
}

TEST_CASE("budget is enforced on determinization") {
    CHECK_THROWS_AS(complement(parse(kEvenF), 1), BudgetExceeded);
}

TEST_CASE("minimal trees, certificates and size bounds") {
    TreeAutomaton a = parse(kLeftComb);
    CHECK(to_string(*shortest_tree(a)) == "(a)");
    auto cert = certificate(a, a.state("l"));
    REQUIRE(cert);
    CHECK(to_string(cert->first) == "(f (a) (a))");
    CHECK(cert->second.to_string() == "2");
    CHECK_FALSE(max_tree_size(a).has_value());
    Tree t = parse_tree("(f (a) (a))", a.alphabet());
    CHECK(max_tree_size(singleton_automaton(t)) == std::optional<std::size_t>(3));
    CHECK(accepts(singleton_automaton(t), t));
}
