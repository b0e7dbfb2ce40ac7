#include "support.hpp"
#include "tqp/oracle.hpp"

#include <doctest.h>

using namespace tqp;
using namespace tqp::testing;

namespace {

EnumerationBudget up_to(std::size_t n) {
    EnumerationBudget b;
    b.max_nodes = n;
    return b;
}

TreeAutomaton language_of(const std::vector<std::string>& trees, const RankedAlphabet& sigma) {
    std::vector<TreeAutomaton> parts;
    for (const auto& t : trees) parts.push_back(singleton_automaton(parse_tree(t, sigma)));
    return disjoint_union(parts);
}

// Each class of the normal form is hit exactly once by every run.
void check_normal_form(const Query& q, std::size_t n) {
    for (const auto& s : q.selections()) {
        Query single = q.restrict_to(s);
        NormalQuery nq = normalize(single);
        REQUIRE(nq.classes.size() == q.arity());
        Query nqq = nq.to_query();
        for (const auto& t : enumerate_trees(q.automaton().alphabet(), up_to(n))) {
            CHECK(eval_values(nqq, t) == eval_values(single, t));
            for (const auto& run : enumerate_runs(nq.automaton, strip_values(t))) {
                for (const auto& cls : nq.classes) {
                    std::size_t hits = 0;
                    for (const auto& [v, p] : run) hits += cls.count(p);
                    CHECK(hits == 1);
                }
            }
        }
        for (std::size_t i = 0; i < nq.classes.size(); ++i)
            for (std::size_t j = i + 1; j < nq.classes.size(); ++j)
                for (auto p : nq.classes[i]) CHECK(nq.classes[j].count(p) == 0);
    }
}

void check_coverage(const Query& q, std::size_t n) {
    for (const auto& s : q.selections()) {
        std::vector<StateId> proj;
        TreeAutomaton cov = coverage_automaton(q.automaton(), s, &proj);
        for (const auto& t : enumerate_shapes(q.automaton().alphabet(), up_to(n))) {
            CHECK(accepts(cov, t) == some_run_covers(q.automaton(), t, s));
            for (const auto& run : enumerate_runs(cov, t, 200)) {
                Run down;
                for (const auto& [v, p] : run) down[v] = proj[p];
                bool found = false;
                for (const auto& r : enumerate_runs(q.automaton(), t)) found = found || r == down;
                CHECK(found);
            }
        }
    }
}

} // namespace

TEST_CASE("binary query on the running example") {
    Query q = fixture_query("fixA.rq");
    Tree t = parse_tree("(f @1 (a @2) (f @3 (a @4) (a @5)))", q.automaton().alphabet());
    CHECK(format_position_tuples(eval(q, t)) == "{(1,2),(1,2.2)}");
    CHECK(format_value_tuples(eval_values(q, t)) == "{(2,3),(2,5)}");
    CHECK(eval_reference(q, t) == eval(q, t));
    CHECK(enumerate_runs(q.automaton(), t).size() == 1);
}

TEST_CASE("query files") {
    Query q = fixture_query("fixA.rq");
    CHECK(q.arity() == 2);
    CHECK(q.selections().size() == 1);
    Query back = parse_query(format_query(q));
    CHECK(format_query(back) == format_query(q));
    const char* head = "automaton x\nsym f 2\nsym a 0\nstate p r\ninitial p\nrule p -> f(r, r)\nrule r -> a\n";
    CHECK_THROWS_AS(parse_query(std::string(head) + "select (p, p)"), ParseError);
    CHECK_THROWS_AS(parse_query(std::string(head) + "select (p, r)\nselect (r)"), ParseError);
    CHECK_THROWS_AS(parse_query(std::string(head) + "select (z)"), ParseError);
    CHECK_THROWS_AS(parse_query(std::string(head) + "rule p -> r\nselect (r)"), ParseError);
    Query dead = parse_query(std::string(head) + "state u\nselect (u)\nselect (r)");
    CHECK(dead.selections().size() == 1);
    CHECK(dead.dropped_tuples() == 1);
    Query none = parse_query(std::string(head) + "arity 2");
    CHECK(none.arity() == 2);
    CHECK(parse_query(format_query(none)).arity() == 2);
}

TEST_CASE("eval_values needs a proper tree") {
    Query q = fixture_query("fixA.rq");
    Tree t = parse_tree("(f @1 (a) (a @2))", q.automaton().alphabet());
    CHECK_THROWS_AS(eval_values(q, t), ImproperInput);
    Tree same = parse_tree("(f @7 (a @7) (a @7))", q.automaton().alphabet());
    CHECK(format_value_tuples(eval_values(q, same)) == "{(7,7)}");
    Tree u = parse_tree("(f @1 (a) (a @3))", q.automaton().alphabet());
    CHECK(format_value_tuples(eval_values_partial(q, u)) == "{}");
}

TEST_CASE("both evaluation paths agree on fixtures" * doctest::test_suite("prop-a")) {
    for (const char* name : {"fixA.rq", "fixB.rq", "fixC.rq", "fixC_unary.rq", "fixD.rq"}) {
        CAPTURE(name);
        auto r = check_eval_equivalence(fixture_query(name), up_to(8));
        CHECK_MESSAGE(r.pass(), r.text());
        CHECK(r.checked > 0);
    }
}

TEST_CASE("both evaluation paths agree on random queries" * doctest::test_suite("prop-a")) {
    InstanceGenerator gen(3);
    for (int i = 0; i < 60; ++i) {
        auto q = gen.query();
        if (!q) continue;
        CAPTURE(format_query(*q));
        auto r = check_eval_equivalence(*q, up_to(i < 20 ? 8 : 6));
        CHECK_MESSAGE(r.pass(), r.text());
    }
}

TEST_CASE("answers ignore values outside the selected positions" * doctest::test_suite("prop-a")) {
    InstanceGenerator gen(5);
    for (int i = 0; i < 40; ++i) {
        auto q = gen.query();
        if (!q) continue;
        for (const auto& t : enumerate_trees(q->automaton().alphabet(), up_to(6))) {
            auto pos = eval(*q, t);
            std::set<Position> used;
            for (const auto& tuple : pos) used.insert(tuple.begin(), tuple.end());
            Tree u = t;
            std::uint64_t fresh = 1000;
            for (const auto& v : positions(t))
                if (!used.count(v)) u = set_value(u, v, Nat(fresh++));
            CHECK(eval_values(*q, u) == eval_values(*q, t));
        }
    }
}

TEST_CASE("normal form keeps answers and hits each class once" * doctest::test_suite("prop-f")) {
    check_normal_form(fixture_query("fixA.rq"), 9);
    check_normal_form(fixture_query("fixB.rq"), 9);
    check_normal_form(fixture_query("fixC.rq"), 9);
    check_normal_form(fixture_query("fixD.rq"), 9);
    InstanceGenerator gen(17);
    for (int i = 0; i < 40; ++i) {
        auto q = gen.query();
        if (!q) continue;
        CAPTURE(format_query(*q));
        check_normal_form(*q, 6);
    }
}

TEST_CASE("coverage automaton" * doctest::test_suite("prop-f")) {
    Query c = fixture_query("fixC.rq");
    TreeAutomaton cov = coverage_automaton(c.automaton(), *c.selections().begin());
    Tree only = parse_tree("(A (B (C (hash) (hash)) (hash)) (hash))", c.automaton().alphabet());
    CHECK(equivalent(cov, singleton_automaton(only)).holds);
    check_coverage(c, 9);
    check_coverage(fixture_query("fixA.rq"), 8);
    Query b = fixture_query("fixB.rq");
    CHECK(equivalent(coverage_automaton(b.automaton(), {}), b.automaton()).holds);
    InstanceGenerator gen(19);
    for (int i = 0; i < 30; ++i) {
        auto q = gen.query();
        if (q) check_coverage(*q, 6);
    }
}

TEST_CASE("marked query automata" * doctest::test_suite("prop-f")) {
    Query b = fixture_query("fixB.rq");
    TreeAutomaton mk = mark_query_automaton({normalize(b)});
    RankedAlphabet sigma = b.automaton().alphabet().with_marks(1);
    CHECK(equivalent(mk, language_of({"(f (1:a) (a))", "(g (a) (1:a))"}, sigma)).holds);

    Query c = fixture_query("fixC.rq");
    TreeAutomaton cmk = mark_query_automaton({normalize(c)});
    CHECK(equivalent(cmk, language_of({"(1:A (2:B (3:C (hash) (hash)) (hash)) (hash))"},
                                      c.automaton().alphabet().with_marks(3)))
              .holds);

    TreeAutomaton idx = index_automaton(b.automaton(), 1);
    for (const char* t : {"(f (1:a) (a))", "(f (a) (1:a))", "(g (1:a) (a))", "(g (a) (1:a))", "(f (1:a) (1:a))",
                          "(1:f (a) (a))", "(f (a) (a))"})
        CHECK(accepts(idx, parse_tree(t, sigma)));
    CHECK_FALSE(accepts(idx, parse_tree("(f (f (a) (a)) (a))", sigma)));

    for (const auto& t : enumerate_shapes(sigma, up_to(7)))
        if (accepts(mk, t)) CHECK(accepts(b.automaton(), strip_marks(t)));
}
