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

std::set<Position> bottom_positions(const TreeAutomaton& del, const Run& run) {
    std::set<Position> out;
    StateId bot = del.state(kBottomState);
    for (const auto& [v, p] : run)
        if (p == bot) out.insert(v);
    return out;
}

// Every run of the deletion automaton labels exactly the deleted positions with <bot>.
void check_deletion_automaton(const Transducer& tr, std::size_t n) {
    if (!tr.input_alphabet().has_constant()) return;
    TreeAutomaton del = deletion_automaton(tr);
    for (const auto& t : enumerate_trees(tr.input_alphabet(), up_to(n))) {
        ApplyTrace trace = apply_traced(tr, t);
        auto runs = enumerate_runs(del, strip_values(t));
        CHECK(trace.output.has_value() == !runs.empty());
        for (const auto& run : runs) CHECK(bottom_positions(del, run) == trace.deleted);
    }
}

void check_types(const TreeAutomaton& a, const Transducer& tr, std::size_t n) {
    if (!tr.input_alphabet().has_constant() || !tr.output_alphabet().has_constant()) return;
    Transducer plain = strip_transducer(tr);
    TreeAutomaton fwd = forward_type(a, plain);
    auto r1 = check_language_construction(
        "forward", fwd, [&](const Tree& s) { return has_preimage(a, plain, s); }, tr.output_alphabet(), up_to(n));
    CHECK_MESSAGE(r1.pass(), r1.text());
    for (const auto& b : {fwd, universal_automaton(tr.output_alphabet())}) {
        TreeAutomaton inv = inverse_type(b, plain);
        auto r2 = check_language_construction(
            "inverse", inv,
            [&](const Tree& t) {
                auto trace = apply_traced(plain, t);
                return trace.output && accepts(b, *trace.output);
            },
            tr.input_alphabet(), up_to(n));
        CHECK_MESSAGE(r2.pass(), r2.text());
    }
}

} // namespace

TEST_CASE("apply moves values with the designation") {
    Transducer b = fixture_transducer("fixB.tt");
    RankedAlphabet in = b.input_alphabet();
    CHECK(to_string(apply(b, parse_tree("(g @3 (a @4) (a @5))", in))) == "(h @3 (a @4) (a @5))");
    CHECK(to_string(apply(b, parse_tree("(f @3 (a @4) (a @5))", in))) == "(h @3 (a @4) (a @5))");

    Transducer d = fixture_transducer("fixD.tt");
    auto trace = apply_traced(d, parse_tree("(f @1 (f @2 (a @3) (a @4)) (a @5))", d.input_alphabet()));
    REQUIRE(trace.output);
    CHECK(to_string(*trace.output) == "(g @1 (g @2 (a @3)))");
    CHECK(trace.deleted == std::set<Position>{Position::parse("2"), Position::parse("1.2")});
    CHECK(trace.moves.at(Position::parse("1.1")).to_string() == "1.1");
}

TEST_CASE("value-erasing rules drop the value") {
    Transducer c = fixture_transducer("fixC.tt");
    auto trace = apply_traced(c, parse_tree("(A @1 (C @2 (hash @3) (hash @4)) (hash @5))", c.input_alphabet()));
    REQUIRE(trace.output);
    CHECK(to_string(*trace.output) == "(A @1 (hash) (hash))");
    CHECK(trace.value_erased.count(Position::parse("1")) == 1);
    CHECK(trace.value_erased.count(Position::parse("2")) == 1);
    CHECK(trace.deleted.count(Position::parse("1.1")) == 1);
}

TEST_CASE("inputs outside the domain") {
    Transducer c = fixture_transducer("fixC.tt");
    Tree t = parse_tree("(B @1 (hash @2) (hash @3))", c.input_alphabet());
    CHECK_THROWS_AS(apply(c, t), NotInDomain);
    auto trace = apply_traced(c, t);
    CHECK_FALSE(trace.output);
    CHECK(trace.stuck_at->is_root());
    CHECK(trace.stuck_state == "p1");
    CHECK_THROWS_AS(apply(c, parse_tree("(hash)", c.input_alphabet())), ImproperInput);
}

TEST_CASE("transducer validation") {
    const char* head = "transducer t\ninsym f 2 outsym h 2\ninsym a 0 outsym a 0\nstate q\ninitial q\n";
    auto with = [&](const std::string& rules) { return parse_transducer(std::string(head) + rules); };
    CHECK_NOTHROW(with("rule q (f z x1 x2) -> (h^z (q x2) (q x1))"));
    CHECK_THROWS_AS(with("rule q (f z x1 x2) -> (h^z (q x1) (q x1))"), ParseError);
    CHECK_THROWS_AS(with("rule q (a z) -> (a^z)\nrule q (a z) -> (a)"), ParseError);
    CHECK_THROWS_AS(with("rule q (f z x1 x2) -> (h^z (q x1) (q x3))"), ParseError);
    CHECK_THROWS_AS(with("rule q (f z x1 x2) -> (h^z (r x1) (q x2))"), ParseError);
    CHECK_THROWS_AS(with("rule q (f z x1 x2) -> (h^z (q x1))"), ParseError);
    CHECK_THROWS_AS(parse_transducer("transducer t\nstate q\n"), Error);
    Transducer t = with("rule q (f z x1 x2) -> (h^z (q x2) (q x1))\nrule q (a z) -> (a)");
    CHECK(parse_transducer(format_transducer(t)).rules().size() == 2);
    CHECK(format_transducer(parse_transducer(format_transducer(t))) == format_transducer(t));
    CHECK(t.find_rule("q", Symbol("a", 0))->is_value_erasing());
}

TEST_CASE("deletion automaton marks exactly the deleted positions" * doctest::test_suite("prop-e")) {
    for (const char* name : {"fixB.tt", "fixC.tt", "fixD.tt", "fixID.tt"}) {
        CAPTURE(name);
        check_deletion_automaton(fixture_transducer(name), 7);
    }
    InstanceGenerator gen(7);
    for (int i = 0; i < 30; ++i) check_deletion_automaton(gen.transducer(), 6);
}

TEST_CASE("domain automaton" * doctest::test_suite("prop-d")) {
    Transducer c = fixture_transducer("fixC.tt");
    TreeAutomaton dom = domain_automaton(c);
    auto r = check_language_construction(
        "domain", dom, [&](const Tree& t) { return apply_traced(c, t).output.has_value(); }, c.input_alphabet(),
        up_to(8));
    CHECK_MESSAGE(r.pass(), r.text());
}

TEST_CASE("forward and inverse types on fixtures" * doctest::test_suite("prop-d")) {
    check_types(fixture_query("fixA.rq").automaton(), fixture_transducer("fixID.tt"), 8);
    check_types(fixture_query("fixB.rq").automaton(), fixture_transducer("fixB.tt"), 8);
    check_types(fixture_query("fixC.rq").automaton(), fixture_transducer("fixC.tt"), 8);
    check_types(fixture_query("fixD.rq").automaton(), fixture_transducer("fixD.tt"), 8);
    TreeAutomaton img = forward_type(fixture_query("fixB.rq").automaton(), fixture_transducer("fixB.tt"));
    CHECK(equivalent(img, singleton_automaton(parse_tree("(h (a) (a))", img.alphabet()))).holds);
}

TEST_CASE("forward and inverse types on random instances" * doctest::test_suite("prop-d")) {
    InstanceGenerator gen(11);
    for (int i = 0; i < 40; ++i) {
        Instance inst = gen.next();
        CAPTURE(format_query(inst.query));
        CAPTURE(format_transducer(inst.transducer));
        check_types(inst.query.automaton(), inst.transducer, 6);
    }
}

TEST_CASE("marked transducer carries marks with the designation") {
    Transducer mk = mark_transducer(fixture_transducer("fixB.tt"), 1);
    Tree t = parse_tree("(g (a) (1:a))", mk.input_alphabet());
    CHECK(to_string(apply_shape(mk, t)) == "(h (a) (1:a))");
    Transducer c = mark_transducer(fixture_transducer("fixC.tt"), 3);
    Tree u = parse_tree("(1:A (3:C (hash) (hash)) (hash))", c.input_alphabet());
    CHECK(to_string(apply_shape(c, u)) == "(1:A (hash) (hash))");
}
