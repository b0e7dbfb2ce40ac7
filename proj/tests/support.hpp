#pragma once

#include "tqp/automaton.hpp"
#include "tqp/automaton_io.hpp"
#include "tqp/errors.hpp"
#include "tqp/query.hpp"
#include "tqp/transducer.hpp"
#include "tqp/tree_io.hpp"

#include <algorithm>
#include <set>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#ifndef TQP_FIXTURES
#define TQP_FIXTURES "tests/fixtures"
#endif

namespace tqp::testing {

inline std::string read_fixture(const std::string& name) {
    std::ifstream in(std::string(TQP_FIXTURES) + "/" + name);
    if (!in) throw std::runtime_error("missing fixture " + name);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// States whose language contains t, computed bottom-up with epsilon closure.
inline std::set<StateId> states_for(const TreeAutomaton& a, const Tree& t) {
    std::vector<std::set<StateId>> kids;
    for (std::size_t i = 1; i <= t.label().rank; ++i) kids.push_back(states_for(a, t.child(i)));
    std::set<StateId> out;
    for (const auto& r : a.rules()) {
        if (r.symbol != t.label()) continue;
        bool ok = true;
        for (std::size_t i = 0; i < kids.size() && ok; ++i) ok = kids[i].count(r.children[i]) != 0;
        if (ok) out.insert(r.lhs);
    }
    for (bool grew = true; grew;) {
        grew = false;
        for (const auto& e : a.epsilon_rules())
            if (out.count(e.to) && out.insert(e.from).second) grew = true;
    }
    return out;
}

inline bool member(const TreeAutomaton& a, const Tree& t) {
    auto s = states_for(a, t);
    for (StateId p : a.initial())
        if (s.count(p)) return true;
    return false;
}

inline Query fixture_query(const std::string& name) { return parse_query(read_fixture(name)); }
inline Transducer fixture_transducer(const std::string& name) { return parse_transducer(read_fixture(name)); }

/// Does some accepting run of a on t put `state` at v?
inline bool run_reaches(const TreeAutomaton& a, const Tree& t, const Position& v, StateId state) {
    for (const auto& run : enumerate_runs(a, t))
        if (run.at(v) == state) return true;
    return false;
}

struct Instance {
    Query query;
    Transducer transducer;
};

/// Small random queries and transducers over fixed alphabets.
class InstanceGenerator {
public:
    explicit InstanceGenerator(std::uint32_t seed) : rng_(seed) {}

    Instance next() {
        for (;;) {
            auto q = query();
            if (!q || q->selections().empty()) continue;
            return Instance{std::move(*q), transducer()};
        }
    }

    // 2..max_states states over f/2 g/1 a/0 b/0; epsilon rules with probability `eps` per pair.
    TreeAutomaton automaton(unsigned max_states = 4, double eps = 0.0) {
        const std::vector<Symbol> in = {{"f", 2}, {"g", 1}, {"a", 0}, {"b", 0}};
        unsigned k = pick(2, max_states);
        TreeAutomaton a(RankedAlphabet{in[0], in[1], in[2], in[3]}, "R");
        for (unsigned i = 0; i < k; ++i) a.add_state("q" + std::to_string(i));
        a.add_initial(0);
        if (chance(0.2)) a.add_initial(1);
        for (StateId p = 0; p < k; ++p)
            for (const auto& s : in) {
                if (!chance(s.rank == 0 ? 0.5 : 0.45)) continue;
                std::vector<StateId> kids;
                for (unsigned i = 0; i < s.rank; ++i) kids.push_back(pick(0, k - 1));
                a.add_rule(p, s, kids);
            }
        for (StateId p = 0; p < k; ++p)
            for (StateId q = 0; q < k; ++q)
                if (p != q && chance(eps)) a.add_epsilon(p, q);
        return a;
    }

    std::optional<Query> query() {
        TreeAutomaton a = automaton();
        unsigned k = static_cast<unsigned>(a.state_count());
        unsigned arity = pick(1, std::min(3u, k));
        if (arity == 3 && chance(0.5)) arity = 2;
        std::vector<std::vector<std::string>> sel;
        unsigned count = pick(1, 2);
        for (unsigned j = 0; j < count; ++j) {
            std::vector<unsigned> idx(k);
            for (unsigned i = 0; i < k; ++i) idx[i] = i;
            std::shuffle(idx.begin(), idx.end(), rng_);
            std::vector<std::string> tuple;
            for (unsigned i = 0; i < arity; ++i) tuple.push_back("q" + std::to_string(idx[i]));
            sel.push_back(tuple);
        }
        try {
            return Query(a, arity, sel);
        } catch (const Error&) {
            return std::nullopt;
        }
    }

    Transducer transducer() {
        const std::vector<Symbol> in = {{"f", 2}, {"g", 1}, {"a", 0}, {"b", 0}};
        Transducer tr("R");
        unsigned m = pick(1, 2);
        for (unsigned i = 0; i < m; ++i) tr.add_state("t" + std::to_string(i));
        tr.set_initial("t0");
        for (unsigned i = 0; i < m; ++i)
            for (const auto& s : in) {
                if (!chance(0.85)) continue;
                TransducerRule r;
                r.state = "t" + std::to_string(i);
                r.symbol = s;
                std::vector<unsigned> kept;
                r.child_states.assign(s.rank, std::nullopt);
                for (unsigned x = 1; x <= s.rank; ++x)
                    if (chance(0.8)) {
                        kept.push_back(x);
                        r.child_states[x - 1] = "t" + std::to_string(pick(0, m - 1));
                    }
                std::shuffle(kept.begin(), kept.end(), rng_);
                r.context = context(kept, true);
                std::vector<Position> slots;
                for (const auto& p : r.context.positions())
                    if (!r.context.at(p).is_variable()) slots.push_back(p);
                if (!slots.empty() && !chance(0.15)) r.value_position = slots[pick(0, slots.size() - 1)];
                tr.add_rule(std::move(r));
            }
        return tr;
    }

private:
    Context leaf() { return Context::node(chance(0.5) ? Symbol("c", 0) : Symbol("d", 0)); }

    Context context(const std::vector<unsigned>& vars, bool top) {
        if (vars.empty()) return chance(0.3) ? Context::node(Symbol("k", 1), {leaf()}) : leaf();
        if (vars.size() == 1) {
            double r = std::uniform_real_distribution<>(0, 1)(rng_);
            if (r < (top ? 0.2 : 0.5)) return Context::variable(vars[0]);
            if (r < 0.7) return Context::node(Symbol("k", 1), {context(vars, false)});
            if (chance(0.5)) return Context::node(Symbol("h", 2), {context(vars, false), leaf()});
            return Context::node(Symbol("h", 2), {leaf(), context(vars, false)});
        }
        return Context::node(Symbol("h", 2), {context({vars[0]}, false), context({vars[1]}, false)});
    }

    unsigned pick(unsigned lo, unsigned hi) { return std::uniform_int_distribution<unsigned>(lo, hi)(rng_); }
    bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }

    std::mt19937 rng_;
};

} // namespace tqp::testing
