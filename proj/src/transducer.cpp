#include "tqp/transducer.hpp"
#include "tqp/errors.hpp"

#include <algorithm>
#include <deque>
#include <functional>

namespace tqp {

bool TransducerRule::is_subtree_deleting() const {
    for (unsigned i = 1; i <= symbol.rank; ++i)
        if (!context.contains_variable(i)) return true;
    return false;
}

void Transducer::add_state(const std::string& name) {
    if (!states_.insert(name).second) throw ValidationError("duplicate transducer state '" + name + "'");
}

void Transducer::set_initial(const std::string& state) {
    if (!has_state(state)) throw ValidationError("unknown transducer state '" + state + "'");
    if (initial_ && *initial_ != state)
        throw ValidationError("a deterministic transducer has exactly one initial state");
    initial_ = state;
}

const std::string& Transducer::initial() const {
    if (!initial_) throw ValidationError("transducer '" + name_ + "' has no initial state");
    return *initial_;
}

void Transducer::add_rule(TransducerRule rule) {
    const std::string where = "rule " + rule.state + "(" + rule.symbol.to_string() + ")";
    if (!has_state(rule.state)) throw ValidationError(where + ": unknown state '" + rule.state + "'");
    if (rules_.count({rule.state, rule.symbol}))
        throw ValidationError(where + ": a rule for this state and symbol already exists");
    if (rule.child_states.size() != rule.symbol.rank)
        throw ValidationError(where + ": expected " + std::to_string(rule.symbol.rank) + " child entries");
    if (!rule.context.is_linear()) throw ValidationError(where + ": the right-hand side is not linear");
    for (auto v : rule.context.variables())
        if (v > rule.symbol.rank) throw ValidationError(where + ": x" + std::to_string(v) + " is out of range");
    for (unsigned i = 1; i <= rule.symbol.rank; ++i) {
        bool occurs = rule.context.contains_variable(i);
        const auto& st = rule.child_states[i - 1];
        if (occurs && !st) throw ValidationError(where + ": x" + std::to_string(i) + " has no state");
        if (!occurs && st) throw ValidationError(where + ": deleted x" + std::to_string(i) + " has a state");
        if (st && !has_state(*st)) throw ValidationError(where + ": unknown state '" + *st + "'");
    }
    if (rule.value_position) {
        if (!rule.context.valid(*rule.value_position))
            throw ValidationError(where + ": value position " + rule.value_position->to_string() + " is invalid");
        if (rule.context.at(*rule.value_position).is_variable())
            throw ValidationError(where + ": the value position is a variable");
    }
    input_.add(rule.symbol);
    for (const auto& p : rule.context.positions()) {
        const auto& c = rule.context.at(p);
        if (!c.is_variable()) output_.add(c.label());
    }
    auto key = std::make_pair(rule.state, rule.symbol);
    rules_.emplace(std::move(key), std::move(rule));
}

const TransducerRule* Transducer::find_rule(const std::string& state, const Symbol& symbol) const {
    auto it = rules_.find({state, symbol});
    return it == rules_.end() ? nullptr : &it->second;
}

// ---------------------------------------------------------------- apply

ApplyTrace apply_traced(const Transducer& tr, const Tree& t) {
    ApplyTrace trace;
    bool stuck = false;

    std::function<void(const Tree&, const Position&)> drop = [&](const Tree& node, const Position& pos) {
        trace.deleted.insert(pos);
        for (unsigned i = 1; i <= node.children().size(); ++i) drop(node.child(i), pos.child(i));
    };

    std::function<std::optional<Tree>(const Tree&, const Position&, const std::string&, const Position&)> run =
        [&](const Tree& node, const Position& pos, const std::string& state, const Position& out) -> std::optional<Tree> {
        const TransducerRule* rule = tr.find_rule(state, node.label());
        if (!rule) {
            if (!stuck) {
                trace.stuck_at = pos;
                trace.stuck_state = state;
            }
            stuck = true;
            return std::nullopt;
        }
        trace.states[pos] = state;
        if (rule->value_position)
            trace.moves[pos] = out.concat(*rule->value_position);
        else
            trace.value_erased.insert(pos);
        for (unsigned i = 1; i <= rule->symbol.rank; ++i)
            if (!rule->child_states[i - 1]) drop(node.child(i), pos.child(i));

        bool ok = true;
        std::function<std::optional<Tree>(const Context&, const Position&)> build =
            [&](const Context& c, const Position& cpos) -> std::optional<Tree> {
            if (c.is_variable()) {
                unsigned i = c.variable_index();
                return run(node.child(i), pos.child(i), *rule->child_states[i - 1], out.concat(cpos));
            }
            std::vector<Tree> kids;
            for (unsigned k = 1; k <= c.children().size(); ++k) {
                auto sub = build(c.children()[k - 1], cpos.child(k));
                if (!sub) {
                    ok = false;
                    continue;
                }
                kids.push_back(std::move(*sub));
            }
            if (!ok) return std::nullopt;
            std::optional<Nat> value;
            if (rule->value_position && *rule->value_position == cpos) value = node.value();
            return Tree(c.label(), std::move(value), std::move(kids));
        };
        return build(rule->context, Position());
    };

    trace.output = run(t, Position(), tr.initial(), Position());
    if (stuck) trace.output.reset();
    return trace;
}

namespace {

void check_ranks(const Transducer& tr, const Tree& t) {
    if (auto decl = tr.input_alphabet().find(t.label().name, t.label().mark); decl && decl->rank != t.label().rank)
        throw AlphabetMismatch("symbol '" + t.label().to_string() + "' has rank " + std::to_string(decl->rank) +
                               " in the transducer's input alphabet");
    for (const auto& c : t.children()) check_ranks(tr, c);
}

Tree apply_checked(const Transducer& tr, const Tree& t) {
    check_ranks(tr, t);
    auto trace = apply_traced(tr, t);
    if (!trace.output)
        throw NotInDomain("no rule for state '" + trace.stuck_state + "' on '" +
                          t.at(*trace.stuck_at).label().to_string() + "' at position " + trace.stuck_at->to_string());
    return std::move(*trace.output);
}

} // namespace

Tree apply(const Transducer& tr, const Tree& t) {
    if (!t.is_proper()) throw ImproperInput("apply requires a tree in which every node has a value");
    return apply_checked(tr, t);
}

Tree apply_shape(const Transducer& tr, const Tree& t) { return strip_values(apply_checked(tr, strip_values(t))); }

// ---------------------------------------------------------------- automata from transducers

namespace {

TreeAutomaton shape_automaton(const Transducer& tr, const char* sink, const std::string& name) {
    TreeAutomaton a(tr.input_alphabet(), name);
    for (const auto& s : tr.states()) a.add_state(s);
    auto bot = a.add_state(sink);
    a.add_initial(a.state(tr.initial()));
    for (const auto& [key, rule] : tr.rules()) {
        std::vector<StateId> kids;
        for (const auto& st : rule.child_states) kids.push_back(st ? a.state(*st) : bot);
        a.add_rule(a.state(rule.state), rule.symbol, std::move(kids));
    }
    for (const auto& s : tr.input_alphabet().symbols()) a.add_rule(bot, s, std::vector<StateId>(s.rank, bot));
    return a;
}

} // namespace

TreeAutomaton deletion_automaton(const Transducer& tr) { return shape_automaton(tr, kBottomState, "A_" + tr.name()); }

TreeAutomaton domain_automaton(const Transducer& tr) {
    return reduce(shape_automaton(tr, kAnyState, "dom_" + tr.name()));
}

Transducer widen_input(const Transducer& tr, const RankedAlphabet& alphabet) {
    Transducer out = tr;
    for (const auto& s : alphabet.symbols()) out.add_input_symbol(s);
    return out;
}

Transducer strip_transducer(const Transducer& tr) {
    Transducer out(tr.name());
    for (const auto& s : tr.input_alphabet().symbols()) out.add_input_symbol(s);
    for (const auto& s : tr.output_alphabet().symbols()) out.add_output_symbol(s);
    for (const auto& s : tr.states()) out.add_state(s);
    out.set_initial(tr.initial());
    for (const auto& [key, rule] : tr.rules()) {
        TransducerRule r = rule;
        r.value_position.reset();
        out.add_rule(std::move(r));
    }
    return out;
}

// ---------------------------------------------------------------- type inference

ImageAutomaton image_automaton(const TreeAutomaton& a, const Transducer& tr) {
    if (a.has_epsilon()) throw ValidationError("forward type inference requires an epsilon-free automaton");
    for (const auto& s : a.alphabet().symbols())
        if (auto d = tr.input_alphabet().find(s.name, s.mark); d && d->rank != s.rank)
            throw AlphabetMismatch("symbol '" + s.to_string() + "' has rank " + std::to_string(d->rank) +
                                   " in the transducer's input alphabet");

    auto productive = productive_states(a);
    std::vector<const Rule*> a_rules;
    std::vector<std::vector<std::size_t>> a_by_lhs(a.state_count());
    for (const auto& r : a.rules()) {
        a_by_lhs[r.lhs].push_back(a_rules.size());
        a_rules.push_back(&r);
    }
    std::vector<const TransducerRule*> t_rules;
    std::map<std::pair<std::string, Symbol>, std::size_t> t_index;
    for (const auto& [key, rule] : tr.rules()) {
        t_index[key] = t_rules.size();
        t_rules.push_back(&rule);
    }

    ImageAutomaton result{TreeAutomaton(tr.output_alphabet(), "image_" + a.name()), {}};
    TreeAutomaton& out = result.automaton;
    std::map<std::pair<StateId, std::string>, StateId> pairs;
    std::deque<std::pair<StateId, std::string>> work;
    auto pair_state = [&](StateId p, const std::string& q) {
        auto key = std::make_pair(p, q);
        auto it = pairs.find(key);
        if (it != pairs.end()) return it->second;
        auto id = out.add_state(tuple_name({a.state_name(p), q}));
        pairs.emplace(key, id);
        work.push_back(key);
        return id;
    };
    for (auto p : a.initial()) out.add_initial(pair_state(p, tr.initial()));

    while (!work.empty()) {
        auto [p, q] = work.front();
        work.pop_front();
        StateId here = pairs.at({p, q});
        for (auto ri : a_by_lhs[p]) {
            const Rule& ra = *a_rules[ri];
            auto ti = t_index.find({q, ra.symbol});
            if (ti == t_index.end()) continue;
            const TransducerRule& rt = *t_rules[ti->second];
            // a deleted child must still be some tree accepted from its A-state
            bool ok = true;
            for (unsigned i = 0; i < ra.children.size(); ++i)
                if (!rt.child_states[i] && !productive[ra.children[i]]) ok = false;
            if (!ok) continue;

            const std::string rname = "r" + std::to_string(ri + 1);
            const std::string tname = "t" + std::to_string(ti->second + 1);
            // the pair state only heads contexts whose root receives the value
            StateId root = here;
            if (!rt.context.is_variable() && !(rt.value_position && rt.value_position->is_root())) {
                root = out.ensure_state(tuple_name({rname, tname, "eps"}));
                out.add_epsilon(here, root);
            }
            std::function<StateId(const Context&, const Position&)> state_of = [&](const Context& c,
                                                                                     const Position& v) {
                if (c.is_variable()) {
                    unsigned i = c.variable_index();
                    return pair_state(ra.children[i - 1], *rt.child_states[i - 1]);
                }
                if (v.is_root()) return root;
                return out.ensure_state(tuple_name({rname, tname, v.to_string()}));
            };
            if (rt.context.is_variable()) {
                out.add_epsilon(here, state_of(rt.context, Position()));
                continue;
            }
            if (rt.value_position) result.value_states[p].insert(state_of(rt.context.at(*rt.value_position), *rt.value_position));
            for (const auto& v : rt.context.positions()) {
                const Context& c = rt.context.at(v);
                if (c.is_variable()) continue;
                std::vector<StateId> kids;
                for (unsigned k = 1; k <= c.children().size(); ++k)
                    kids.push_back(state_of(c.children()[k - 1], v.child(k)));
                out.add_rule(state_of(c, v), c.label(), std::move(kids));
            }
        }
    }
    return result;
}

TreeAutomaton forward_type(const TreeAutomaton& a, const Transducer& tr) {
    return eliminate_epsilon(image_automaton(a, tr).automaton);
}

TreeAutomaton inverse_type(const TreeAutomaton& b, const Transducer& tr) {
    if (b.has_epsilon()) throw ValidationError("inverse type inference requires an epsilon-free automaton");
    for (const auto& s : b.alphabet().symbols())
        if (auto d = tr.output_alphabet().find(s.name, s.mark); d && d->rank != s.rank)
            throw AlphabetMismatch("symbol '" + s.to_string() + "' has rank " + std::to_string(d->rank) +
                                   " in the transducer's output alphabet");

    std::map<std::pair<StateId, Symbol>, std::vector<const Rule*>> b_index;
    for (const auto& r : b.rules()) b_index[{r.lhs, r.symbol}].push_back(&r);
    std::map<std::string, std::vector<const TransducerRule*>> t_by_state;
    for (const auto& [key, rule] : tr.rules()) t_by_state[rule.state].push_back(&rule);

    TreeAutomaton out(tr.input_alphabet(), "preimage_" + b.name());
    StateId any = out.add_state(kAnyState);
    for (const auto& s : tr.input_alphabet().symbols()) out.add_rule(any, s, std::vector<StateId>(s.rank, any));

    std::map<std::pair<std::string, StateId>, StateId> pairs;
    std::deque<std::pair<std::string, StateId>> work;
    auto pair_state = [&](const std::string& p, StateId q) {
        auto key = std::make_pair(p, q);
        auto it = pairs.find(key);
        if (it != pairs.end()) return it->second;
        auto id = out.add_state(tuple_name({p, b.state_name(q)}));
        pairs.emplace(key, id);
        work.push_back(key);
        return id;
    };
    for (auto q : b.initial()) out.add_initial(pair_state(tr.initial(), q));

    using Assignment = std::map<unsigned, StateId>;
    std::function<std::vector<Assignment>(const Context&, StateId)> assign = [&](const Context& c, StateId q) {
        std::vector<Assignment> result;
        if (c.is_variable()) {
            result.push_back(Assignment{{c.variable_index(), q}});
            return result;
        }
        auto it = b_index.find({q, c.label()});
        if (it == b_index.end()) return result;
        for (const Rule* r : it->second) {
            std::vector<Assignment> partial{Assignment{}};
            for (unsigned k = 0; k < r->children.size() && !partial.empty(); ++k) {
                auto sub = assign(c.children()[k], r->children[k]);
                std::vector<Assignment> next;
                for (const auto& p : partial)
                    for (const auto& s : sub) {
                        Assignment m = p;
                        m.insert(s.begin(), s.end());
                        next.push_back(std::move(m));
                    }
                partial = std::move(next);
            }
            for (auto& m : partial) result.push_back(std::move(m));
        }
        return result;
    };

    while (!work.empty()) {
        auto [p, q] = work.front();
        work.pop_front();
        StateId here = pairs.at({p, q});
        auto rs = t_by_state.find(p);
        if (rs == t_by_state.end()) continue;
        for (const TransducerRule* rt : rs->second) {
            for (const auto& m : assign(rt->context, q)) {
                std::vector<StateId> kids;
                for (unsigned i = 1; i <= rt->symbol.rank; ++i) {
                    const auto& st = rt->child_states[i - 1];
                    kids.push_back(st ? pair_state(*st, m.at(i)) : any);
                }
                out.add_rule(here, rt->symbol, std::move(kids));
            }
        }
    }
    return reduce(out);
}

// ---------------------------------------------------------------- marking

namespace {

Context mark_at(const Context& c, const Position& target, unsigned mark, const Position& here = Position()) {
    if (c.is_variable()) return c;
    std::vector<Context> kids;
    for (unsigned k = 1; k <= c.children().size(); ++k)
        kids.push_back(mark_at(c.children()[k - 1], target, mark, here.child(k)));
    Symbol label = here == target ? c.label().marked(mark) : c.label();
    return Context::node(std::move(label), std::move(kids));
}

} // namespace

Transducer mark_transducer(const Transducer& tr, unsigned n) {
    Transducer out(tr.name() + "_mk");
    for (const auto& s : tr.input_alphabet().with_marks(n).symbols()) out.add_input_symbol(s);
    for (const auto& s : tr.output_alphabet().with_marks(n).symbols()) out.add_output_symbol(s);
    for (const auto& s : tr.states()) out.add_state(s);
    out.set_initial(tr.initial());
    for (const auto& [key, rule] : tr.rules()) {
        if (rule.symbol.is_marked()) throw ValidationError("mark_transducer expects an unmarked transducer");
        TransducerRule plain = rule;
        plain.value_position.reset();
        out.add_rule(plain);
        for (unsigned i = 1; i <= n; ++i) {
            TransducerRule marked = plain;
            marked.symbol = rule.symbol.marked(i);
            if (rule.value_position) marked.context = mark_at(rule.context, *rule.value_position, i);
            out.add_rule(std::move(marked));
        }
    }
    return out;
}

} // namespace tqp
