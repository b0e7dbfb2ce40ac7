#include "tqp/preservation.hpp"
#include "tqp/errors.hpp"
#include "tqp/tree_io.hpp"

#include <algorithm>
#include <deque>
#include <functional>

namespace tqp {

const char* to_string(LossKind kind) { return kind == LossKind::Deleted ? "deleted" : "value-erased"; }

namespace {

/// Steps of the unary check on automaton `a`, where `base[x]` names the
/// query state behind state x of `a` and `selected[x]` says whether it is tested.
void unary_core(const TreeAutomaton& a, const std::vector<std::string>& base, const std::vector<bool>& selected,
                const std::vector<std::string>& tuple, const Transducer& tr, WeakDecision& out) {
    TreeAutomaton del = deletion_automaton(tr);
    std::vector<std::pair<StateId, StateId>> origin;
    TreeAutomaton prod = product(a, del, &origin);
    TreeAutomaton reduced = reduce(prod);
    out.sizes["deletion_automaton_states"] = del.state_count();
    out.sizes["product_states"] = std::max(out.sizes["product_states"], prod.state_count());
    out.sizes["reduced_product_states"] = std::max(out.sizes["reduced_product_states"], reduced.state_count());

    std::vector<std::vector<const Rule*>> by_lhs(reduced.state_count());
    for (const auto& r : reduced.rules()) by_lhs[r.lhs].push_back(&r);

    for (StateId x = 0; x < reduced.state_count(); ++x) {
        auto [p, pt] = origin[prod.state(reduced.state_name(x))];
        if (!selected[p]) continue;
        const std::string& tstate = del.state_name(pt);
        WeakWitness w;
        w.tuple = tuple.empty() ? std::vector<std::string>{base[p]} : tuple;
        w.product_state = reduced.state_name(x);
        w.query_state = base[p];
        w.transducer_state = tstate;
        if (tstate == kBottomState) {
            auto cert = certificate(reduced, x);
            if (!cert) continue;
            w.kind = LossKind::Deleted;
            w.tree = number_preorder(cert->first);
            w.position = cert->second;
            out.witnesses.push_back(std::move(w));
            continue;
        }
        std::set<Symbol> seen;
        for (const Rule* r : by_lhs[x]) {
            const TransducerRule* rt = tr.find_rule(tstate, r->symbol);
            if (!rt || !rt->is_value_erasing() || !seen.insert(r->symbol).second) continue;
            auto cert = certificate(reduced, *r);
            if (!cert) continue;
            WeakWitness e = w;
            e.kind = LossKind::ValueErased;
            e.symbol = r->symbol.to_string();
            e.tree = number_preorder(cert->first);
            e.position = cert->second;
            out.witnesses.push_back(std::move(e));
        }
    }
}

} // namespace

WeakDecision weak_preserves_unary(const Query& q, const Transducer& given) {
    const Transducer tr = widen_input(given, q.automaton().alphabet());
    if (q.arity() != 1) throw ValidationError("the unary check needs a query of arity 1");
    const auto& a = q.automaton();
    std::vector<std::string> base;
    for (StateId p = 0; p < a.state_count(); ++p) base.push_back(a.state_name(p));
    std::vector<bool> selected(a.state_count(), false);
    for (const auto& s : q.selections()) selected[s[0]] = true;
    WeakDecision out;
    out.sizes["query_states"] = a.state_count();
    unary_core(a, base, selected, {}, tr, out);
    out.preserved = out.witnesses.empty();
    return out;
}

WeakDecision weak_preserves(const Query& q, const Transducer& given) {
    const Transducer tr = widen_input(given, q.automaton().alphabet());
    const auto& a = q.automaton();
    WeakDecision out;
    out.sizes["query_states"] = a.state_count();
    for (const auto& s : q.selections()) {
        std::vector<StateId> proj;
        TreeAutomaton cov = coverage_automaton(a, s, &proj);
        out.sizes["coverage_states"] = std::max(out.sizes["coverage_states"], cov.state_count());
        std::vector<std::string> base;
        std::vector<bool> selected;
        for (StateId x = 0; x < cov.state_count(); ++x) {
            base.push_back(a.state_name(proj[x]));
            selected.push_back(std::find(s.begin(), s.end(), proj[x]) != s.end());
        }
        unary_core(cov, base, selected, q.names(s), tr, out);
    }
    out.preserved = out.witnesses.empty();
    return out;
}

// ---------------------------------------------------------------- construction

namespace {

struct Built {
    TreeAutomaton automaton;
    std::vector<std::vector<std::string>> tuples;
};

/// Image automaton with per-index selection classes carried over.
Built build_target(const TreeAutomaton& a, const std::vector<std::set<StateId>>& classes, const Transducer& tr,
                   SizeReport& sizes) {
    ImageAutomaton img = image_automaton(a, tr);
    TreeAutomaton out = eliminate_epsilon(img.automaton);
    sizes["image_states"] = std::max(sizes["image_states"], img.automaton.state_count());
    sizes["target_states"] = std::max(sizes["target_states"], out.state_count());

    std::vector<std::set<std::string>> names(classes.size());
    for (std::size_t i = 0; i < classes.size(); ++i)
        for (auto p : classes[i]) {
            auto it = img.value_states.find(p);
            if (it == img.value_states.end()) continue;
            for (auto x : it->second) {
                const auto& name = img.automaton.state_name(x);
                if (out.find_state(name)) names[i].insert(name);
            }
        }
    std::vector<std::vector<std::string>> tuples{{}};
    for (const auto& cls : names) {
        std::vector<std::vector<std::string>> next;
        for (const auto& t : tuples)
            for (const auto& n : cls) {
                auto u = t;
                u.push_back(n);
                next.push_back(std::move(u));
            }
        tuples = std::move(next);
    }
    return Built{std::move(out), std::move(tuples)};
}

} // namespace

Query construct_weak_query(const Query& q, const Transducer& given, SizeReport* sizes) {
    const Transducer tr = widen_input(given, q.automaton().alphabet());
    WeakDecision weak = q.arity() == 1 ? weak_preserves_unary(q, tr) : weak_preserves(q, tr);
    if (!weak.preserved)
        throw ValidationError("the transducer does not weakly preserve the query; no target query exists");
    SizeReport local;
    SizeReport& sz = sizes ? *sizes : local;

    if (q.arity() == 1) {
        std::set<StateId> selected;
        for (const auto& s : q.selections()) selected.insert(s[0]);
        Built b = build_target(q.automaton(), {selected}, tr, sz);
        b.automaton.set_name(q.automaton().name() + "_target");
        return Query(b.automaton, 1, b.tuples);
    }

    std::vector<Built> parts;
    for (const auto& s : q.selections()) {
        NormalQuery nq = normalize(q.restrict_to(s));
        sz["normal_states"] = std::max(sz["normal_states"], nq.automaton.state_count());
        parts.push_back(build_target(nq.automaton, nq.classes, tr, sz));
    }
    if (parts.size() == 1) {
        parts[0].automaton.set_name(q.automaton().name() + "_target");
        return Query(parts[0].automaton, q.arity(), parts[0].tuples);
    }
    std::vector<TreeAutomaton> automata;
    std::vector<std::vector<std::string>> tuples;
    for (std::size_t k = 0; k < parts.size(); ++k) {
        automata.push_back(parts[k].automaton);
        std::string tag = std::to_string(k + 1);
        for (const auto& t : parts[k].tuples) {
            std::vector<std::string> renamed;
            for (const auto& n : t) renamed.push_back(tuple_name({tag, n}));
            tuples.push_back(std::move(renamed));
        }
    }
    TreeAutomaton u = disjoint_union(automata);
    u.set_name(q.automaton().name() + "_target");
    return Query(u, q.arity(), tuples);
}

// ---------------------------------------------------------------- strong check

TreeAutomaton exactly_once_automaton(const RankedAlphabet& alphabet, unsigned n) {
    if (n > 16) throw ValidationError("at most 16 mark indices are supported");
    RankedAlphabet plain = alphabet.unmarked();
    TreeAutomaton out(plain.with_marks(n), "once");
    using Mask = std::uint32_t;
    const Mask full = static_cast<Mask>((std::uint64_t(1) << n) - 1);
    std::map<Mask, StateId> ids;
    std::deque<Mask> work;
    auto intern = [&](Mask m) {
        if (auto it = ids.find(m); it != ids.end()) return it->second;
        std::string name = "<marks,{";
        bool first = true;
        for (unsigned i = 0; i < n; ++i)
            if (m >> i & 1u) {
                name += (first ? "" : ",") + std::to_string(i + 1);
                first = false;
            }
        auto id = out.add_state(name + "}>");
        ids.emplace(m, id);
        work.push_back(m);
        return id;
    };
    out.add_initial(intern(full));
    while (!work.empty()) {
        Mask m = work.front();
        work.pop_front();
        StateId here = ids.at(m);
        for (const auto& sym : plain.symbols()) {
            for (unsigned self = 0; self <= n; ++self) {
                if (self && !(m >> (self - 1) & 1u)) continue;
                Mask rem = self ? m & ~(Mask(1) << (self - 1)) : m;
                std::vector<Mask> kids(sym.rank, 0);
                std::function<void(unsigned)> go = [&](unsigned i) {
                    if (i == n) {
                        if (sym.rank == 0 && rem != 0) return;
                        std::vector<StateId> states;
                        for (auto k : kids) states.push_back(intern(k));
                        out.add_rule(here, self ? sym.marked(self) : sym, std::move(states));
                        return;
                    }
                    if (!(rem >> i & 1u) || sym.rank == 0) {
                        go(i + 1);
                        return;
                    }
                    for (unsigned c = 0; c < sym.rank; ++c) {
                        kids[c] |= Mask(1) << i;
                        go(i + 1);
                        kids[c] &= ~(Mask(1) << i);
                    }
                };
                go(0);
            }
        }
    }
    return reduce(out);
}

MarkedAutomata marked_automata(const Query& q, const Transducer& given) {
    const Transducer tr = widen_input(given, q.automaton().alphabet());
    const unsigned n = q.arity();
    std::vector<NormalQuery> normal;
    for (const auto& s : q.selections()) normal.push_back(normalize(q.restrict_to(s)));
    TreeAutomaton marked = mark_query_automaton(normal);
    Transducer tmk = mark_transducer(tr, n);
    TreeAutomaton image = forward_type(marked, tmk);
    TreeAutomaton roundtrip = inverse_type(image, tmk);
    TreeAutomaton index = index_automaton(q.automaton(), n);
    TreeAutomaton once = exactly_once_automaton(RankedAlphabet::merge(index.alphabet(), tmk.input_alphabet()), n);
    return MarkedAutomata{std::move(marked), std::move(tmk), std::move(image), std::move(roundtrip), std::move(index),
                          std::move(once)};
}

namespace {

/// Two proper trees with the same image that the query tells apart, built
/// from a marked tree u outside A_mk.
std::optional<std::pair<Tree, Tree>> collision_from(const Query& q, const Transducer& tr, const MarkedAutomata& m,
                                                    const Tree& u) {
    Tree image = apply_shape(m.transducer, u);
    TreeAutomaton pre = inverse_type(singleton_automaton(image), m.transducer);
    auto w = shortest_tree(reduce(product(m.marked, pre)));
    if (!w) return std::nullopt;

    Tree t1 = number_preorder(strip_marks(*w));
    Tree out1 = apply(tr, t1);
    Tree shape2 = strip_marks(u);
    ApplyTrace trace = apply_traced(tr, shape2);
    Tree t2 = shape2;
    std::uint64_t fresh = t1.size() + 1;
    for (const auto& v : positions(shape2)) {
        std::optional<Nat> value;
        if (auto mv = trace.moves.find(v); mv != trace.moves.end() && out1.valid(mv->second))
            value = out1.at(mv->second).value();
        t2 = set_value(t2, v, value ? *value : Nat(fresh++));
    }
    try {
        if (!distinguishes(out1, eval_values(q, t1), apply(tr, t2), eval_values(q, t2))) return std::nullopt;
    } catch (const NotInDomain&) {
        return std::nullopt;
    }
    return std::make_pair(t1, t2);
}

std::map<Nat, Position> value_index(const Tree& t) {
    std::map<Nat, Position> out;
    for (const auto& v : positions(t))
        if (auto x = t.at(v).value()) out.emplace(*x, v);
    return out;
}

} // namespace

bool distinguishes(const Tree& first_image, const std::set<ValueTuple>& first_answers, const Tree& second_image,
                   const std::set<ValueTuple>& second_answers) {
    if (strip_values(first_image) != strip_values(second_image)) return false;
    auto where = value_index(first_image);
    for (const auto& tuple : first_answers) {
        if (second_answers.count(tuple)) continue;
        bool visible = std::all_of(tuple.begin(), tuple.end(), [&](const Nat& x) {
            auto it = where.find(x);
            return it != where.end() && second_image.at(it->second).value() == x;
        });
        if (visible) return true;
    }
    return false;
}

StrongDecision strong_preserves(const Query& q, const Transducer& given, std::size_t budget) {
    const Transducer tr = widen_input(given, q.automaton().alphabet());
    StrongDecision out;
    WeakDecision weak = weak_preserves(q, tr);
    out.sizes = weak.sizes;
    if (!weak.preserved) {
        out.preserved = false;
        out.weak = std::move(weak);
        return out;
    }
    MarkedAutomata m = marked_automata(q, tr);
    // Trees outside L(A) answer nothing, so the round trip is not narrowed to
    // L(A); A_mk is narrowed to the domain instead.
    TreeAutomaton source = reduce(product(m.marked, domain_automaton(m.transducer)));
    TreeAutomaton both = reduce(product(m.roundtrip, m.once));
    out.sizes["marked_query_states"] = m.marked.state_count();
    out.sizes["marked_domain_states"] = source.state_count();
    out.sizes["marked_image_states"] = m.image.state_count();
    out.sizes["roundtrip_states"] = m.roundtrip.state_count();
    out.sizes["exactly_once_states"] = m.once.state_count();
    out.sizes["intersection_states"] = both.state_count();

    LanguageCheck eq = equivalent(source, both, budget);
    if (eq.holds) return out;
    out.preserved = false;
    out.marked_witness = eq.counterexample;
    if (accepts(both, *eq.counterexample) && !accepts(source, *eq.counterexample))
        out.collision = collision_from(q, tr, m, *eq.counterexample);
    return out;
}

} // namespace tqp
