#include "tqp/oracle.hpp"
#include "tqp/preservation.hpp"
#include "tqp/errors.hpp"
#include "tqp/tree_io.hpp"

#include <map>
#include <sstream>

namespace tqp {

// ---------------------------------------------------------------- enumeration

std::vector<Tree> enumerate_shapes(const RankedAlphabet& alphabet, const EnumerationBudget& budget) {
    if (!alphabet.has_constant()) throw ValidationError("the alphabet has no constant, so it has no finite trees");
    const auto symbols = alphabet.symbols();
    std::vector<std::vector<Tree>> by_size(budget.max_nodes + 1);
    std::size_t total = 0;
    for (std::size_t size = 1; size <= budget.max_nodes; ++size) {
        auto& out = by_size[size];
        for (const auto& sym : symbols) {
            if (sym.rank == 0) {
                if (size == 1) out.emplace_back(sym);
                continue;
            }
            if (size - 1 < sym.rank) continue;
            // split size-1 nodes among the children, each getting at least one
            std::vector<std::size_t> parts(sym.rank, 1);
            std::function<void(unsigned, std::size_t)> split = [&](unsigned i, std::size_t left) {
                if (i + 1 == sym.rank) {
                    parts[i] = left;
                    std::vector<Tree> kids;
                    std::function<void(unsigned)> pick = [&](unsigned k) {
                        if (k == sym.rank) {
                            out.emplace_back(sym, kids);
                            if (total + out.size() > budget.max_trees)
                                throw BudgetExceeded("tree enumeration exceeded " + std::to_string(budget.max_trees) +
                                                     " trees");
                            return;
                        }
                        for (const auto& c : by_size[parts[k]]) {
                            kids.push_back(c);
                            pick(k + 1);
                            kids.pop_back();
                        }
                    };
                    pick(0);
                    return;
                }
                for (std::size_t n = 1; n + (sym.rank - i - 1) <= left; ++n) {
                    parts[i] = n;
                    split(i + 1, left - n);
                }
            };
            split(0, size - 1);
        }
        total += out.size();
    }
    std::vector<Tree> all;
    all.reserve(total);
    for (auto& v : by_size)
        for (auto& t : v) all.push_back(std::move(t));
    return all;
}

std::vector<Tree> enumerate_trees(const RankedAlphabet& alphabet, const EnumerationBudget& budget) {
    auto shapes = enumerate_shapes(alphabet, budget);
    for (auto& t : shapes) t = number_preorder(t, budget.first_value);
    return shapes;
}

// ---------------------------------------------------------------- reports

std::string OracleReport::text() const {
    std::ostringstream os;
    os << check << ": " << (pass() ? "pass" : "FAIL") << " (" << checked << " checked, " << discrepancies.size()
       << " discrepancies, " << warnings.size() << " warnings)\n";
    for (const auto& d : discrepancies)
        os << "  discrepancy on " << d.input << ": expected " << d.expected << ", got " << d.actual << '\n';
    for (const auto& d : warnings)
        os << "  warning on " << d.input << ": expected " << d.expected << ", got " << d.actual << '\n';
    return os.str();
}

OracleReport check_eval_equivalence(const Query& q, const EnumerationBudget& budget) {
    OracleReport r;
    r.check = "eval-equivalence";
    for (const auto& t : enumerate_trees(q.automaton().alphabet().unmarked(), budget)) {
        ++r.checked;
        auto ref = eval_reference(q, t);
        auto fast = eval(q, t);
        if (ref != fast) r.discrepancies.push_back({to_string(t), format_position_tuples(ref), format_position_tuples(fast)});
    }
    return r;
}

Tree pull_back_values(const Transducer& tr, const Tree& shape, std::uint64_t first_value) {
    Tree plain = strip_values(shape);
    Tree image = number_preorder(apply_shape(tr, plain), first_value);
    ApplyTrace trace = apply_traced(tr, plain);
    std::uint64_t fresh = first_value + image.size();
    Tree out = plain;
    for (const auto& v : positions(plain)) {
        auto mv = trace.moves.find(v);
        Nat value = mv != trace.moves.end() ? *image.at(mv->second).value() : Nat(fresh++);
        out = set_value(out, v, value);
    }
    return out;
}

namespace {

struct ImageClass {
    Tree image;
    std::vector<Tree> members;
};

/// Enumerated domain trees with pulled-back values, grouped by the shape of
/// their image. Members of a class agree on every value their images carry;
/// `image` carries a value wherever some member's image does.
std::vector<ImageClass> image_classes(const Transducer& tr, const EnumerationBudget& budget, std::size_t& checked) {
    std::map<std::string, std::size_t> index;
    std::vector<ImageClass> classes;
    for (const auto& shape : enumerate_shapes(tr.input_alphabet(), budget)) {
        Tree t = shape;
        Tree img = shape;
        try {
            t = pull_back_values(tr, shape, budget.first_value);
            img = apply(tr, t);
        } catch (const NotInDomain&) {
            continue;
        }
        ++checked;
        auto key = to_string(strip_values(img));
        auto it = index.find(key);
        if (it == index.end()) {
            it = index.emplace(key, classes.size()).first;
            classes.push_back(ImageClass{strip_values(img), {}});
        }
        ImageClass& c = classes[it->second];
        c.members.push_back(t);
        for (const auto& v : positions(img))
            if (auto x = img.at(v).value()) c.image = set_value(c.image, v, *x);
    }
    return classes;
}

std::string describe_class(const ImageClass& c) {
    std::string s = to_string(c.image) + " <- {";
    for (std::size_t i = 0; i < c.members.size(); ++i) s += (i ? ", " : "") + to_string(c.members[i]);
    return s + "}";
}

} // namespace

OracleReport check_weak_equation(const Query& q, const Transducer& given, const Query& target,
                                 const EnumerationBudget& budget) {
    const Transducer tr = widen_input(given, q.automaton().alphabet());
    OracleReport r;
    r.check = "weak-equation";
    Transducer plain = strip_transducer(tr);
    for (const auto& c : image_classes(tr, budget, r.checked)) {
        std::set<ValueTuple> expected;
        for (const auto& t : c.members) {
            auto vals = eval_values(q, t);
            expected.insert(vals.begin(), vals.end());
        }
        auto actual = eval_values_partial(target, c.image);
        if (expected == actual) continue;
        bool missing = std::any_of(expected.begin(), expected.end(), [&](const ValueTuple& v) { return !actual.count(v); });
        Discrepancy d{describe_class(c), format_value_tuples(expected), format_value_tuples(actual)};
        if (missing) {
            r.discrepancies.push_back(std::move(d));
            continue;
        }
        auto bound = max_tree_size(inverse_type(singleton_automaton(strip_values(c.image)), plain));
        bool complete = bound && *bound <= budget.max_nodes;
        if (complete || !has_preimage(q.automaton(), plain, strip_values(c.image)))
            r.discrepancies.push_back(std::move(d));
        else
            r.warnings.push_back(std::move(d));
    }
    return r;
}

OracleReport check_strong_equation(const Query& q, const Transducer& given, const Query& target,
                                   const EnumerationBudget& budget) {
    const Transducer tr = widen_input(given, q.automaton().alphabet());
    OracleReport r;
    r.check = "strong-equation";
    for (const auto& t : enumerate_trees(tr.input_alphabet(), budget)) {
        Tree img = t;
        try {
            img = apply(tr, t);
        } catch (const NotInDomain&) {
            continue;
        }
        ++r.checked;
        auto expected = eval_values(q, t);
        auto actual = eval_values_partial(target, img);
        if (expected != actual)
            r.discrepancies.push_back({to_string(t) + " -> " + to_string(img), format_value_tuples(expected),
                                       format_value_tuples(actual)});
    }
    return r;
}

std::optional<std::pair<Tree, Tree>> check_strong_counterexample(const Query& q, const Transducer& given,
                                                                 const EnumerationBudget& budget) {
    const Transducer tr = widen_input(given, q.automaton().alphabet());
    std::size_t checked = 0;
    for (const auto& c : image_classes(tr, budget, checked)) {
        if (c.members.size() < 2) continue;
        std::vector<std::set<ValueTuple>> answers;
        std::vector<Tree> images;
        for (const auto& t : c.members) {
            answers.push_back(eval_values(q, t));
            images.push_back(apply(tr, t));
        }
        for (std::size_t i = 0; i < c.members.size(); ++i)
            for (std::size_t j = i + 1; j < c.members.size(); ++j) {
                if (answers[i] == answers[j]) continue;
                if (distinguishes(images[i], answers[i], images[j], answers[j]))
                    return std::make_pair(c.members[i], c.members[j]);
                if (distinguishes(images[j], answers[j], images[i], answers[i]))
                    return std::make_pair(c.members[j], c.members[i]);
            }
    }
    return std::nullopt;
}

OracleReport check_language_construction(const std::string& name, const TreeAutomaton& built,
                                         const std::function<bool(const Tree&)>& predicate,
                                         const RankedAlphabet& alphabet, const EnumerationBudget& budget) {
    OracleReport r;
    r.check = name;
    for (const auto& t : enumerate_shapes(alphabet, budget)) {
        ++r.checked;
        bool expected = predicate(t);
        bool actual = accepts(built, t);
        if (expected != actual)
            r.discrepancies.push_back({to_string(t), expected ? "accepted" : "rejected", actual ? "accepted" : "rejected"});
    }
    return r;
}

// ---------------------------------------------------------------- independent predicates

bool has_preimage(const TreeAutomaton& a, const Transducer& tr, const Tree& s) {
    std::vector<const Tree*> nodes;
    std::function<void(const Tree&)> collect = [&](const Tree& u) {
        nodes.push_back(&u);
        for (const auto& c : u.children()) collect(c);
    };
    collect(s);
    std::map<const Tree*, std::size_t> id;
    for (std::size_t i = 0; i < nodes.size(); ++i) id[nodes[i]] = i;

    auto productive = productive_states(a);
    std::vector<std::string> tstates(tr.states().begin(), tr.states().end());
    std::map<std::string, std::size_t> tid;
    for (std::size_t i = 0; i < tstates.size(); ++i) tid[tstates[i]] = i;

    // holds[pA][pT][u]
    std::vector<std::vector<std::vector<bool>>> holds(
        a.state_count(), std::vector<std::vector<bool>>(tstates.size(), std::vector<bool>(nodes.size(), false)));

    std::function<bool(const Context&, const Tree&, std::map<unsigned, const Tree*>&)> match =
        [&](const Context& c, const Tree& u, std::map<unsigned, const Tree*>& binding) {
            if (c.is_variable()) {
                binding[c.variable_index()] = &u;
                return true;
            }
            if (c.label() != u.label()) return false;
            for (std::size_t k = 0; k < c.children().size(); ++k)
                if (!match(c.children()[k], u.children()[k], binding)) return false;
            return true;
        };

    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& ra : a.rules()) {
            for (std::size_t pt = 0; pt < tstates.size(); ++pt) {
                const TransducerRule* rt = tr.find_rule(tstates[pt], ra.symbol);
                if (!rt) continue;
                bool deleted_ok = true;
                for (unsigned i = 0; i < ra.children.size(); ++i)
                    if (!rt->child_states[i] && !productive[ra.children[i]]) deleted_ok = false;
                if (!deleted_ok) continue;
                for (std::size_t u = 0; u < nodes.size(); ++u) {
                    if (holds[ra.lhs][pt][u]) continue;
                    std::map<unsigned, const Tree*> binding;
                    if (!match(rt->context, *nodes[u], binding)) continue;
                    bool ok = true;
                    for (const auto& [i, sub] : binding)
                        if (!holds[ra.children[i - 1]][tid.at(*rt->child_states[i - 1])][id.at(sub)]) ok = false;
                    if (ok) {
                        holds[ra.lhs][pt][u] = true;
                        changed = true;
                    }
                }
            }
        }
    }
    std::size_t init = tid.at(tr.initial());
    for (auto p : a.initial())
        if (holds[p][init][0]) return true;
    return false;
}

bool some_run_covers(const TreeAutomaton& a, const Tree& t, const StateTuple& s) {
    for (const auto& m : enumerate_runs(a, strip_values(t))) {
        std::set<StateId> used;
        for (const auto& [pos, st] : m) used.insert(st);
        if (std::all_of(s.begin(), s.end(), [&](StateId q) { return used.count(q) != 0; })) return true;
    }
    return false;
}

} // namespace tqp
