#include "tqp/automaton.hpp"
#include "tqp/errors.hpp"
#include "tqp/tree_io.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <limits>
#include <queue>
#include <unordered_map>

namespace tqp {

// ---------------------------------------------------------------- TreeAutomaton

StateId TreeAutomaton::add_state(const std::string& name) {
    if (index_.count(name)) throw ValidationError("duplicate state '" + name + "'");
    auto id = static_cast<StateId>(names_.size());
    names_.push_back(name);
    index_.emplace(name, id);
    return id;
}

StateId TreeAutomaton::ensure_state(const std::string& name) {
    auto it = index_.find(name);
    if (it != index_.end()) return it->second;
    return add_state(name);
}

std::optional<StateId> TreeAutomaton::find_state(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

StateId TreeAutomaton::state(std::string_view name) const {
    auto s = find_state(name);
    if (!s) throw ValidationError("unknown state '" + std::string(name) + "'");
    return *s;
}

void TreeAutomaton::check_state(StateId s) const {
    if (s >= names_.size()) throw ValidationError("state id " + std::to_string(s) + " out of range");
}

void TreeAutomaton::add_initial(StateId s) {
    check_state(s);
    initial_.insert(s);
}

void TreeAutomaton::add_rule(StateId lhs, const Symbol& symbol, std::vector<StateId> children) {
    check_state(lhs);
    for (auto c : children) check_state(c);
    if (children.size() != symbol.rank)
        throw ValidationError("rule for '" + symbol.to_string() + "' has " + std::to_string(children.size()) +
                              " children but the symbol has rank " + std::to_string(symbol.rank));
    alphabet_.add(symbol);
    Rule r{lhs, symbol, std::move(children)};
    if (rules_.insert(r).second) by_symbol_[r.symbol].push_back(r);
}

void TreeAutomaton::add_epsilon(StateId from, StateId to) {
    check_state(from);
    check_state(to);
    epsilon_.insert(EpsilonRule{from, to});
}

std::string tuple_name(std::initializer_list<std::string_view> parts) {
    std::string s = "<";
    bool first = true;
    for (auto p : parts) {
        if (!first) s += ',';
        first = false;
        s += p;
    }
    s += '>';
    return s;
}

namespace {

void require_epsilon_free(const TreeAutomaton& a, const char* op) {
    if (a.has_epsilon())
        throw ValidationError(std::string(op) + " requires an automaton without epsilon rules");
}

using AcceptSets = std::unordered_map<const Tree*, std::set<StateId>>;

const std::set<StateId>& bottom_up(const TreeAutomaton& a, const Tree& t, AcceptSets& memo) {
    auto it = memo.find(&t);
    if (it != memo.end()) return it->second;
    std::vector<const std::set<StateId>*> kids;
    kids.reserve(t.children().size());
    for (const auto& c : t.children()) kids.push_back(&bottom_up(a, c, memo));

    if (auto decl = a.alphabet().find(t.label().name, t.label().mark); decl && decl->rank != t.label().rank)
        throw AlphabetMismatch("symbol '" + t.label().to_string() + "' has rank " + std::to_string(decl->rank) +
                               " in the automaton alphabet");

    std::set<StateId> out;
    const auto& idx = a.rules_by_symbol();
    if (auto rs = idx.find(t.label()); rs != idx.end()) {
        for (const auto& r : rs->second) {
            bool ok = true;
            for (std::size_t i = 0; i < r.children.size() && ok; ++i) ok = kids[i]->count(r.children[i]) != 0;
            if (ok) out.insert(r.lhs);
        }
    }
    return memo.emplace(&t, std::move(out)).first->second;
}

} // namespace

std::set<StateId> states_accepting(const TreeAutomaton& a, const Tree& t) {
    require_epsilon_free(a, "acceptance");
    AcceptSets memo;
    return bottom_up(a, t, memo);
}

bool accepts(const TreeAutomaton& a, const Tree& t) {
    auto at_root = states_accepting(a, t);
    return std::any_of(at_root.begin(), at_root.end(), [&](StateId s) { return a.is_initial(s); });
}

std::vector<Run> enumerate_runs(const TreeAutomaton& a, const Tree& t, std::size_t cap) {
    require_epsilon_free(a, "run enumeration");
    AcceptSets memo;
    bottom_up(a, t, memo);
    const auto& idx = a.rules_by_symbol();

    std::function<std::vector<Run>(const Tree&, const Position&, StateId)> runs_from =
        [&](const Tree& node, const Position& pos, StateId q) {
            std::vector<Run> out;
            auto rs = idx.find(node.label());
            if (rs == idx.end()) return out;
            for (const auto& r : rs->second) {
                if (r.lhs != q) continue;
                bool ok = true;
                for (std::size_t i = 0; i < r.children.size() && ok; ++i)
                    ok = memo.at(&node.children()[i]).count(r.children[i]) != 0;
                if (!ok) continue;
                std::vector<Run> partial{Run{{pos, q}}};
                for (unsigned i = 1; i <= r.children.size(); ++i) {
                    auto sub = runs_from(node.child(i), pos.child(i), r.children[i - 1]);
                    std::vector<Run> next;
                    for (const auto& p : partial) {
                        for (const auto& s : sub) {
                            Run m = p;
                            m.insert(s.begin(), s.end());
                            next.push_back(std::move(m));
                            if (next.size() > cap) throw BudgetExceeded("run enumeration exceeded cap of " + std::to_string(cap));
                        }
                    }
                    partial = std::move(next);
                }
                for (auto& m : partial) {
                    out.push_back(std::move(m));
                    if (out.size() > cap) throw BudgetExceeded("run enumeration exceeded cap of " + std::to_string(cap));
                }
            }
            return out;
        };

    std::vector<Run> all;
    const auto& root = memo.at(&t);
    for (auto q : a.initial()) {
        if (!root.count(q)) continue;
        auto rs = runs_from(t, Position(), q);
        for (auto& m : rs) all.push_back(std::move(m));
        if (all.size() > cap) throw BudgetExceeded("run enumeration exceeded cap of " + std::to_string(cap));
    }
    return all;
}

// ---------------------------------------------------------------- reduction

std::vector<bool> productive_states(const TreeAutomaton& a) {
    std::vector<bool> prod(a.state_count(), false);
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& r : a.rules()) {
            if (prod[r.lhs]) continue;
            if (std::all_of(r.children.begin(), r.children.end(), [&](StateId c) { return prod[c]; })) {
                prod[r.lhs] = true;
                changed = true;
            }
        }
        for (const auto& e : a.epsilon_rules()) {
            if (!prod[e.from] && prod[e.to]) {
                prod[e.from] = true;
                changed = true;
            }
        }
    }
    return prod;
}

TreeAutomaton reduce(const TreeAutomaton& a) {
    auto prod = productive_states(a);
    std::vector<bool> reach(a.state_count(), false);
    std::deque<StateId> work;
    for (auto q : a.initial()) {
        if (prod[q] && !reach[q]) {
            reach[q] = true;
            work.push_back(q);
        }
    }
    std::vector<std::vector<const Rule*>> by_lhs(a.state_count());
    for (const auto& r : a.rules()) by_lhs[r.lhs].push_back(&r);
    std::vector<std::vector<StateId>> eps_out(a.state_count());
    for (const auto& e : a.epsilon_rules()) eps_out[e.from].push_back(e.to);

    while (!work.empty()) {
        auto q = work.front();
        work.pop_front();
        auto visit = [&](StateId c) {
            if (!reach[c]) {
                reach[c] = true;
                work.push_back(c);
            }
        };
        for (const Rule* r : by_lhs[q]) {
            if (!std::all_of(r->children.begin(), r->children.end(), [&](StateId c) { return prod[c]; })) continue;
            for (auto c : r->children) visit(c);
        }
        for (auto to : eps_out[q])
            if (prod[to]) visit(to);
    }

    TreeAutomaton out(a.alphabet(), a.name());
    std::vector<StateId> remap(a.state_count(), std::numeric_limits<StateId>::max());
    for (StateId q = 0; q < a.state_count(); ++q)
        if (prod[q] && reach[q]) remap[q] = out.add_state(a.state_name(q));
    auto useful = [&](StateId q) { return remap[q] != std::numeric_limits<StateId>::max(); };
    for (auto q : a.initial())
        if (useful(q)) out.add_initial(remap[q]);
    for (const auto& r : a.rules()) {
        if (!useful(r.lhs) || !std::all_of(r.children.begin(), r.children.end(), useful)) continue;
        std::vector<StateId> kids;
        for (auto c : r.children) kids.push_back(remap[c]);
        out.add_rule(remap[r.lhs], r.symbol, std::move(kids));
    }
    for (const auto& e : a.epsilon_rules())
        if (useful(e.from) && useful(e.to)) out.add_epsilon(remap[e.from], remap[e.to]);
    return out;
}

// ---------------------------------------------------------------- product / union

TreeAutomaton product(const TreeAutomaton& a, const TreeAutomaton& b,
                      std::vector<std::pair<StateId, StateId>>* origin) {
    require_epsilon_free(a, "product");
    require_epsilon_free(b, "product");
    TreeAutomaton out(RankedAlphabet::merge(a.alphabet(), b.alphabet()), a.name() + "_x_" + b.name());

    std::vector<std::vector<const Rule*>> a_by_lhs(a.state_count());
    for (const auto& r : a.rules()) a_by_lhs[r.lhs].push_back(&r);
    std::map<std::pair<StateId, Symbol>, std::vector<const Rule*>> b_index;
    for (const auto& r : b.rules()) b_index[{r.lhs, r.symbol}].push_back(&r);

    std::map<std::pair<StateId, StateId>, StateId> ids;
    std::deque<std::pair<StateId, StateId>> work;
    auto intern = [&](StateId p, StateId q) {
        auto key = std::make_pair(p, q);
        auto it = ids.find(key);
        if (it != ids.end()) return it->second;
        auto id = out.add_state(tuple_name({a.state_name(p), b.state_name(q)}));
        ids.emplace(key, id);
        work.push_back(key);
        if (origin) origin->push_back(key);
        return id;
    };
    if (origin) origin->clear();
    for (auto p : a.initial())
        for (auto q : b.initial()) out.add_initial(intern(p, q));

    while (!work.empty()) {
        auto [p, q] = work.front();
        work.pop_front();
        StateId lhs = ids.at({p, q});
        for (const Rule* ra : a_by_lhs[p]) {
            auto it = b_index.find({q, ra->symbol});
            if (it == b_index.end()) continue;
            for (const Rule* rb : it->second) {
                std::vector<StateId> kids;
                for (std::size_t i = 0; i < ra->children.size(); ++i)
                    kids.push_back(intern(ra->children[i], rb->children[i]));
                out.add_rule(lhs, ra->symbol, std::move(kids));
            }
        }
    }
    return out;
}

TreeAutomaton disjoint_union(std::span<const TreeAutomaton> parts) {
    RankedAlphabet sigma;
    for (const auto& p : parts) sigma = RankedAlphabet::merge(sigma, p.alphabet());
    TreeAutomaton out(sigma, "union");
    for (std::size_t k = 0; k < parts.size(); ++k) {
        const auto& part = parts[k];
        std::string tag = std::to_string(k + 1);
        std::vector<StateId> remap;
        for (StateId q = 0; q < part.state_count(); ++q)
            remap.push_back(out.add_state(tuple_name({tag, part.state_name(q)})));
        for (auto q : part.initial()) out.add_initial(remap[q]);
        for (const auto& r : part.rules()) {
            std::vector<StateId> kids;
            for (auto c : r.children) kids.push_back(remap[c]);
            out.add_rule(remap[r.lhs], r.symbol, std::move(kids));
        }
        for (const auto& e : part.epsilon_rules()) out.add_epsilon(remap[e.from], remap[e.to]);
    }
    return out;
}

TreeAutomaton union_of(const TreeAutomaton& a, const TreeAutomaton& b) {
    std::vector<TreeAutomaton> parts{a, b};
    return disjoint_union(parts);
}

// ---------------------------------------------------------------- epsilon elimination

TreeAutomaton eliminate_epsilon(const TreeAutomaton& a) {
    const auto n = a.state_count();
    std::vector<std::vector<StateId>> eps_out(n);
    for (const auto& e : a.epsilon_rules()) eps_out[e.from].push_back(e.to);
    std::vector<bool> heads(n, false);
    for (const auto& r : a.rules()) heads[r.lhs] = true;

    // closure[q] = states q' with q =>*eps q' that head an ordinary rule
    std::vector<std::vector<StateId>> closure(n);
    for (StateId q = 0; q < n; ++q) {
        std::vector<bool> seen(n, false);
        std::deque<StateId> work{q};
        seen[q] = true;
        while (!work.empty()) {
            auto s = work.front();
            work.pop_front();
            if (heads[s]) closure[q].push_back(s);
            for (auto t : eps_out[s])
                if (!seen[t]) {
                    seen[t] = true;
                    work.push_back(t);
                }
        }
        std::sort(closure[q].begin(), closure[q].end());
    }

    TreeAutomaton out(a.alphabet(), a.name());
    for (StateId q = 0; q < n; ++q) out.add_state(a.state_name(q));
    for (auto q : a.initial())
        for (auto s : closure[q]) out.add_initial(s);
    for (const auto& r : a.rules()) {
        std::vector<StateId> kids(r.children.size());
        std::function<void(std::size_t)> fill = [&](std::size_t i) {
            if (i == r.children.size()) {
                out.add_rule(r.lhs, r.symbol, kids);
                return;
            }
            for (auto s : closure[r.children[i]]) {
                kids[i] = s;
                fill(i + 1);
            }
        };
        fill(0);
    }
    return reduce(out);
}

// ---------------------------------------------------------------- subset construction

namespace {

/// Bottom-up determinization of an automaton, computed on demand.
class SubsetCache {
public:
    SubsetCache(const TreeAutomaton& b, std::size_t budget) : b_(b), budget_(budget) {}

    std::uint32_t post(const Symbol& sym, const std::vector<std::uint32_t>& kids) {
        auto key = std::make_pair(sym, kids);
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        std::vector<StateId> out;
        const auto& idx = b_.rules_by_symbol();
        if (auto rs = idx.find(sym); rs != idx.end()) {
            for (const auto& r : rs->second) {
                bool ok = true;
                for (std::size_t i = 0; i < kids.size() && ok; ++i) ok = member_[kids[i]][r.children[i]];
                if (ok) out.push_back(r.lhs);
            }
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        auto id = intern(std::move(out));
        memo_.emplace(std::move(key), id);
        return id;
    }

    const std::vector<StateId>& macro(std::uint32_t id) const { return macros_[id]; }
    std::size_t size() const { return macros_.size(); }

    bool meets_initial(std::uint32_t id) const {
        const auto& m = macros_[id];
        return std::any_of(m.begin(), m.end(), [&](StateId s) { return b_.is_initial(s); });
    }

    std::string name(std::uint32_t id) const {
        std::string s = "<{";
        const auto& m = macros_[id];
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (i) s += ',';
            s += b_.state_name(m[i]);
        }
        return s + "}>";
    }

private:
    std::uint32_t intern(std::vector<StateId> states) {
        auto it = ids_.find(states);
        if (it != ids_.end()) return it->second;
        if (macros_.size() >= budget_)
            throw BudgetExceeded("subset construction exceeded the budget of " + std::to_string(budget_) +
                                 " macrostates");
        auto id = static_cast<std::uint32_t>(macros_.size());
        std::vector<bool> bits(b_.state_count(), false);
        for (auto s : states) bits[s] = true;
        member_.push_back(std::move(bits));
        ids_.emplace(states, id);
        macros_.push_back(std::move(states));
        return id;
    }

    const TreeAutomaton& b_;
    std::size_t budget_;
    std::vector<std::vector<StateId>> macros_;
    std::vector<std::vector<bool>> member_;
    std::map<std::vector<StateId>, std::uint32_t> ids_;
    std::map<std::pair<Symbol, std::vector<std::uint32_t>>, std::uint32_t> memo_;
};

} // namespace

TreeAutomaton complement(const TreeAutomaton& a, std::size_t budget) {
    require_epsilon_free(a, "complement");
    SubsetCache cache(a, budget);
    auto symbols = a.alphabet().symbols();
    std::set<Rule> transitions;
    std::vector<bool> queued;
    std::deque<std::uint32_t> work;
    std::vector<std::uint32_t> processed;

    auto note = [&](std::uint32_t id) {
        if (id >= queued.size()) queued.resize(id + 1, false);
        if (!queued[id]) {
            queued[id] = true;
            work.push_back(id);
        }
    };

    for (const auto& s : symbols) {
        if (s.rank != 0) continue;
        auto id = cache.post(s, {});
        transitions.insert(Rule{id, s, {}});
        note(id);
    }
    while (!work.empty()) {
        auto x = work.front();
        work.pop_front();
        processed.push_back(x);
        for (const auto& s : symbols) {
            if (s.rank == 0) continue;
            for (unsigned k = 0; k < s.rank; ++k) {
                std::vector<std::uint32_t> tuple(s.rank);
                tuple[k] = x;
                std::function<void(unsigned)> fill = [&](unsigned i) {
                    if (i == s.rank) {
                        auto y = cache.post(s, tuple);
                        transitions.insert(Rule{y, s, tuple});
                        note(y);
                        return;
                    }
                    if (i == k) {
                        fill(i + 1);
                        return;
                    }
                    for (auto p : processed) {
                        tuple[i] = p;
                        fill(i + 1);
                    }
                };
                fill(0);
            }
        }
    }

    TreeAutomaton out(a.alphabet(), "not_" + a.name());
    for (std::uint32_t id = 0; id < cache.size(); ++id) {
        out.add_state(cache.name(id));
        if (!cache.meets_initial(id)) out.add_initial(id);
    }
    for (const auto& r : transitions) out.add_rule(r.lhs, r.symbol, r.children);
    return out;
}

// ---------------------------------------------------------------- minimal trees

namespace {

struct BestRules {
    std::vector<std::size_t> size;     // SIZE_MAX if unproductive
    std::vector<const Rule*> rule;
};

BestRules compute_best(const TreeAutomaton& a) {
    require_epsilon_free(a, "minimal tree search");
    const auto n = a.state_count();
    constexpr auto inf = std::numeric_limits<std::size_t>::max();
    std::vector<const Rule*> rules;
    for (const auto& r : a.rules()) rules.push_back(&r);
    std::vector<std::vector<std::size_t>> occurs(n);
    std::vector<std::size_t> remaining(rules.size());
    for (std::size_t i = 0; i < rules.size(); ++i) {
        remaining[i] = rules[i]->children.size();
        for (auto c : rules[i]->children) occurs[c].push_back(i);
    }
    BestRules best{std::vector<std::size_t>(n, inf), std::vector<const Rule*>(n, nullptr)};
    using Item = std::pair<std::size_t, std::size_t>;  // (size, rule index)
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    for (std::size_t i = 0; i < rules.size(); ++i)
        if (remaining[i] == 0) pq.emplace(1, i);
    while (!pq.empty()) {
        auto [sz, ri] = pq.top();
        pq.pop();
        StateId q = rules[ri]->lhs;
        if (best.size[q] != inf) continue;
        best.size[q] = sz;
        best.rule[q] = rules[ri];
        for (auto r2 : occurs[q]) {
            if (--remaining[r2] == 0) {
                std::size_t total = 1;
                for (auto c : rules[r2]->children) total += best.size[c];
                pq.emplace(total, r2);
            }
        }
    }
    return best;
}

Tree build_best(const BestRules& best, StateId q) {
    const Rule* r = best.rule[q];
    std::vector<Tree> kids;
    kids.reserve(r->children.size());
    for (auto c : r->children) kids.push_back(build_best(best, c));
    return Tree(r->symbol, std::nullopt, std::move(kids));
}

bool smaller(const Tree& x, const Tree& y) {
    auto sx = x.size(), sy = y.size();
    if (sx != sy) return sx < sy;
    return to_string(x) < to_string(y);
}

} // namespace

std::vector<std::optional<Tree>> minimal_trees(const TreeAutomaton& a) {
    auto best = compute_best(a);
    std::vector<std::optional<Tree>> out(a.state_count());
    for (StateId q = 0; q < a.state_count(); ++q)
        if (best.rule[q]) out[q] = build_best(best, q);
    return out;
}

bool is_empty(const TreeAutomaton& a) {
    if (a.has_epsilon()) return is_empty(eliminate_epsilon(a));
    auto prod = productive_states(a);
    return std::none_of(a.initial().begin(), a.initial().end(), [&](StateId q) { return prod[q]; });
}

std::optional<Tree> shortest_tree(const TreeAutomaton& a) {
    auto best = compute_best(a);
    std::optional<Tree> out;
    for (auto q : a.initial()) {
        if (!best.rule[q]) continue;
        Tree t = build_best(best, q);
        if (!out || smaller(t, *out)) out = std::move(t);
    }
    return out;
}

// ---------------------------------------------------------------- inclusion

LanguageCheck included(const TreeAutomaton& a, const TreeAutomaton& b, std::size_t budget) {
    require_epsilon_free(a, "inclusion");
    require_epsilon_free(b, "inclusion");
    SubsetCache cache(b, budget);

    std::vector<const Rule*> rules;
    for (const auto& r : a.rules()) rules.push_back(&r);
    std::vector<std::vector<std::pair<std::size_t, unsigned>>> occurs(a.state_count());
    for (std::size_t i = 0; i < rules.size(); ++i)
        for (unsigned k = 0; k < rules[i]->children.size(); ++k) occurs[rules[i]->children[k]].emplace_back(i, k);

    struct Entry {
        StateId state;
        std::uint32_t macro;
        std::size_t size;
        const Rule* rule;
        std::vector<std::size_t> kids;
    };
    struct Candidate {
        std::size_t size;
        std::size_t seq;
        StateId state;
        std::uint32_t macro;
        const Rule* rule;
        std::vector<std::size_t> kids;
        bool operator>(const Candidate& o) const {
            return size != o.size ? size > o.size : seq > o.seq;
        }
    };

    std::vector<Entry> entries;
    std::map<std::pair<StateId, std::uint32_t>, std::size_t> done;
    std::vector<std::vector<std::size_t>> by_state(a.state_count());
    std::priority_queue<Candidate, std::vector<Candidate>, std::greater<>> pq;
    std::size_t seq = 0;

    auto offer = [&](const Rule* r, std::vector<std::size_t> kids) {
        std::vector<std::uint32_t> macros;
        std::size_t sz = 1;
        for (auto k : kids) {
            macros.push_back(entries[k].macro);
            sz += entries[k].size;
        }
        auto m = cache.post(r->symbol, macros);
        if (done.count({r->lhs, m})) return;
        pq.push(Candidate{sz, seq++, r->lhs, m, r, std::move(kids)});
    };

    std::function<Tree(std::size_t)> build = [&](std::size_t e) {
        std::vector<Tree> kids;
        for (auto k : entries[e].kids) kids.push_back(build(k));
        return Tree(entries[e].rule->symbol, std::nullopt, std::move(kids));
    };

    for (const Rule* r : rules)
        if (r->children.empty()) offer(r, {});

    std::optional<std::size_t> found_size;
    std::optional<Tree> witness;
    while (!pq.empty()) {
        Candidate c = pq.top();
        pq.pop();
        if (found_size && c.size > *found_size) break;
        if (done.count({c.state, c.macro})) continue;
        std::size_t e = entries.size();
        entries.push_back(Entry{c.state, c.macro, c.size, c.rule, c.kids});
        done.emplace(std::make_pair(c.state, c.macro), e);
        by_state[c.state].push_back(e);

        if (a.is_initial(c.state) && !cache.meets_initial(c.macro)) {
            Tree t = build(e);
            if (!witness || smaller(t, *witness)) witness = std::move(t);
            found_size = c.size;
            continue;
        }
        if (found_size) continue;

        for (auto [ri, k] : occurs[c.state]) {
            const Rule* r = rules[ri];
            std::vector<std::size_t> kids(r->children.size());
            kids[k] = e;
            std::function<void(unsigned)> fill = [&](unsigned i) {
                if (i == kids.size()) {
                    offer(r, kids);
                    return;
                }
                if (i == k) {
                    fill(i + 1);
                    return;
                }
                for (auto other : by_state[r->children[i]]) {
                    kids[i] = other;
                    fill(i + 1);
                }
            };
            fill(0);
        }
    }
    if (witness) return LanguageCheck{false, std::move(witness)};
    return LanguageCheck{true, std::nullopt};
}

LanguageCheck equivalent(const TreeAutomaton& a, const TreeAutomaton& b, std::size_t budget) {
    auto ab = included(a, b, budget);
    auto ba = included(b, a, budget);
    if (ab.holds && ba.holds) return LanguageCheck{true, std::nullopt};
    if (ab.holds) return ba;
    if (ba.holds) return ab;
    return smaller(*ab.counterexample, *ba.counterexample) ? ab : ba;
}

// ---------------------------------------------------------------- certificates

namespace {

std::optional<std::pair<Tree, Position>> certify(const TreeAutomaton& a, StateId target,
                                                 const std::function<std::optional<Tree>(const BestRules&)>& inside) {
    auto best = compute_best(a);
    constexpr auto inf = std::numeric_limits<std::size_t>::max();
    auto productive = [&](StateId q) { return best.size[q] != inf; };
    auto inner = inside(best);
    if (!inner) return std::nullopt;

    // BFS from the initial states through rules whose children are all productive.
    struct Via {
        const Rule* rule = nullptr;
        unsigned k = 0;
    };
    std::vector<std::optional<Via>> parent(a.state_count());
    std::vector<bool> seen(a.state_count(), false);
    std::deque<StateId> work;
    std::vector<std::vector<const Rule*>> by_lhs(a.state_count());
    for (const auto& r : a.rules()) by_lhs[r.lhs].push_back(&r);
    for (auto q : a.initial()) {
        if (productive(q) && !seen[q]) {
            seen[q] = true;
            work.push_back(q);
        }
    }
    while (!work.empty() && !seen[target]) {
        auto q = work.front();
        work.pop_front();
        for (const Rule* r : by_lhs[q]) {
            if (!std::all_of(r->children.begin(), r->children.end(), productive)) continue;
            for (unsigned k = 0; k < r->children.size(); ++k) {
                auto c = r->children[k];
                if (seen[c]) continue;
                seen[c] = true;
                parent[c] = Via{r, k};
                work.push_back(c);
            }
        }
    }
    if (!seen[target]) return std::nullopt;

    std::vector<Via> path;
    for (StateId q = target; parent[q]; q = parent[q]->rule->lhs) path.push_back(*parent[q]);
    std::reverse(path.begin(), path.end());

    std::vector<unsigned> pos;
    std::function<Tree(std::size_t)> build = [&](std::size_t i) -> Tree {
        if (i == path.size()) return *inner;
        const Rule* r = path[i].rule;
        pos.push_back(path[i].k + 1);
        std::vector<Tree> kids;
        for (unsigned j = 0; j < r->children.size(); ++j) {
            if (j == path[i].k)
                kids.push_back(build(i + 1));
            else
                kids.push_back(build_best(best, r->children[j]));
        }
        return Tree(r->symbol, std::nullopt, std::move(kids));
    };
    Tree t = build(0);
    return std::make_pair(std::move(t), Position(pos));
}

} // namespace

std::optional<std::pair<Tree, Position>> certificate(const TreeAutomaton& a, StateId state) {
    return certify(a, state, [&](const BestRules& best) -> std::optional<Tree> {
        if (!best.rule[state]) return std::nullopt;
        return build_best(best, state);
    });
}

std::optional<std::pair<Tree, Position>> certificate(const TreeAutomaton& a, const Rule& rule) {
    return certify(a, rule.lhs, [&](const BestRules& best) -> std::optional<Tree> {
        std::vector<Tree> kids;
        for (auto c : rule.children) {
            if (!best.rule[c]) return std::nullopt;
            kids.push_back(build_best(best, c));
        }
        return Tree(rule.symbol, std::nullopt, std::move(kids));
    });
}

// ---------------------------------------------------------------- small builders

TreeAutomaton universal_automaton(const RankedAlphabet& alphabet) {
    TreeAutomaton out(alphabet, "universal");
    auto q = out.add_state("<any>");
    out.add_initial(q);
    for (const auto& s : alphabet.symbols()) out.add_rule(q, s, std::vector<StateId>(s.rank, q));
    return out;
}

TreeAutomaton singleton_automaton(const Tree& t) {
    TreeAutomaton out(RankedAlphabet{}, "singleton");
    std::function<StateId(const Tree&, const Position&)> walk = [&](const Tree& node, const Position& p) {
        auto q = out.add_state("<at," + p.to_string() + ">");
        std::vector<StateId> kids;
        for (unsigned i = 1; i <= node.children().size(); ++i) kids.push_back(walk(node.child(i), p.child(i)));
        out.add_rule(q, node.label(), std::move(kids));
        return q;
    };
    out.add_initial(walk(t, Position()));
    return out;
}

std::optional<std::size_t> max_tree_size(const TreeAutomaton& a) {
    auto r = reduce(a.has_epsilon() ? eliminate_epsilon(a) : a);
    const auto n = r.state_count();
    std::vector<std::vector<const Rule*>> by_lhs(n);
    for (const auto& rule : r.rules()) by_lhs[rule.lhs].push_back(&rule);
    enum class Mark { White, Grey, Black };
    std::vector<Mark> mark(n, Mark::White);
    std::vector<std::size_t> longest(n, 0);
    bool cyclic = false;
    std::function<void(StateId)> dfs = [&](StateId q) {
        mark[q] = Mark::Grey;
        std::size_t best = 0;
        for (const Rule* rule : by_lhs[q]) {
            std::size_t total = 1;
            for (auto c : rule->children) {
                if (mark[c] == Mark::Grey) cyclic = true;
                if (mark[c] == Mark::White) dfs(c);
                total += longest[c];
            }
            best = std::max(best, total);
        }
        longest[q] = best;
        mark[q] = Mark::Black;
    };
    std::size_t out = 0;
    for (auto q : r.initial()) {
        if (mark[q] == Mark::White) dfs(q);
        out = std::max(out, longest[q]);
    }
    if (cyclic) return std::nullopt;
    return out;
}

} // namespace tqp
