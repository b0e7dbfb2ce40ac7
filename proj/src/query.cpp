#include "tqp/query.hpp"
#include "tqp/errors.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <sstream>

namespace tqp {

// ---------------------------------------------------------------- Query

Query::Query(const TreeAutomaton& automaton, unsigned arity, const std::vector<std::vector<std::string>>& selections)
    : automaton_(reduce(automaton)), arity_(arity) {
    for (const auto& tuple : selections) {
        if (tuple.size() != arity)
            throw ValidationError("selected tuple has " + std::to_string(tuple.size()) + " states, expected " +
                                  std::to_string(arity));
        for (std::size_t i = 0; i < tuple.size(); ++i) {
            if (!automaton.find_state(tuple[i])) throw ValidationError("unknown state '" + tuple[i] + "' in selection");
            for (std::size_t j = 0; j < i; ++j)
                if (tuple[i] == tuple[j])
                    throw ValidationError("state '" + tuple[i] + "' occurs twice in a selected tuple");
        }
        StateTuple s;
        bool alive = true;
        for (const auto& name : tuple) {
            auto id = automaton_.find_state(name);
            if (!id) {
                alive = false;
                break;
            }
            s.push_back(*id);
        }
        if (alive)
            selections_.insert(std::move(s));
        else
            ++dropped_;
    }
}

std::vector<std::string> Query::names(const StateTuple& s) const {
    std::vector<std::string> out;
    for (auto q : s) out.push_back(automaton_.state_name(q));
    return out;
}

Query Query::restrict_to(const StateTuple& s) const {
    if (!selections_.count(s)) throw ValidationError("tuple is not selected by the query");
    Query out;
    out.automaton_ = automaton_;
    out.arity_ = arity_;
    out.selections_.insert(s);
    return out;
}

// ---------------------------------------------------------------- evaluation

std::set<PositionTuple> eval_reference(const Query& q, const Tree& t, std::size_t run_cap) {
    std::set<PositionTuple> out;
    auto runs = enumerate_runs(q.automaton(), strip_values(t), run_cap);
    for (const auto& m : runs) {
        std::map<StateId, std::vector<Position>> at;
        for (const auto& [pos, state] : m) at[state].push_back(pos);
        for (const auto& s : q.selections()) {
            std::vector<const std::vector<Position>*> choices;
            bool ok = true;
            for (auto st : s) {
                auto it = at.find(st);
                if (it == at.end()) {
                    ok = false;
                    break;
                }
                choices.push_back(&it->second);
            }
            if (!ok) continue;
            PositionTuple tuple(s.size());
            std::function<void(std::size_t)> pick = [&](std::size_t i) {
                if (i == s.size()) {
                    out.insert(tuple);
                    return;
                }
                for (const auto& p : *choices[i]) {
                    tuple[i] = p;
                    pick(i + 1);
                }
            };
            pick(0);
        }
    }
    return out;
}

namespace {

using Partial = std::vector<int>;

void check_query_ranks(const TreeAutomaton& a, const Tree& t) {
    if (auto decl = a.alphabet().find(t.label().name, t.label().mark); decl && decl->rank != t.label().rank)
        throw AlphabetMismatch("symbol '" + t.label().to_string() + "' has rank " + std::to_string(decl->rank) +
                               " in the query alphabet");
    for (const auto& c : t.children()) check_query_ranks(a, c);
}

} // namespace

std::set<PositionTuple> eval(const Query& q, const Tree& t) {
    const auto& a = q.automaton();
    check_query_ranks(a, t);
    std::vector<const Tree*> nodes;
    std::vector<Position> where;
    std::vector<std::vector<int>> kids;
    std::function<int(const Tree&, const Position&)> number = [&](const Tree& node, const Position& p) {
        int id = static_cast<int>(nodes.size());
        nodes.push_back(&node);
        where.push_back(p);
        kids.emplace_back();
        for (unsigned i = 1; i <= node.children().size(); ++i) {
            int c = number(node.child(i), p.child(i));
            kids[id].push_back(c);
        }
        return id;
    };
    number(t, Position());

    const auto& idx = a.rules_by_symbol();
    auto fits = [&](const Rule& r, int u, const std::vector<std::vector<char>>& up) {
        for (std::size_t k = 0; k < r.children.size(); ++k)
            if (!up[kids[u][k]][r.children[k]]) return false;
        return true;
    };
    // up[u][p]: p has a run on the subtree at u. live[p]: p occurs in some accepting run.
    std::vector<std::vector<char>> up(nodes.size(), std::vector<char>(a.state_count(), 0));
    for (int u = static_cast<int>(nodes.size()) - 1; u >= 0; --u) {
        auto rs = idx.find(nodes[u]->label());
        if (rs == idx.end()) continue;
        for (const auto& r : rs->second)
            if (fits(r, u, up)) up[u][r.lhs] = 1;
    }
    std::vector<std::vector<char>> down(nodes.size(), std::vector<char>(a.state_count(), 0));
    std::vector<char> live(a.state_count(), 0);
    for (auto init : a.initial())
        if (up[0][init]) down[0][init] = 1;
    for (std::size_t u = 0; u < nodes.size(); ++u) {
        auto rs = idx.find(nodes[u]->label());
        if (rs == idx.end()) continue;
        for (const auto& r : rs->second) {
            if (!down[u][r.lhs] || !fits(r, static_cast<int>(u), up)) continue;
            live[r.lhs] = 1;
            for (std::size_t k = 0; k < r.children.size(); ++k) down[kids[u][k]][r.children[k]] = 1;
        }
    }

    std::set<PositionTuple> out;
    for (const auto& s : q.selections()) {
        const std::size_t n = s.size();
        if (!std::all_of(s.begin(), s.end(), [&](StateId st) { return live[st]; })) continue;
        std::vector<int> index_of(a.state_count(), -1);
        for (std::size_t i = 0; i < n; ++i) index_of[s[i]] = static_cast<int>(i);

        std::map<std::pair<int, StateId>, std::set<Partial>> memo;
        std::function<const std::set<Partial>&(int, StateId)> partials = [&](int u, StateId st) -> const std::set<Partial>& {
            auto key = std::make_pair(u, st);
            if (auto it = memo.find(key); it != memo.end()) return it->second;
            std::set<Partial> result;
            auto rs = idx.find(nodes[u]->label());
            if (rs != idx.end()) {
                for (const auto& r : rs->second) {
                    if (r.lhs != st) continue;
                    std::set<Partial> cur{Partial(n, -1)};
                    for (std::size_t k = 0; k < r.children.size() && !cur.empty(); ++k) {
                        const auto& sub = partials(kids[u][k], r.children[k]);
                        std::set<Partial> next;
                        for (const auto& x : cur)
                            for (const auto& y : sub) {
                                Partial m = x;
                                bool ok = true;
                                for (std::size_t i = 0; i < n && ok; ++i) {
                                    if (y[i] < 0) continue;
                                    if (m[i] >= 0) ok = false;
                                    m[i] = y[i];
                                }
                                if (ok) next.insert(std::move(m));
                            }
                        cur = std::move(next);
                    }
                    result.insert(cur.begin(), cur.end());
                }
            }
            if (int i = index_of[st]; i >= 0 && !result.empty()) {
                std::vector<Partial> extra;
                for (const auto& p : result)
                    if (p[i] < 0) {
                        Partial m = p;
                        m[i] = u;
                        extra.push_back(std::move(m));
                    }
                result.insert(extra.begin(), extra.end());
            }
            return memo.emplace(key, std::move(result)).first->second;
        };

        for (auto init : a.initial()) {
            for (const auto& p : partials(0, init)) {
                if (std::any_of(p.begin(), p.end(), [](int v) { return v < 0; })) continue;
                PositionTuple tuple;
                for (int v : p) tuple.push_back(where[v]);
                out.insert(std::move(tuple));
            }
        }
    }
    return out;
}

namespace {

std::set<ValueTuple> values_of(const Query& q, const Tree& t, bool skip_missing) {
    std::set<ValueTuple> out;
    for (const auto& tuple : eval(q, t)) {
        ValueTuple vals;
        bool ok = true;
        for (const auto& p : tuple) {
            const auto& v = t.at(p).value();
            if (!v) {
                ok = false;
                break;
            }
            vals.push_back(*v);
        }
        if (ok)
            out.insert(std::move(vals));
        else if (!skip_missing)
            throw ImproperInput("selected node without a value");
    }
    return out;
}

} // namespace

std::set<ValueTuple> eval_values(const Query& q, const Tree& t) {
    if (!t.is_proper()) throw ImproperInput("eval_values requires a tree in which every node has a value");
    return values_of(q, t, false);
}

std::set<ValueTuple> eval_values_partial(const Query& q, const Tree& t) { return values_of(q, t, true); }

// ---------------------------------------------------------------- subset-tracking automata

namespace {

using IndexSet = std::uint32_t;

std::string subset_name(const TreeAutomaton& a, const StateTuple& s, IndexSet set) {
    std::string out = "{";
    bool first = true;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!(set >> i & 1u)) continue;
        if (!first) out += ',';
        first = false;
        out += a.state_name(s[i]);
    }
    return out + "}";
}

/// Every way of handing each index of `rem` to exactly one of k children.
std::vector<std::vector<IndexSet>> distributions(IndexSet rem, std::size_t k, std::size_t n) {
    std::vector<std::vector<IndexSet>> out;
    if (k == 0) {
        if (rem == 0) out.emplace_back();
        return out;
    }
    std::vector<IndexSet> cur(k, 0);
    std::function<void(std::size_t)> go = [&](std::size_t i) {
        if (i == n) {
            out.push_back(cur);
            return;
        }
        if (!(rem >> i & 1u)) {
            go(i + 1);
            return;
        }
        for (std::size_t c = 0; c < k; ++c) {
            cur[c] |= IndexSet(1) << i;
            go(i + 1);
            cur[c] &= ~(IndexSet(1) << i);
        }
    };
    go(0);
    return out;
}

void check_tuple(const TreeAutomaton& a, const StateTuple& s) {
    if (s.size() > 16) throw ValidationError("tuples longer than 16 are not supported");
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] >= a.state_count()) throw ValidationError("tuple state out of range");
        for (std::size_t j = 0; j < i; ++j)
            if (s[i] == s[j]) throw ValidationError("tuple states must be pairwise distinct");
    }
}

} // namespace

TreeAutomaton coverage_automaton(const TreeAutomaton& a, const StateTuple& s, std::vector<StateId>* projection) {
    if (a.has_epsilon()) throw ValidationError("coverage automaton requires an epsilon-free automaton");
    check_tuple(a, s);
    const std::size_t n = s.size();
    const IndexSet full = n == 0 ? 0 : static_cast<IndexSet>((std::uint64_t(1) << n) - 1);
    std::vector<int> index_of(a.state_count(), -1);
    for (std::size_t i = 0; i < n; ++i) index_of[s[i]] = static_cast<int>(i);
    std::vector<std::vector<const Rule*>> by_lhs(a.state_count());
    for (const auto& r : a.rules()) by_lhs[r.lhs].push_back(&r);

    TreeAutomaton out(a.alphabet(), a.name() + "_F");
    std::map<std::pair<StateId, IndexSet>, StateId> ids;
    std::deque<std::pair<StateId, IndexSet>> work;
    auto intern = [&](StateId p, IndexSet set) {
        auto key = std::make_pair(p, set);
        if (auto it = ids.find(key); it != ids.end()) return it->second;
        auto id = out.add_state(tuple_name({a.state_name(p), subset_name(a, s, set)}));
        ids.emplace(key, id);
        work.push_back(key);
        return id;
    };
    for (auto p : a.initial()) out.add_initial(intern(p, full));
    while (!work.empty()) {
        auto [p, set] = work.front();
        work.pop_front();
        StateId here = ids.at({p, set});
        IndexSet rem = set;
        if (int i = index_of[p]; i >= 0) rem &= ~(IndexSet(1) << i);
        for (const Rule* r : by_lhs[p]) {
            for (const auto& d : distributions(rem, r->children.size(), n)) {
                std::vector<StateId> kids;
                for (std::size_t k = 0; k < r->children.size(); ++k) kids.push_back(intern(r->children[k], d[k]));
                out.add_rule(here, r->symbol, std::move(kids));
            }
        }
    }
    auto reduced = reduce(out);
    if (projection) {
        projection->assign(reduced.state_count(), 0);
        for (const auto& [key, id] : ids)
            if (auto kept = reduced.find_state(out.state_name(id))) (*projection)[*kept] = key.first;
    }
    return reduced;
}

NormalQuery normalize(const Query& q) {
    if (q.selections().size() != 1) throw ValidationError("normalize expects a query with exactly one selected tuple");
    const auto& a = q.automaton();
    const StateTuple& s = *q.selections().begin();
    check_tuple(a, s);
    const std::size_t n = s.size();
    const IndexSet full = n == 0 ? 0 : static_cast<IndexSet>((std::uint64_t(1) << n) - 1);
    std::vector<int> index_of(a.state_count(), -1);
    for (std::size_t i = 0; i < n; ++i) index_of[s[i]] = static_cast<int>(i);
    std::vector<std::vector<const Rule*>> by_lhs(a.state_count());
    for (const auto& r : a.rules()) by_lhs[r.lhs].push_back(&r);

    // (p, indices realized in the subtree, whether p's own index is realized here)
    using Key = std::tuple<StateId, IndexSet, bool>;
    TreeAutomaton out(a.alphabet(), a.name() + "_nf");
    std::map<Key, StateId> ids;
    std::deque<Key> work;
    auto intern = [&](StateId p, IndexSet set, bool here) {
        Key key{p, set, here};
        if (auto it = ids.find(key); it != ids.end()) return it->second;
        std::string name = here ? tuple_name({a.state_name(p), subset_name(a, s, set), "here"})
                                : tuple_name({a.state_name(p), subset_name(a, s, set)});
        auto id = out.add_state(name);
        ids.emplace(key, id);
        work.push_back(key);
        return id;
    };
    auto options = [&](StateId p, IndexSet set) {
        std::vector<bool> out_opts{false};
        if (int i = index_of[p]; i >= 0 && (set >> i & 1u)) out_opts.push_back(true);
        return out_opts;
    };
    for (auto p : a.initial())
        for (bool h : options(p, full)) out.add_initial(intern(p, full, h));

    while (!work.empty()) {
        auto [p, set, here] = work.front();
        work.pop_front();
        StateId id = ids.at(Key{p, set, here});
        IndexSet rem = set;
        if (here) rem &= ~(IndexSet(1) << index_of[p]);
        for (const Rule* r : by_lhs[p]) {
            for (const auto& d : distributions(rem, r->children.size(), n)) {
                std::vector<std::vector<bool>> opts;
                for (std::size_t k = 0; k < r->children.size(); ++k) opts.push_back(options(r->children[k], d[k]));
                std::vector<StateId> kids(r->children.size());
                std::function<void(std::size_t)> fill = [&](std::size_t k) {
                    if (k == kids.size()) {
                        out.add_rule(id, r->symbol, kids);
                        return;
                    }
                    for (bool h : opts[k]) {
                        kids[k] = intern(r->children[k], d[k], h);
                        fill(k + 1);
                    }
                };
                fill(0);
            }
        }
    }

    NormalQuery nq{reduce(out), std::vector<std::set<StateId>>(n)};
    for (const auto& [key, old] : ids) {
        auto [p, set, here] = key;
        if (!here) continue;
        if (auto kept = nq.automaton.find_state(out.state_name(old)))
            nq.classes[static_cast<std::size_t>(index_of[p])].insert(*kept);
    }
    return nq;
}

Query NormalQuery::to_query() const {
    std::vector<std::vector<std::string>> tuples{{}};
    for (const auto& cls : classes) {
        std::vector<std::vector<std::string>> next;
        for (const auto& t : tuples)
            for (auto q : cls) {
                auto u = t;
                u.push_back(automaton.state_name(q));
                next.push_back(std::move(u));
            }
        tuples = std::move(next);
    }
    return Query(automaton, static_cast<unsigned>(classes.size()), tuples);
}

TreeAutomaton mark_query_automaton(const std::vector<NormalQuery>& queries) {
    std::vector<TreeAutomaton> parts;
    for (const auto& nq : queries) {
        const auto& a = nq.automaton;
        std::vector<unsigned> mark(a.state_count(), 0);
        for (std::size_t i = 0; i < nq.classes.size(); ++i)
            for (auto q : nq.classes[i]) {
                if (mark[q]) throw ValidationError("selection classes of a normal query must be disjoint");
                mark[q] = static_cast<unsigned>(i + 1);
            }
        TreeAutomaton m(a.alphabet().with_marks(static_cast<unsigned>(nq.classes.size())), a.name() + "_mk");
        for (StateId q = 0; q < a.state_count(); ++q) m.add_state(a.state_name(q));
        for (auto q : a.initial()) m.add_initial(q);
        for (const auto& r : a.rules()) m.add_rule(r.lhs, mark[r.lhs] ? r.symbol.marked(mark[r.lhs]) : r.symbol, r.children);
        parts.push_back(std::move(m));
    }
    auto u = disjoint_union(parts);
    u.set_name("A_mk");
    return u;
}

TreeAutomaton index_automaton(const TreeAutomaton& a, unsigned n) {
    TreeAutomaton out(a.alphabet().with_marks(n), "A_idx");
    for (StateId q = 0; q < a.state_count(); ++q) out.add_state(a.state_name(q));
    for (auto q : a.initial()) out.add_initial(q);
    for (const auto& r : a.rules()) {
        out.add_rule(r.lhs, r.symbol, r.children);
        if (r.symbol.is_marked()) continue;
        for (unsigned i = 1; i <= n; ++i) out.add_rule(r.lhs, r.symbol.marked(i), r.children);
    }
    for (const auto& e : a.epsilon_rules()) out.add_epsilon(e.from, e.to);
    return out;
}

// ---------------------------------------------------------------- printing

std::string format_position_tuples(const std::set<PositionTuple>& tuples) {
    std::ostringstream os;
    os << '{';
    bool first = true;
    for (const auto& t : tuples) {
        if (!first) os << ',';
        first = false;
        os << '(';
        for (std::size_t i = 0; i < t.size(); ++i) os << (i ? "," : "") << t[i].to_string();
        os << ')';
    }
    os << '}';
    return os.str();
}

std::string format_value_tuples(const std::set<ValueTuple>& tuples) {
    std::ostringstream os;
    os << '{';
    bool first = true;
    for (const auto& t : tuples) {
        if (!first) os << ',';
        first = false;
        if (t.size() == 1) {
            os << t[0];
            continue;
        }
        os << '(';
        for (std::size_t i = 0; i < t.size(); ++i) os << (i ? "," : "") << t[i];
        os << ')';
    }
    os << '}';
    return os.str();
}

} // namespace tqp
