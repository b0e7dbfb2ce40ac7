#pragma once

#include "automaton.hpp"
#include "tree.hpp"

#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace tqp {

using StateTuple = std::vector<StateId>;
using PositionTuple = std::vector<Position>;
using ValueTuple = std::vector<Nat>;

/// Run-based n-ary query: an automaton and a set of n-tuples of distinct states.
class Query {
public:
    /// Reduces the automaton; tuples mentioning a removed state are dropped.
    /// Throws ValidationError for repeated states within a tuple, unknown
    /// states or inconsistent arity.
    Query(const TreeAutomaton& automaton, unsigned arity, const std::vector<std::vector<std::string>>& selections);

    const TreeAutomaton& automaton() const { return automaton_; }
    unsigned arity() const { return arity_; }
    const std::set<StateTuple>& selections() const { return selections_; }
    std::size_t dropped_tuples() const { return dropped_; }

    std::vector<std::string> names(const StateTuple& s) const;
    /// (A, {s}).
    Query restrict_to(const StateTuple& s) const;

private:
    Query() = default;

    TreeAutomaton automaton_;
    unsigned arity_ = 0;
    std::set<StateTuple> selections_;
    std::size_t dropped_ = 0;
};

/// Union over accepting runs m of the position tuples whose states form a
/// selected tuple, by explicit run enumeration.
std::set<PositionTuple> eval_reference(const Query& q, const Tree& t, std::size_t run_cap = 100'000);
/// Same result by a bottom-up pass over partial tuples.
std::set<PositionTuple> eval(const Query& q, const Tree& t);
/// Values at the selected tuples; throws ImproperInput unless t is proper.
std::set<ValueTuple> eval_values(const Query& q, const Tree& t);
/// Like eval_values but skips tuples that touch a valueless node.
std::set<ValueTuple> eval_values_partial(const Query& q, const Tree& t);

/// Single-tuple query in which every run realizes each index at exactly one
/// position, recognizable from its state.
struct NormalQuery {
    TreeAutomaton automaton;
    /// classes[i] holds the states realizing index i+1; pairwise disjoint.
    std::vector<std::set<StateId>> classes;

    /// The equivalent query selecting classes[0] x ... x classes[n-1].
    Query to_query() const;
};

/// Requires exactly one selected tuple.
NormalQuery normalize(const Query& q);

/// States <p,{..}> track which tuple states must still occur in the subtree;
/// a state is consumed where it first occurs on the chosen path. Reduced.
/// `projection` receives the underlying state of a for each result state.
TreeAutomaton coverage_automaton(const TreeAutomaton& a, const StateTuple& s,
                                 std::vector<StateId>* projection = nullptr);

/// Rules headed by a state of classes[i] read (i+1, sym); union over the inputs.
TreeAutomaton mark_query_automaton(const std::vector<NormalQuery>& queries);

/// Accepts a marked tree iff a accepts its mark erasure.
TreeAutomaton index_automaton(const TreeAutomaton& a, unsigned n);

/// Automaton format plus `select (p2, p3)` lines.
Query parse_query(std::string_view text);
std::string format_query(const Query& q);

std::string format_position_tuples(const std::set<PositionTuple>& tuples);
std::string format_value_tuples(const std::set<ValueTuple>& tuples);

} // namespace tqp
