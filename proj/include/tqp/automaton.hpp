#pragma once

#include "alphabet.hpp"
#include "tree.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace tqp {

using StateId = std::uint32_t;

/// Default cap on macrostates created by subset constructions.
inline constexpr std::size_t kDefaultStateBudget = 1'000'000;

/// p -> sym(p_1, ..., p_n)
struct Rule {
    StateId lhs = 0;
    Symbol symbol;
    std::vector<StateId> children;

    friend bool operator==(const Rule&, const Rule&) = default;
    friend auto operator<=>(const Rule&, const Rule&) = default;
};

/// p -> q, only present in intermediate automata of the image construction.
struct EpsilonRule {
    StateId from = 0;
    StateId to = 0;

    friend bool operator==(const EpsilonRule&, const EpsilonRule&) = default;
    friend auto operator<=>(const EpsilonRule&, const EpsilonRule&) = default;
};

/// Root-directed ranked tree automaton (states, initial root states, rules
/// p -> sym(p_1..p_n)). State names are unique; ids are dense from 0.
class TreeAutomaton {
public:
    TreeAutomaton() = default;
    explicit TreeAutomaton(RankedAlphabet alphabet, std::string name = "A")
        : alphabet_(std::move(alphabet)), name_(std::move(name)) {}

    const std::string& name() const { return name_; }
    void set_name(std::string name) { name_ = std::move(name); }

    const RankedAlphabet& alphabet() const { return alphabet_; }
    void add_symbol(const Symbol& s) { alphabet_.add(s); }

    /// Throws ValidationError when the name is taken.
    StateId add_state(const std::string& name);
    StateId ensure_state(const std::string& name);
    std::optional<StateId> find_state(std::string_view name) const;
    /// Throws ValidationError for unknown names.
    StateId state(std::string_view name) const;
    const std::string& state_name(StateId id) const { return names_.at(id); }
    std::size_t state_count() const { return names_.size(); }

    void add_initial(StateId s);
    bool is_initial(StateId s) const { return initial_.count(s) != 0; }
    const std::set<StateId>& initial() const { return initial_; }

    /// Unknown symbols are added to the alphabet; a rank conflict throws.
    void add_rule(StateId lhs, const Symbol& symbol, std::vector<StateId> children);
    void add_epsilon(StateId from, StateId to);

    const std::set<Rule>& rules() const { return rules_; }
    const std::set<EpsilonRule>& epsilon_rules() const { return epsilon_; }
    bool has_epsilon() const { return !epsilon_.empty(); }

    /// Rules grouped by symbol, for bottom-up evaluation.
    const std::map<Symbol, std::vector<Rule>>& rules_by_symbol() const { return by_symbol_; }

private:
    void check_state(StateId s) const;

    RankedAlphabet alphabet_;
    std::string name_ = "A";
    std::vector<std::string> names_;
    std::unordered_map<std::string, StateId> index_;
    std::set<StateId> initial_;
    std::set<Rule> rules_;
    std::set<EpsilonRule> epsilon_;
    std::map<Symbol, std::vector<Rule>> by_symbol_;
};

/// Renders structured state names: <a,b,c>.
std::string tuple_name(std::initializer_list<std::string_view> parts);

/// Accepting run: a state for every position.
using Run = std::map<Position, StateId>;

/// States q such that t is accepted from q (values and marks are compared as
/// part of the symbol; values are ignored).
std::set<StateId> states_accepting(const TreeAutomaton& a, const Tree& t);
bool accepts(const TreeAutomaton& a, const Tree& t);
/// All accepting runs on t; throws BudgetExceeded past `cap` runs.
std::vector<Run> enumerate_runs(const TreeAutomaton& a, const Tree& t, std::size_t cap = 100'000);

/// Drops states that occur in no accepting run, and their rules.
TreeAutomaton reduce(const TreeAutomaton& a);
std::vector<bool> productive_states(const TreeAutomaton& a);

/// Synchronized product; states <p,q>; only pairs reachable from initial pairs.
/// `origin`, when given, receives the component states of each result state.
TreeAutomaton product(const TreeAutomaton& a, const TreeAutomaton& b,
                      std::vector<std::pair<StateId, StateId>>* origin = nullptr);
/// States renamed <k,p> for the k-th operand (1-based).
TreeAutomaton disjoint_union(std::span<const TreeAutomaton> parts);
TreeAutomaton union_of(const TreeAutomaton& a, const TreeAutomaton& b);

/// Removes epsilon rules by substituting right-hand states with their
/// epsilon-descendants that head an ordinary rule; initial states are closed
/// the same way. Result is reduced.
TreeAutomaton eliminate_epsilon(const TreeAutomaton& a);

/// Complement relative to all trees over a's alphabet, by bottom-up subset
/// construction (the empty macrostate is the sink).
TreeAutomaton complement(const TreeAutomaton& a, std::size_t budget = kDefaultStateBudget);

bool is_empty(const TreeAutomaton& a);
/// A minimum-size accepted tree, if any.
std::optional<Tree> shortest_tree(const TreeAutomaton& a);
/// Minimum-size tree accepted from each state (nullopt for unproductive states).
std::vector<std::optional<Tree>> minimal_trees(const TreeAutomaton& a);

struct LanguageCheck {
    bool holds = true;
    std::optional<Tree> counterexample;
};

/// L(a) subset of L(b)? On failure the counterexample is a minimum-size tree of L(a) \ L(b).
LanguageCheck included(const TreeAutomaton& a, const TreeAutomaton& b, std::size_t budget = kDefaultStateBudget);
/// On failure the counterexample lies in the symmetric difference.
LanguageCheck equivalent(const TreeAutomaton& a, const TreeAutomaton& b, std::size_t budget = kDefaultStateBudget);

/// An accepted tree together with a position that some accepting run labels
/// with `state`. Nullopt if the state is useless.
std::optional<std::pair<Tree, Position>> certificate(const TreeAutomaton& a, StateId state);
/// Same, but the run applies `rule` at the returned position.
std::optional<std::pair<Tree, Position>> certificate(const TreeAutomaton& a, const Rule& rule);

TreeAutomaton universal_automaton(const RankedAlphabet& alphabet);
/// Accepts exactly strip_values(t).
TreeAutomaton singleton_automaton(const Tree& t);

/// Size of the largest accepted tree, or nullopt if the language is infinite
/// (0 for the empty language).
std::optional<std::size_t> max_tree_size(const TreeAutomaton& a);

} // namespace tqp
