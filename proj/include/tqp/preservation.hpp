#pragma once

#include "automaton.hpp"
#include "query.hpp"
#include "transducer.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tqp {

/// Sizes of the intermediate automata, keyed by a descriptive name.
using SizeReport = std::map<std::string, std::size_t>;

enum class LossKind { Deleted, ValueErased };

const char* to_string(LossKind kind);

/// A selected state whose node can lose its value under the transducer.
struct WeakWitness {
    /// Selected tuple being checked (state names of the query automaton).
    std::vector<std::string> tuple;
    std::string product_state;
    std::string query_state;
    std::string transducer_state;
    LossKind kind = LossKind::Deleted;
    /// Symbol read under a value-erasing rule; empty for deletions.
    std::string symbol;
    /// Proper tree (preorder values) with a run reaching the state at `position`.
    Tree tree = Tree(Symbol("?", 0));
    Position position;
};

struct WeakDecision {
    bool preserved = true;
    std::vector<WeakWitness> witnesses;
    SizeReport sizes;
};

/// One-state-at-a-time check over every selected state of a unary query.
WeakDecision weak_preserves_unary(const Query& q, const Transducer& tr);
/// General arity: each selected tuple is checked on its coverage automaton.
WeakDecision weak_preserves(const Query& q, const Transducer& tr);

/// Target-side query satisfying the weak equation. Throws ValidationError
/// when the transducer does not weakly preserve q.
Query construct_weak_query(const Query& q, const Transducer& tr, SizeReport* sizes = nullptr);

struct StrongDecision {
    bool preserved = true;
    /// Set when weak preservation already fails.
    std::optional<WeakDecision> weak;
    /// Marked tree accepted by the round-trip automaton (each index once) but
    /// not by A_mk.
    std::optional<Tree> marked_witness;
    /// Two proper trees with images of the same shape that `distinguishes`
    /// accepts.
    std::optional<std::pair<Tree, Tree>> collision;
    SizeReport sizes;
};

/// Images of one shape, each with distinct values. True when an answer tuple
/// of the first tree sits at nodes carrying the same values in the second
/// image but is not an answer of the second tree: no target query can then
/// answer both images correctly.
bool distinguishes(const Tree& first_image, const std::set<ValueTuple>& first_answers, const Tree& second_image,
                   const std::set<ValueTuple>& second_answers);

StrongDecision strong_preserves(const Query& q, const Transducer& tr, std::size_t budget = kDefaultStateBudget);

/// Intermediate automata of the strong check, exposed for inspection.
struct MarkedAutomata {
    TreeAutomaton marked;     // A_mk
    Transducer transducer;    // T_mk
    TreeAutomaton image;      // T_mk(L(A_mk))
    TreeAutomaton roundtrip;  // T_mk^-1(T_mk(L(A_mk)))
    TreeAutomaton index;      // A_idx
    TreeAutomaton once;       // every index marked exactly once
};
MarkedAutomata marked_automata(const Query& q, const Transducer& tr);

/// Marked trees over a's alphabet in which each index 1..n occurs exactly once.
TreeAutomaton exactly_once_automaton(const RankedAlphabet& alphabet, unsigned n);

} // namespace tqp
