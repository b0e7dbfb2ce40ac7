#pragma once

#include "automaton.hpp"
#include "query.hpp"
#include "transducer.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tqp {

struct EnumerationBudget {
    std::size_t max_nodes = 8;
    /// Value of the root; the rest follow in preorder.
    std::uint64_t first_value = 1;
    std::size_t max_trees = 2'000'000;
};

/// All valueless trees with at most max_nodes nodes, by size, then symbol
/// order, then children in generation order. Throws ValidationError without
/// a constant and BudgetExceeded past max_trees.
std::vector<Tree> enumerate_shapes(const RankedAlphabet& alphabet, const EnumerationBudget& budget);
/// Same trees, valued by preorder index starting at first_value.
std::vector<Tree> enumerate_trees(const RankedAlphabet& alphabet, const EnumerationBudget& budget);

struct Discrepancy {
    std::string input;
    std::string expected;
    std::string actual;
};

struct OracleReport {
    std::string check;
    std::size_t checked = 0;
    std::vector<Discrepancy> discrepancies;
    /// Findings that may be explained by the enumeration bound.
    std::vector<Discrepancy> warnings;

    bool pass() const { return discrepancies.empty(); }
    std::string text() const;
};

/// eval by run enumeration against the bottom-up evaluation.
OracleReport check_eval_equivalence(const Query& q, const EnumerationBudget& budget);

/// Groups proper trees of the domain by image shape (values pulled back from
/// the image numbering) and compares the target query on the numbered image
/// with the union of source answers over the enumerated class.
/// Extra target answers are failures only when the class is provably complete
/// or no tree of the query language maps to the image shape.
OracleReport check_weak_equation(const Query& q, const Transducer& tr, const Query& target,
                                 const EnumerationBudget& budget);

/// Source answers must equal target answers on the image, tree by tree.
OracleReport check_strong_equation(const Query& q, const Transducer& tr, const Query& target,
                                   const EnumerationBudget& budget);

/// First enumerated pair with images of one shape that `distinguishes`
/// accepts; the pair is re-verified by direct evaluation before it is returned.
std::optional<std::pair<Tree, Tree>> check_strong_counterexample(const Query& q, const Transducer& tr,
                                                                 const EnumerationBudget& budget);

/// accepts(built, t) == predicate(t) for every enumerated valueless tree over `alphabet`.
OracleReport check_language_construction(const std::string& name, const TreeAutomaton& built,
                                         const std::function<bool(const Tree&)>& predicate,
                                         const RankedAlphabet& alphabet, const EnumerationBudget& budget);

/// Is there t in L(a) within the domain whose image shape is s? Decided by a
/// fixpoint over (a-state, transducer state, subtree of s).
bool has_preimage(const TreeAutomaton& a, const Transducer& tr, const Tree& s);

/// Does some accepting run of a on t use every state of s?
bool some_run_covers(const TreeAutomaton& a, const Tree& t, const StateTuple& s);

/// Proper tree whose values are moved by the transducer to the preorder
/// numbering of its image, other nodes getting values past the image.
Tree pull_back_values(const Transducer& tr, const Tree& shape, std::uint64_t first_value);

} // namespace tqp
