#pragma once

#include "automaton.hpp"
#include "tree.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace tqp {

/// state(symbol^z(x1..xn)) -> context[j <- z][p1(x1), ..., pn(xn)]
struct TransducerRule {
    std::string state;
    Symbol symbol;
    Context context = Context::variable(1);
    /// Entry i is the state applied to x_{i+1}; empty when x_{i+1} is deleted.
    std::vector<std::optional<std::string>> child_states;
    /// Context position receiving the consumed value; never a variable.
    std::optional<Position> value_position;

    bool is_subtree_deleting() const;
    bool is_value_erasing() const { return !value_position.has_value(); }
};

/// Deterministic linear top-down data tree transducer.
class Transducer {
public:
    explicit Transducer(std::string name = "T") : name_(std::move(name)) {}

    const std::string& name() const { return name_; }
    void set_name(std::string name) { name_ = std::move(name); }

    const RankedAlphabet& input_alphabet() const { return input_; }
    const RankedAlphabet& output_alphabet() const { return output_; }
    void add_input_symbol(const Symbol& s) { input_.add(s); }
    void add_output_symbol(const Symbol& s) { output_.add(s); }

    /// Throws ValidationError for duplicates.
    void add_state(const std::string& name);
    bool has_state(const std::string& name) const { return states_.count(name) != 0; }
    const std::set<std::string>& states() const { return states_; }

    void set_initial(const std::string& state);
    /// Throws ValidationError when unset.
    const std::string& initial() const;

    /// Validates determinism, linearity, states, ranks and the value designation.
    /// Input and output symbols are added to the alphabets.
    void add_rule(TransducerRule rule);
    const TransducerRule* find_rule(const std::string& state, const Symbol& symbol) const;
    const std::map<std::pair<std::string, Symbol>, TransducerRule>& rules() const { return rules_; }

private:
    std::string name_;
    RankedAlphabet input_;
    RankedAlphabet output_;
    std::set<std::string> states_;
    std::optional<std::string> initial_;
    std::map<std::pair<std::string, Symbol>, TransducerRule> rules_;
};

/// What one top-down pass did to each input position.
struct ApplyTrace {
    std::optional<Tree> output;
    /// First position (preorder) where no rule applied.
    std::optional<Position> stuck_at;
    std::string stuck_state;
    /// Positions in subtrees dropped by a deleting rule (roots included).
    std::set<Position> deleted;
    /// Positions consumed by a value-erasing rule.
    std::set<Position> value_erased;
    /// Input position -> output position that receives its value.
    std::map<Position, Position> moves;
    /// Transducer state that consumed each visited position.
    std::map<Position, std::string> states;
};

/// Runs the transducer on any data tree (values may be missing).
ApplyTrace apply_traced(const Transducer& tr, const Tree& t);
/// Throws ImproperInput for non-proper t and NotInDomain when no rule applies.
Tree apply(const Transducer& tr, const Tree& t);
/// Same, for valueless trees: the output shape only.
Tree apply_shape(const Transducer& tr, const Tree& t);

inline const char* const kBottomState = "<bot>";
inline const char* const kAnyState = "<any>";

/// Automaton over the input alphabet whose runs label deleted subtrees with <bot>.
TreeAutomaton deletion_automaton(const Transducer& tr);
/// Accepts the shapes of the transducer's domain (reduced).
TreeAutomaton domain_automaton(const Transducer& tr);
/// Same transducer with every symbol of `alphabet` added to its input
/// alphabet, so deleted subtrees may use them. Throws AlphabetMismatch on a
/// rank conflict.
Transducer widen_input(const Transducer& tr, const RankedAlphabet& alphabet);
/// Same rules without value designations.
Transducer strip_transducer(const Transducer& tr);

/// Output automaton simulating runs of `a` through the transducer, before
/// epsilon elimination. States are <pA,pT> at context roots and variables and
/// <rI,tJ,v> inside contexts (rule I of a, rule J of the transducer). A
/// context root that does not receive the value is <rI,tJ,eps>, reached from
/// the pair state by an epsilon rule.
struct ImageAutomaton {
    TreeAutomaton automaton;
    /// A-state -> states that label the output node receiving that node's value.
    std::map<StateId, std::set<StateId>> value_states;
};
ImageAutomaton image_automaton(const TreeAutomaton& a, const Transducer& tr);

/// Image of L(a) under the transducer, ignoring values (epsilon-free, reduced).
TreeAutomaton forward_type(const TreeAutomaton& a, const Transducer& tr);
/// The input trees in the domain whose image shape lies in L(b) (reduced).
TreeAutomaton inverse_type(const TreeAutomaton& b, const Transducer& tr);

/// Transducer over marked input and output symbols (1..n); the consumed mark
/// travels to the designated output position. Rules without a designation
/// emit the unmarked context. The result carries no value designations.
Transducer mark_transducer(const Transducer& tr, unsigned n);

/// Text format: see README.
Transducer parse_transducer(std::string_view text);
std::string format_transducer(const Transducer& tr);
std::string format_context(const TransducerRule& rule);

} // namespace tqp
