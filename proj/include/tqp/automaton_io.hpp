#pragma once

#include "automaton.hpp"

#include <string>
#include <string_view>

namespace tqp {

/// Reads the line-oriented automaton format:
///
///   automaton NAME
///   sym f 2
///   state p1 p2
///   initial p1
///   rule p1 -> f(p2, p2)
///   rule p2 -> a
///
/// `rule p -> q` with q a declared state (and not a symbol) is an epsilon rule.
TreeAutomaton parse_automaton(std::string_view text);

/// Inverse of parse_automaton; output is deterministic.
std::string format_automaton(const TreeAutomaton& a);

} // namespace tqp
