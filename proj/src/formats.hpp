#pragma once

// Line-directive reader shared by the automaton and query formats.

#include "lexer.hpp"
#include "tqp/automaton.hpp"

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace tqp::detail {

/// Tokens of one source line (End-terminated).
std::vector<TokenStream> split_lines(std::string_view text);

/// Resolves a written symbol against the declared alphabet; marked symbols
/// inherit the rank of their base.
Symbol resolve_symbol(const Token& tok, const RankedAlphabet& alphabet);

/// Handles a directive the automaton reader does not know; returns false if
/// the keyword is unknown to the caller as well.
using ExtraDirective = std::function<bool(const Token& keyword, TokenStream& line, TreeAutomaton& a)>;

TreeAutomaton read_automaton(std::string_view text, std::string_view header, const ExtraDirective& extra);

std::string quote(const std::string& s);

} // namespace tqp::detail
