#pragma once

#include "tree.hpp"

#include <ostream>
#include <string>
#include <string_view>

namespace tqp {

/// Parses `(f @1 (a @2) (a))`. Symbols are checked against the alphabet; a
/// marked symbol `i:sym` is accepted when either it or its base is declared.
Tree parse_tree(std::string_view text, const RankedAlphabet& alphabet);
/// Same grammar, ranks taken from the number of children.
Tree parse_tree(std::string_view text);

std::string to_string(const Tree& t);
std::ostream& operator<<(std::ostream& os, const Tree& t);
std::ostream& operator<<(std::ostream& os, const Position& p);

} // namespace tqp
