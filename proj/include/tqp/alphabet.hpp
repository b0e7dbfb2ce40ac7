#pragma once

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tqp {

/// A ranked symbol. `mark` is 0 for ordinary symbols; a marked symbol (i, sym)
/// carries mark i > 0 and the rank of its base symbol.
struct Symbol {
    std::string name;
    unsigned rank = 0;
    unsigned mark = 0;

    Symbol() = default;
    Symbol(std::string n, unsigned r, unsigned m = 0) : name(std::move(n)), rank(r), mark(m) {}

    bool is_marked() const { return mark != 0; }
    Symbol base() const { return Symbol(name, rank); }
    Symbol marked(unsigned i) const { return Symbol(name, rank, i); }

    /// `a` or `1:a`.
    std::string to_string() const;

    friend bool operator==(const Symbol&, const Symbol&) = default;
    friend auto operator<=>(const Symbol&, const Symbol&) = default;
};

/// Finite set of symbols, unique by (mark, name).
class RankedAlphabet {
public:
    RankedAlphabet() = default;
    RankedAlphabet(std::initializer_list<Symbol> symbols);

    /// Adds a symbol; re-adding with the same rank is a no-op, a different
    /// rank throws AlphabetMismatch.
    void add(const Symbol& s);

    std::optional<Symbol> find(std::string_view name, unsigned mark = 0) const;
    bool contains(const Symbol& s) const;
    bool empty() const { return symbols_.empty(); }
    std::size_t size() const { return symbols_.size(); }
    bool has_constant() const;

    /// Symbols in canonical order.
    std::vector<Symbol> symbols() const;

    /// Sigma together with (i, sigma) for every i in [1, n] and every unmarked sigma.
    RankedAlphabet with_marks(unsigned n) const;
    /// Only the unmarked symbols.
    RankedAlphabet unmarked() const;

    /// Union; throws AlphabetMismatch on conflicting ranks.
    static RankedAlphabet merge(const RankedAlphabet& a, const RankedAlphabet& b);

    friend bool operator==(const RankedAlphabet&, const RankedAlphabet&) = default;

private:
    std::map<std::pair<unsigned, std::string>, unsigned> symbols_;
};

} // namespace tqp
