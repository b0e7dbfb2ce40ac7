#include "tqp/alphabet.hpp"
#include "tqp/errors.hpp"

namespace tqp {

std::string Symbol::to_string() const {
    if (mark == 0) return name;
    return std::to_string(mark) + ":" + name;
}

RankedAlphabet::RankedAlphabet(std::initializer_list<Symbol> symbols) {
    for (const auto& s : symbols) add(s);
}

void RankedAlphabet::add(const Symbol& s) {
    auto key = std::make_pair(s.mark, s.name);
    auto it = symbols_.find(key);
    if (it == symbols_.end()) {
        symbols_.emplace(std::move(key), s.rank);
        return;
    }
    if (it->second != s.rank)
        throw AlphabetMismatch("symbol '" + s.to_string() + "' declared with ranks " +
                               std::to_string(it->second) + " and " + std::to_string(s.rank));
}

std::optional<Symbol> RankedAlphabet::find(std::string_view name, unsigned mark) const {
    auto it = symbols_.find(std::make_pair(mark, std::string(name)));
    if (it == symbols_.end()) return std::nullopt;
    return Symbol(std::string(name), it->second, mark);
}

bool RankedAlphabet::contains(const Symbol& s) const {
    auto found = find(s.name, s.mark);
    return found && found->rank == s.rank;
}

bool RankedAlphabet::has_constant() const {
    for (const auto& [key, rank] : symbols_)
        if (rank == 0) return true;
    return false;
}

std::vector<Symbol> RankedAlphabet::symbols() const {
    std::vector<Symbol> out;
    out.reserve(symbols_.size());
    for (const auto& [key, rank] : symbols_) out.emplace_back(key.second, rank, key.first);
    return out;
}

RankedAlphabet RankedAlphabet::with_marks(unsigned n) const {
    RankedAlphabet out = *this;
    for (const auto& s : symbols()) {
        if (s.is_marked()) continue;
        for (unsigned i = 1; i <= n; ++i) out.add(s.marked(i));
    }
    return out;
}

RankedAlphabet RankedAlphabet::unmarked() const {
    RankedAlphabet out;
    for (const auto& s : symbols())
        if (!s.is_marked()) out.add(s);
    return out;
}

RankedAlphabet RankedAlphabet::merge(const RankedAlphabet& a, const RankedAlphabet& b) {
    RankedAlphabet out = a;
    for (const auto& s : b.symbols()) out.add(s);
    return out;
}

} // namespace tqp
