#pragma once

#include <compare>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>

namespace tqp {

/// Arbitrary-precision natural number. Data values are only copied and
/// compared, so a normalized decimal digit string is all the arithmetic we need.
class Nat {
public:
    Nat() : digits_("0") {}
    explicit Nat(std::uint64_t v) : digits_(std::to_string(v)) {}

    /// Throws ParseError on anything that is not a nonempty digit string.
    static Nat parse(std::string_view text);

    const std::string& str() const { return digits_; }

    friend bool operator==(const Nat&, const Nat&) = default;
    friend std::strong_ordering operator<=>(const Nat& a, const Nat& b) {
        if (a.digits_.size() != b.digits_.size())
            return a.digits_.size() <=> b.digits_.size();
        return a.digits_ <=> b.digits_;
    }

private:
    std::string digits_;
};

inline std::ostream& operator<<(std::ostream& os, const Nat& n) { return os << n.str(); }

} // namespace tqp
