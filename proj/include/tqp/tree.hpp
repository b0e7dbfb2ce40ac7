#pragma once

#include "alphabet.hpp"
#include "value.hpp"

#include <compare>
#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tqp {

/// Path of 1-based child indices from the root; the empty path is the root.
class Position {
public:
    Position() = default;
    explicit Position(std::vector<unsigned> path) : path_(std::move(path)) {}

    static Position root() { return Position(); }
    /// Accepts `eps` or dot-separated 1-based indices such as `2.1`.
    static Position parse(std::string_view text);

    bool is_root() const { return path_.empty(); }
    std::size_t depth() const { return path_.size(); }
    const std::vector<unsigned>& path() const { return path_; }

    Position child(unsigned i) const;
    Position concat(const Position& suffix) const;
    bool is_prefix_of(const Position& other) const;

    /// `eps` for the root, otherwise `2.1`.
    std::string to_string() const;

    friend bool operator==(const Position&, const Position&) = default;
    friend auto operator<=>(const Position&, const Position&) = default;

private:
    std::vector<unsigned> path_;
};

/// Immutable ranked data tree; every node has a symbol and possibly a value.
class Tree {
public:
    /// Throws ValidationError when the number of children differs from the rank.
    Tree(Symbol label, std::optional<Nat> value, std::vector<Tree> children = {});
    explicit Tree(Symbol label, std::vector<Tree> children = {})
        : Tree(std::move(label), std::nullopt, std::move(children)) {}

    const Symbol& label() const { return label_; }
    const std::optional<Nat>& value() const { return value_; }
    std::span<const Tree> children() const { return children_; }
    /// 1-based, matching positions.
    const Tree& child(unsigned i) const;

    std::size_t size() const;
    std::size_t height() const;
    bool is_proper() const;
    bool has_values() const;

    /// Subtree t/v; throws ValidationError for an invalid position.
    const Tree& at(const Position& v) const;
    bool valid(const Position& v) const;

    /// Same tree with a different value at the root only.
    Tree with_value(std::optional<Nat> value) const;

    friend bool operator==(const Tree&, const Tree&) = default;
    friend auto operator<=>(const Tree& a, const Tree& b) {
        if (auto c = a.label_ <=> b.label_; c != 0) return c;
        if (auto c = a.value_ <=> b.value_; c != 0) return c;
        return a.children_ <=> b.children_;
    }

private:
    Symbol label_;
    std::optional<Nat> value_;
    std::vector<Tree> children_;
};

/// t with every value removed.
Tree strip_values(const Tree& t);
/// t with every mark removed, so (i, sym) becomes sym.
Tree strip_marks(const Tree& t);
/// Every node gets first, first+1, ... in preorder.
Tree number_preorder(const Tree& t, std::uint64_t first = 1);
/// Positions in preorder.
std::vector<Position> positions(const Tree& t);
std::set<Position> position_set(const Tree& t);
/// Only the value at v changes.
Tree set_value(const Tree& t, const Position& v, Nat value);
/// t[v <- replacement].
Tree replace_subtree(const Tree& t, const Position& v, Tree replacement);

/// A linear tree over output symbols and variables x_1..x_n.
class Context {
public:
    static Context variable(unsigned index);
    static Context node(Symbol label, std::vector<Context> children = {});

    bool is_variable() const { return variable_ != 0; }
    /// 1-based variable index; only meaningful when is_variable().
    unsigned variable_index() const { return variable_; }
    const Symbol& label() const { return label_; }
    std::span<const Context> children() const { return children_; }

    const Context& at(const Position& v) const;
    bool valid(const Position& v) const;
    std::vector<Position> positions() const;
    std::size_t size() const;

    /// Variable indices in preorder (duplicates included).
    std::vector<unsigned> variables() const;
    bool contains_variable(unsigned index) const;
    bool is_linear() const;
    /// Position of x_index, if it occurs.
    std::optional<Position> variable_position(unsigned index) const;

    friend bool operator==(const Context&, const Context&) = default;

private:
    Context() = default;

    unsigned variable_ = 0;
    Symbol label_;
    std::vector<Context> children_;
};

/// C[t_1, ..., t_n]. Variables not occurring in C drop their argument.
/// Throws ValidationError for a nonlinear context or a variable index beyond args.
Tree substitute(const Context& context, std::span<const Tree> args);

} // namespace tqp
