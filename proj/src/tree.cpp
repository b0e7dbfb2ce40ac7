#include "tqp/tree.hpp"
#include "tqp/errors.hpp"
#include "lexer.hpp"

#include <algorithm>
#include <functional>

namespace tqp {

Nat Nat::parse(std::string_view text) {
    if (!detail::is_natural(text)) throw ParseError("not a natural number: '" + std::string(text) + "'", 0, 0);
    auto first = text.find_first_not_of('0');
    Nat n;
    n.digits_ = first == std::string_view::npos ? "0" : std::string(text.substr(first));
    return n;
}

// ---------------------------------------------------------------- Position

Position Position::parse(std::string_view text) {
    if (text == "eps" || text.empty()) return Position();
    std::vector<unsigned> path;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto dot = text.find('.', start);
        auto part = text.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start);
        if (!detail::is_natural(part) || part.size() > 9)
            throw ParseError("malformed position '" + std::string(text) + "'", 0, 0);
        unsigned idx = static_cast<unsigned>(std::stoul(std::string(part)));
        if (idx == 0) throw ParseError("positions are 1-based: '" + std::string(text) + "'", 0, 0);
        path.push_back(idx);
        if (dot == std::string_view::npos) break;
        start = dot + 1;
    }
    return Position(std::move(path));
}

Position Position::child(unsigned i) const {
    auto p = path_;
    p.push_back(i);
    return Position(std::move(p));
}

Position Position::concat(const Position& suffix) const {
    auto p = path_;
    p.insert(p.end(), suffix.path_.begin(), suffix.path_.end());
    return Position(std::move(p));
}

bool Position::is_prefix_of(const Position& other) const {
    return path_.size() <= other.path_.size() &&
           std::equal(path_.begin(), path_.end(), other.path_.begin());
}

std::string Position::to_string() const {
    if (path_.empty()) return "eps";
    std::string s;
    for (std::size_t i = 0; i < path_.size(); ++i) {
        if (i) s += '.';
        s += std::to_string(path_[i]);
    }
    return s;
}

// ---------------------------------------------------------------- Tree

Tree::Tree(Symbol label, std::optional<Nat> value, std::vector<Tree> children)
    : label_(std::move(label)), value_(std::move(value)), children_(std::move(children)) {
    if (children_.size() != label_.rank)
        throw ValidationError("symbol '" + label_.to_string() + "' has rank " + std::to_string(label_.rank) +
                              " but " + std::to_string(children_.size()) + " children were given");
}

const Tree& Tree::child(unsigned i) const {
    if (i == 0 || i > children_.size())
        throw ValidationError("child index " + std::to_string(i) + " out of range for '" + label_.to_string() + "'");
    return children_[i - 1];
}

std::size_t Tree::size() const {
    std::size_t n = 1;
    for (const auto& c : children_) n += c.size();
    return n;
}

std::size_t Tree::height() const {
    std::size_t h = 0;
    for (const auto& c : children_) h = std::max(h, c.height());
    return h + 1;
}

bool Tree::is_proper() const {
    if (!value_) return false;
    return std::all_of(children_.begin(), children_.end(), [](const Tree& c) { return c.is_proper(); });
}

bool Tree::has_values() const {
    if (value_) return true;
    return std::any_of(children_.begin(), children_.end(), [](const Tree& c) { return c.has_values(); });
}

bool Tree::valid(const Position& v) const {
    const Tree* cur = this;
    for (unsigned i : v.path()) {
        if (i == 0 || i > cur->children_.size()) return false;
        cur = &cur->children_[i - 1];
    }
    return true;
}

const Tree& Tree::at(const Position& v) const {
    const Tree* cur = this;
    for (unsigned i : v.path()) {
        if (i == 0 || i > cur->children_.size())
            throw ValidationError("position " + v.to_string() + " is not a position of the tree");
        cur = &cur->children_[i - 1];
    }
    return *cur;
}

Tree Tree::with_value(std::optional<Nat> value) const {
    Tree t = *this;
    t.value_ = std::move(value);
    return t;
}

Tree strip_values(const Tree& t) {
    std::vector<Tree> kids;
    kids.reserve(t.children().size());
    for (const auto& c : t.children()) kids.push_back(strip_values(c));
    return Tree(t.label(), std::nullopt, std::move(kids));
}

Tree strip_marks(const Tree& t) {
    std::vector<Tree> kids;
    kids.reserve(t.children().size());
    for (const auto& c : t.children()) kids.push_back(strip_marks(c));
    return Tree(t.label().base(), t.value(), std::move(kids));
}

namespace {

Tree number_rec(const Tree& t, std::uint64_t& next) {
    Nat mine(next++);
    std::vector<Tree> kids;
    kids.reserve(t.children().size());
    for (const auto& c : t.children()) kids.push_back(number_rec(c, next));
    return Tree(t.label(), mine, std::move(kids));
}

void collect_positions(const Tree& t, Position& cur, std::vector<Position>& out) {
    out.push_back(cur);
    for (unsigned i = 1; i <= t.children().size(); ++i) {
        Position c = cur.child(i);
        collect_positions(t.child(i), c, out);
    }
}

Tree rebuild_at(const Tree& t, const std::vector<unsigned>& path, std::size_t depth,
                const std::function<Tree(const Tree&)>& f) {
    if (depth == path.size()) return f(t);
    unsigned i = path[depth];
    std::vector<Tree> kids(t.children().begin(), t.children().end());
    kids[i - 1] = rebuild_at(kids[i - 1], path, depth + 1, f);
    return Tree(t.label(), t.value(), std::move(kids));
}

} // namespace

Tree number_preorder(const Tree& t, std::uint64_t first) { return number_rec(t, first); }

std::vector<Position> positions(const Tree& t) {
    std::vector<Position> out;
    Position root;
    collect_positions(t, root, out);
    return out;
}

std::set<Position> position_set(const Tree& t) {
    auto v = positions(t);
    return std::set<Position>(v.begin(), v.end());
}

Tree set_value(const Tree& t, const Position& v, Nat value) {
    if (!t.valid(v)) throw ValidationError("position " + v.to_string() + " is not a position of the tree");
    return rebuild_at(t, v.path(), 0, [&](const Tree& sub) { return sub.with_value(value); });
}

Tree replace_subtree(const Tree& t, const Position& v, Tree replacement) {
    if (!t.valid(v)) throw ValidationError("position " + v.to_string() + " is not a position of the tree");
    return rebuild_at(t, v.path(), 0, [&](const Tree&) { return replacement; });
}

// ---------------------------------------------------------------- Context

Context Context::variable(unsigned index) {
    if (index == 0) throw ValidationError("variables are numbered from 1");
    Context c;
    c.variable_ = index;
    return c;
}

Context Context::node(Symbol label, std::vector<Context> children) {
    if (children.size() != label.rank)
        throw ValidationError("symbol '" + label.to_string() + "' has rank " + std::to_string(label.rank) +
                              " but " + std::to_string(children.size()) + " children were given");
    Context c;
    c.label_ = std::move(label);
    c.children_ = std::move(children);
    return c;
}

bool Context::valid(const Position& v) const {
    const Context* cur = this;
    for (unsigned i : v.path()) {
        if (i == 0 || i > cur->children_.size()) return false;
        cur = &cur->children_[i - 1];
    }
    return true;
}

const Context& Context::at(const Position& v) const {
    const Context* cur = this;
    for (unsigned i : v.path()) {
        if (i == 0 || i > cur->children_.size())
            throw ValidationError("position " + v.to_string() + " is not a position of the context");
        cur = &cur->children_[i - 1];
    }
    return *cur;
}

std::vector<Position> Context::positions() const {
    std::vector<Position> out;
    std::function<void(const Context&, const Position&)> walk = [&](const Context& c, const Position& p) {
        out.push_back(p);
        for (unsigned i = 1; i <= c.children_.size(); ++i) walk(c.children_[i - 1], p.child(i));
    };
    walk(*this, Position());
    return out;
}

std::size_t Context::size() const {
    std::size_t n = 1;
    for (const auto& c : children_) n += c.size();
    return n;
}

std::vector<unsigned> Context::variables() const {
    std::vector<unsigned> out;
    std::function<void(const Context&)> walk = [&](const Context& c) {
        if (c.is_variable()) out.push_back(c.variable_);
        for (const auto& k : c.children_) walk(k);
    };
    walk(*this);
    return out;
}

bool Context::contains_variable(unsigned index) const {
    auto vars = variables();
    return std::find(vars.begin(), vars.end(), index) != vars.end();
}

bool Context::is_linear() const {
    auto vars = variables();
    std::sort(vars.begin(), vars.end());
    return std::adjacent_find(vars.begin(), vars.end()) == vars.end();
}

std::optional<Position> Context::variable_position(unsigned index) const {
    for (const auto& p : positions()) {
        const auto& c = at(p);
        if (c.is_variable() && c.variable_index() == index) return p;
    }
    return std::nullopt;
}

Tree substitute(const Context& context, std::span<const Tree> args) {
    if (!context.is_linear()) throw ValidationError("context is not linear");
    std::function<Tree(const Context&)> build = [&](const Context& c) -> Tree {
        if (c.is_variable()) {
            if (c.variable_index() > args.size())
                throw ValidationError("context uses x" + std::to_string(c.variable_index()) + " but only " +
                                      std::to_string(args.size()) + " arguments were given");
            return args[c.variable_index() - 1];
        }
        std::vector<Tree> kids;
        kids.reserve(c.children().size());
        for (const auto& k : c.children()) kids.push_back(build(k));
        return Tree(c.label(), std::nullopt, std::move(kids));
    };
    return build(context);
}

} // namespace tqp
