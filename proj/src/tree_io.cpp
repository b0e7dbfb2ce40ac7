#include "tqp/tree_io.hpp"
#include "tqp/errors.hpp"
#include "lexer.hpp"

#include <sstream>

namespace tqp {

namespace {

using detail::Token;
using detail::TokenKind;
using detail::TokenStream;

Tree parse_node(TokenStream& ts, const RankedAlphabet* alphabet) {
    ts.expect(TokenKind::LParen, "'('");
    Token sym = ts.expect(TokenKind::Word, "symbol");
    unsigned mark = 0;
    std::string name;
    if (!detail::split_marked(sym.text, mark, name)) TokenStream::fail_at(sym, "malformed symbol '" + sym.text + "'");

    std::optional<Nat> value;
    if (ts.accept(TokenKind::At)) {
        Token num = ts.expect(TokenKind::Word, "natural number after '@'");
        if (!detail::is_natural(num.text)) TokenStream::fail_at(num, "malformed value '" + num.text + "'");
        value = Nat::parse(num.text);
    }

    std::vector<Tree> kids;
    while (ts.peek().kind == TokenKind::LParen) kids.push_back(parse_node(ts, alphabet));
    ts.expect(TokenKind::RParen, "')'");

    Symbol label(name, static_cast<unsigned>(kids.size()), mark);
    if (alphabet) {
        auto decl = alphabet->find(name, mark);
        if (!decl && mark != 0) {
            if (auto base = alphabet->find(name, 0)) decl = base->marked(mark);
        }
        if (!decl) TokenStream::fail_at(sym, "unknown symbol '" + label.to_string() + "'");
        if (decl->rank != kids.size())
            TokenStream::fail_at(sym, "rank mismatch: '" + label.to_string() + "' has rank " +
                                          std::to_string(decl->rank) + " but " + std::to_string(kids.size()) +
                                          " children were given");
    }
    return Tree(std::move(label), std::move(value), std::move(kids));
}

Tree parse_impl(std::string_view text, const RankedAlphabet* alphabet) {
    TokenStream ts(detail::tokenize(text));
    Tree t = parse_node(ts, alphabet);
    if (!ts.at_end()) ts.fail("trailing input after tree");
    return t;
}

void print(std::ostream& os, const Tree& t) {
    os << '(' << t.label().to_string();
    if (t.value()) os << " @" << *t.value();
    for (const auto& c : t.children()) {
        os << ' ';
        print(os, c);
    }
    os << ')';
}

} // namespace

Tree parse_tree(std::string_view text, const RankedAlphabet& alphabet) { return parse_impl(text, &alphabet); }

Tree parse_tree(std::string_view text) { return parse_impl(text, nullptr); }

std::string to_string(const Tree& t) {
    std::ostringstream os;
    print(os, t);
    return os.str();
}

std::ostream& operator<<(std::ostream& os, const Tree& t) {
    print(os, t);
    return os;
}

std::ostream& operator<<(std::ostream& os, const Position& p) { return os << p.to_string(); }

} // namespace tqp
