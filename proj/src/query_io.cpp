#include "tqp/automaton_io.hpp"
#include "tqp/errors.hpp"
#include "tqp/query.hpp"
#include "formats.hpp"

#include <sstream>

namespace tqp {

using detail::quote;
using detail::Token;
using detail::TokenKind;
using detail::TokenStream;

Query parse_query(std::string_view text) {
    std::vector<std::vector<std::string>> selections;
    std::optional<unsigned> arity;
    std::optional<Token> first_select;
    auto extra = [&](const Token& kw, TokenStream& ts, TreeAutomaton& a) {
        if (kw.text == "arity") {
            Token n = ts.expect(TokenKind::Word, "arity");
            if (!detail::is_natural(n.text) || n.text.size() > 2) TokenStream::fail_at(n, "malformed arity " + quote(n.text));
            auto v = static_cast<unsigned>(std::stoul(n.text));
            if (arity && *arity != v) TokenStream::fail_at(n, "arity disagrees with the selected tuples");
            arity = v;
            if (!ts.at_end()) ts.fail("trailing input after arity");
            return true;
        }
        if (kw.text != "select") return false;
        if (!first_select) first_select = kw;
        std::vector<std::string> tuple;
        std::vector<Token> toks;
        if (ts.accept(TokenKind::LParen)) {
            if (!ts.accept(TokenKind::RParen)) {
                do {
                    toks.push_back(ts.expect(TokenKind::Word, "state"));
                } while (ts.accept(TokenKind::Comma));
                ts.expect(TokenKind::RParen, "')'");
            }
        } else {
            toks.push_back(ts.expect(TokenKind::Word, "state or '('"));
        }
        if (!ts.at_end()) ts.fail("trailing input after selection");
        for (std::size_t i = 0; i < toks.size(); ++i) {
            if (!a.find_state(toks[i].text)) TokenStream::fail_at(toks[i], "undeclared state " + quote(toks[i].text));
            for (std::size_t j = 0; j < i; ++j)
                if (toks[i].text == toks[j].text)
                    TokenStream::fail_at(toks[i], "state " + quote(toks[i].text) + " occurs twice in the tuple");
            tuple.push_back(toks[i].text);
        }
        if (arity && *arity != tuple.size())
            TokenStream::fail_at(kw, "tuple has " + std::to_string(tuple.size()) + " states but earlier tuples have " +
                                         std::to_string(*arity));
        arity = static_cast<unsigned>(tuple.size());
        selections.push_back(std::move(tuple));
        return true;
    };
    TreeAutomaton a = detail::read_automaton(text, "automaton", extra);
    if (a.has_epsilon()) throw ParseError("query automata may not contain epsilon rules", 0, 0);
    if (!arity) throw ParseError("a query needs an 'arity' line or at least one 'select' line", 0, 0);
    return Query(a, *arity, selections);
}

std::string format_query(const Query& q) {
    std::ostringstream os;
    os << format_automaton(q.automaton());
    os << "arity " << q.arity() << '\n';
    for (const auto& s : q.selections()) {
        os << "select (";
        auto names = q.names(s);
        for (std::size_t i = 0; i < names.size(); ++i) os << (i ? ", " : "") << names[i];
        os << ")\n";
    }
    return os.str();
}

} // namespace tqp
