#include "tqp/transducer.hpp"
#include "tqp/errors.hpp"
#include "formats.hpp"

#include <sstream>

namespace tqp {

namespace {

using detail::quote;
using detail::Token;
using detail::TokenKind;
using detail::TokenStream;

/// `x3` -> 3, anything else -> 0.
unsigned variable_index(std::string_view w) {
    if (w.size() < 2 || w[0] != 'x' || !detail::is_natural(w.substr(1)) || w.size() > 7) return 0;
    return static_cast<unsigned>(std::stoul(std::string(w.substr(1))));
}

struct RuleReader {
    const Transducer& tr;
    TokenStream& ts;
    std::string value_var = "z";
    TransducerRule rule;

    Context context(const Position& here) {
        ts.expect(TokenKind::LParen, "'('");
        Token head = ts.expect(TokenKind::Word, "symbol or state");
        if (ts.peek().kind == TokenKind::Word) {
            Token var = ts.next();
            unsigned i = variable_index(var.text);
            if (i == 0) TokenStream::fail_at(var, "expected a variable such as x1, got " + quote(var.text));
            if (i > rule.symbol.rank)
                TokenStream::fail_at(var, "variable " + var.text + " exceeds the rank of " +
                                              quote(rule.symbol.to_string()));
            if (rule.child_states[i - 1]) TokenStream::fail_at(var, "variable " + var.text + " is used twice");
            if (!tr.has_state(head.text)) TokenStream::fail_at(head, "undeclared state " + quote(head.text));
            rule.child_states[i - 1] = head.text;
            ts.expect(TokenKind::RParen, "')'");
            return Context::variable(i);
        }

        std::string name = head.text;
        bool designated = false;
        if (auto caret = name.find('^'); caret != std::string::npos) {
            if (name.substr(caret + 1) != value_var)
                TokenStream::fail_at(head, "value designation must be '^" + value_var + "'");
            name = name.substr(0, caret);
            designated = true;
        }
        Token sym_tok = head;
        sym_tok.text = name;
        Symbol sym = detail::resolve_symbol(sym_tok, tr.output_alphabet());
        if (designated) {
            if (rule.value_position) TokenStream::fail_at(head, "more than one value designation");
            rule.value_position = here;
        }
        std::vector<Context> kids;
        while (ts.peek().kind == TokenKind::LParen) kids.push_back(context(here.child(kids.size() + 1)));
        ts.expect(TokenKind::RParen, "')'");
        if (kids.size() != sym.rank)
            TokenStream::fail_at(head, "rank mismatch: " + quote(sym.to_string()) + " has rank " +
                                           std::to_string(sym.rank) + " but " + std::to_string(kids.size()) +
                                           " children were given");
        return Context::node(sym, std::move(kids));
    }

    TransducerRule read() {
        Token st = ts.expect(TokenKind::Word, "state");
        if (!tr.has_state(st.text)) TokenStream::fail_at(st, "undeclared state " + quote(st.text));
        rule.state = st.text;
        ts.expect(TokenKind::LParen, "'('");
        Token sym_tok = ts.expect(TokenKind::Word, "input symbol");
        rule.symbol = detail::resolve_symbol(sym_tok, tr.input_alphabet());
        unsigned expected = 1;
        while (ts.peek().kind == TokenKind::Word) {
            Token w = ts.next();
            unsigned i = variable_index(w.text);
            if (i == 0) {
                if (expected != 1 || !detail::is_identifier(w.text))
                    TokenStream::fail_at(w, "expected variable x" + std::to_string(expected) + ", got " + quote(w.text));
                value_var = w.text;
                continue;
            }
            if (i != expected)
                TokenStream::fail_at(w, "expected variable x" + std::to_string(expected) + ", got " + quote(w.text));
            ++expected;
        }
        ts.expect(TokenKind::RParen, "')'");
        if (expected - 1 != rule.symbol.rank)
            TokenStream::fail_at(sym_tok, "rank mismatch: " + quote(rule.symbol.to_string()) + " has rank " +
                                              std::to_string(rule.symbol.rank) + " but " +
                                              std::to_string(expected - 1) + " variables were given");
        rule.child_states.assign(rule.symbol.rank, std::nullopt);
        ts.expect(TokenKind::Arrow, "'->'");
        rule.context = context(Position());
        if (!ts.at_end()) ts.fail("trailing input after rule");
        return std::move(rule);
    }
};

unsigned parse_rank(const Token& tok) {
    if (!detail::is_natural(tok.text) || tok.text.size() > 6)
        TokenStream::fail_at(tok, "malformed rank " + quote(tok.text));
    return static_cast<unsigned>(std::stoul(tok.text));
}

} // namespace

Transducer parse_transducer(std::string_view text) {
    auto lines = detail::split_lines(text);
    if (lines.empty()) throw ParseError("empty input; expected 'transducer NAME'", 1, 1);
    Transducer tr;
    bool first = true;
    for (auto& ts : lines) {
        Token kw = ts.expect(TokenKind::Word, "directive");
        if (first) {
            if (kw.text != "transducer") TokenStream::fail_at(kw, "expected 'transducer NAME'");
            tr.set_name(ts.expect(TokenKind::Word, "name").text);
            if (!ts.at_end()) ts.fail("trailing input after name");
            first = false;
            continue;
        }
        if (kw.text == "insym" || kw.text == "outsym") {
            Token group = kw;
            while (true) {
                Token name = ts.expect(TokenKind::Word, "symbol name");
                Token rank = ts.expect(TokenKind::Word, "rank");
                unsigned mark = 0;
                std::string base;
                if (!detail::split_marked(name.text, mark, base))
                    TokenStream::fail_at(name, "malformed symbol " + quote(name.text));
                try {
                    Symbol s(base, parse_rank(rank), mark);
                    if (group.text == "insym")
                        tr.add_input_symbol(s);
                    else
                        tr.add_output_symbol(s);
                } catch (const AlphabetMismatch& e) {
                    TokenStream::fail_at(name, e.what());
                }
                if (ts.at_end()) break;
                if (ts.peek().text == "insym" || ts.peek().text == "outsym") group = ts.next();
            }
        } else if (kw.text == "state") {
            while (!ts.at_end()) {
                Token s = ts.expect(TokenKind::Word, "state name");
                if (tr.has_state(s.text)) TokenStream::fail_at(s, "duplicate state " + quote(s.text));
                tr.add_state(s.text);
            }
        } else if (kw.text == "initial") {
            Token s = ts.expect(TokenKind::Word, "state name");
            if (!tr.has_state(s.text)) TokenStream::fail_at(s, "undeclared state " + quote(s.text));
            try {
                tr.set_initial(s.text);
            } catch (const ValidationError& e) {
                TokenStream::fail_at(s, e.what());
            }
            if (!ts.at_end()) ts.fail("a deterministic transducer has exactly one initial state");
        } else if (kw.text == "rule") {
            RuleReader reader{tr, ts, "z", {}};
            TransducerRule rule = reader.read();
            try {
                tr.add_rule(std::move(rule));
            } catch (const ValidationError& e) {
                TokenStream::fail_at(kw, e.what());
            }
        } else {
            TokenStream::fail_at(kw, "unknown directive " + quote(kw.text));
        }
    }
    tr.initial();
    return tr;
}

namespace {

void print_context(std::ostream& os, const TransducerRule& rule, const Context& c, const Position& here) {
    if (c.is_variable()) {
        os << '(' << *rule.child_states[c.variable_index() - 1] << " x" << c.variable_index() << ')';
        return;
    }
    os << '(' << c.label().to_string();
    if (rule.value_position && *rule.value_position == here) os << "^z";
    for (unsigned k = 1; k <= c.children().size(); ++k) {
        os << ' ';
        print_context(os, rule, c.children()[k - 1], here.child(k));
    }
    os << ')';
}

} // namespace

std::string format_context(const TransducerRule& rule) {
    std::ostringstream os;
    print_context(os, rule, rule.context, Position());
    return os.str();
}

std::string format_transducer(const Transducer& tr) {
    std::ostringstream os;
    os << "transducer " << tr.name() << '\n';
    for (const auto& s : tr.input_alphabet().symbols()) os << "insym " << s.to_string() << ' ' << s.rank << '\n';
    for (const auto& s : tr.output_alphabet().symbols()) os << "outsym " << s.to_string() << ' ' << s.rank << '\n';
    os << "state";
    for (const auto& s : tr.states()) os << ' ' << s;
    os << "\ninitial " << tr.initial() << '\n';
    for (const auto& [key, rule] : tr.rules()) {
        os << "rule " << rule.state << " (" << rule.symbol.to_string();
        if (rule.value_position) os << " z";
        for (unsigned i = 1; i <= rule.symbol.rank; ++i) os << " x" << i;
        os << ") -> " << format_context(rule) << '\n';
    }
    return os.str();
}

} // namespace tqp
