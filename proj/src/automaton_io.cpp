#include "tqp/automaton_io.hpp"
#include "tqp/errors.hpp"
#include "formats.hpp"

#include <map>
#include <sstream>

namespace tqp {

namespace detail {

std::vector<TokenStream> split_lines(std::string_view text) {
    auto tokens = tokenize(text);
    std::map<std::size_t, std::vector<Token>> by_line;
    for (auto& t : tokens) {
        if (t.kind == TokenKind::End) continue;
        by_line[t.line].push_back(t);
    }
    std::vector<TokenStream> out;
    for (auto& [line, toks] : by_line) {
        Token end;
        end.line = line;
        end.column = toks.back().column + toks.back().text.size();
        toks.push_back(end);
        out.emplace_back(std::move(toks));
    }
    return out;
}

std::string quote(const std::string& s) { return "'" + s + "'"; }

Symbol resolve_symbol(const Token& tok, const RankedAlphabet& alphabet) {
    unsigned mark = 0;
    std::string name;
    if (!split_marked(tok.text, mark, name)) TokenStream::fail_at(tok, "malformed symbol " + quote(tok.text));
    if (auto s = alphabet.find(name, mark)) return *s;
    if (mark != 0)
        if (auto base = alphabet.find(name, 0)) return base->marked(mark);
    TokenStream::fail_at(tok, "unknown symbol " + quote(tok.text));
}

namespace {

unsigned parse_rank(const Token& tok) {
    if (!is_natural(tok.text) || tok.text.size() > 6) TokenStream::fail_at(tok, "malformed rank " + quote(tok.text));
    return static_cast<unsigned>(std::stoul(tok.text));
}

StateId known_state(const TreeAutomaton& a, const Token& tok) {
    auto s = a.find_state(tok.text);
    if (!s) TokenStream::fail_at(tok, "undeclared state " + quote(tok.text));
    return *s;
}

bool is_state_name(std::string_view s) {
    return is_identifier(s) || (s.size() >= 2 && s.front() == '<' && s.back() == '>');
}

void read_rule(TokenStream& ts, TreeAutomaton& a) {
    Token lhs_tok = ts.expect(TokenKind::Word, "state");
    StateId lhs = known_state(a, lhs_tok);
    ts.expect(TokenKind::Arrow, "'->'");
    Token rhs = ts.expect(TokenKind::Word, "symbol or state");

    if (ts.accept(TokenKind::LParen)) {
        Symbol sym = resolve_symbol(rhs, a.alphabet());
        std::vector<StateId> kids;
        if (!ts.accept(TokenKind::RParen)) {
            do {
                kids.push_back(known_state(a, ts.expect(TokenKind::Word, "state")));
            } while (ts.accept(TokenKind::Comma));
            ts.expect(TokenKind::RParen, "')'");
        }
        if (kids.size() != sym.rank)
            TokenStream::fail_at(rhs, "rank mismatch: " + quote(sym.to_string()) + " has rank " +
                                          std::to_string(sym.rank) + " but " + std::to_string(kids.size()) +
                                          " states were given");
        a.add_rule(lhs, sym, std::move(kids));
    } else {
        auto as_state = a.find_state(rhs.text);
        std::optional<Symbol> as_symbol;
        unsigned mark = 0;
        std::string name;
        if (split_marked(rhs.text, mark, name)) {
            as_symbol = a.alphabet().find(name, mark);
            if (!as_symbol && mark != 0)
                if (auto base = a.alphabet().find(name, 0)) as_symbol = base->marked(mark);
        }
        if (as_state && as_symbol)
            TokenStream::fail_at(rhs, quote(rhs.text) + " is both a state and a symbol; write " + rhs.text +
                                          "() for the symbol");
        if (as_state) {
            a.add_epsilon(lhs, *as_state);
        } else if (as_symbol) {
            if (as_symbol->rank != 0)
                TokenStream::fail_at(rhs, "rank mismatch: " + quote(as_symbol->to_string()) + " has rank " +
                                              std::to_string(as_symbol->rank) + " but no states were given");
            a.add_rule(lhs, *as_symbol, {});
        } else {
            TokenStream::fail_at(rhs, "unknown symbol or state " + quote(rhs.text));
        }
    }
    if (!ts.at_end()) ts.fail("trailing input after rule");
}

} // namespace

TreeAutomaton read_automaton(std::string_view text, std::string_view header, const ExtraDirective& extra) {
    auto lines = split_lines(text);
    if (lines.empty()) throw ParseError("empty input; expected '" + std::string(header) + " NAME'", 1, 1);

    TreeAutomaton a;
    bool first = true;
    for (auto& ts : lines) {
        Token kw = ts.expect(TokenKind::Word, "directive");
        if (first) {
            if (kw.text != header) TokenStream::fail_at(kw, "expected '" + std::string(header) + " NAME'");
            Token name = ts.expect(TokenKind::Word, "name");
            a.set_name(name.text);
            if (!ts.at_end()) ts.fail("trailing input after name");
            first = false;
            continue;
        }
        if (kw.text == "sym") {
            do {
                Token name = ts.expect(TokenKind::Word, "symbol name");
                Token rank = ts.expect(TokenKind::Word, "rank");
                unsigned mark = 0;
                std::string base;
                if (!split_marked(name.text, mark, base))
                    TokenStream::fail_at(name, "malformed symbol " + quote(name.text));
                try {
                    a.add_symbol(Symbol(base, parse_rank(rank), mark));
                } catch (const AlphabetMismatch& e) {
                    TokenStream::fail_at(name, e.what());
                }
            } while (!ts.at_end());
        } else if (kw.text == "state") {
            while (!ts.at_end()) {
                Token s = ts.expect(TokenKind::Word, "state name");
                if (!is_state_name(s.text)) TokenStream::fail_at(s, "malformed state name " + quote(s.text));
                if (a.find_state(s.text)) TokenStream::fail_at(s, "duplicate state " + quote(s.text));
                a.add_state(s.text);
            }
        } else if (kw.text == "initial") {
            while (!ts.at_end()) a.add_initial(known_state(a, ts.expect(TokenKind::Word, "state name")));
        } else if (kw.text == "rule") {
            read_rule(ts, a);
        } else if (!extra || !extra(kw, ts, a)) {
            TokenStream::fail_at(kw, "unknown directive " + quote(kw.text));
        }
    }
    return a;
}

} // namespace detail

TreeAutomaton parse_automaton(std::string_view text) { return detail::read_automaton(text, "automaton", nullptr); }

std::string format_automaton(const TreeAutomaton& a) {
    std::ostringstream os;
    os << "automaton " << a.name() << '\n';
    for (const auto& s : a.alphabet().symbols()) os << "sym " << s.to_string() << ' ' << s.rank << '\n';
    if (a.state_count()) {
        os << "state";
        for (StateId q = 0; q < a.state_count(); ++q) os << ' ' << a.state_name(q);
        os << '\n';
    }
    if (!a.initial().empty()) {
        os << "initial";
        for (auto q : a.initial()) os << ' ' << a.state_name(q);
        os << '\n';
    }
    for (const auto& r : a.rules()) {
        os << "rule " << a.state_name(r.lhs) << " -> " << r.symbol.to_string();
        if (!r.children.empty() || a.find_state(r.symbol.to_string())) {
            os << '(';
            for (std::size_t i = 0; i < r.children.size(); ++i) {
                if (i) os << ", ";
                os << a.state_name(r.children[i]);
            }
            os << ')';
        }
        os << '\n';
    }
    for (const auto& e : a.epsilon_rules()) os << "rule " << a.state_name(e.from) << " -> " << a.state_name(e.to) << '\n';
    return os.str();
}

} // namespace tqp
