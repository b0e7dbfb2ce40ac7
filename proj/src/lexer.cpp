#include "lexer.hpp"

#include <cctype>

namespace tqp::detail {

namespace {

bool word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == ':' || c == '^';
}

} // namespace

std::vector<Token> tokenize(std::string_view text, std::size_t first_line) {
    std::vector<Token> out;
    std::size_t line = first_line;
    std::size_t col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k, ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    while (i < text.size()) {
        char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '#') {
            while (i < text.size() && text[i] != '\n') advance(1);
            continue;
        }
        Token tok;
        tok.line = line;
        tok.column = col;
        if (c == '(' || c == ')' || c == ',' || c == '@') {
            tok.kind = c == '(' ? TokenKind::LParen
                     : c == ')' ? TokenKind::RParen
                     : c == ',' ? TokenKind::Comma
                                : TokenKind::At;
            tok.text = std::string(1, c);
            advance(1);
        } else if (c == '-' && i + 1 < text.size() && text[i + 1] == '>') {
            tok.kind = TokenKind::Arrow;
            tok.text = "->";
            advance(2);
        } else if (c == '<') {
            std::size_t depth = 0;
            std::size_t j = i;
            for (; j < text.size(); ++j) {
                if (text[j] == '<') ++depth;
                if (text[j] == '>' && --depth == 0) break;
                if (text[j] == '\n') break;
            }
            if (j >= text.size() || text[j] != '>')
                throw ParseError("unbalanced '<' in state name", line, col);
            tok.kind = TokenKind::Word;
            tok.text = std::string(text.substr(i, j - i + 1));
            advance(j - i + 1);
        } else if (word_char(c)) {
            std::size_t j = i;
            while (j < text.size() && word_char(text[j])) ++j;
            tok.kind = TokenKind::Word;
            tok.text = std::string(text.substr(i, j - i));
            advance(j - i);
        } else {
            throw ParseError(std::string("unexpected character '") + c + "'", line, col);
        }
        out.push_back(std::move(tok));
    }
    Token end;
    end.line = line;
    end.column = col;
    out.push_back(end);
    return out;
}

const Token& TokenStream::peek(std::size_t ahead) const {
    std::size_t k = pos_ + ahead;
    return k < tokens_.size() ? tokens_[k] : tokens_.back();
}

Token TokenStream::next() {
    Token t = peek();
    if (pos_ + 1 < tokens_.size()) ++pos_;
    return t;
}

bool TokenStream::accept(TokenKind kind) {
    if (peek().kind != kind) return false;
    next();
    return true;
}

Token TokenStream::expect(TokenKind kind, std::string_view what) {
    if (peek().kind != kind) {
        std::string got = peek().kind == TokenKind::End ? "end of input" : "'" + peek().text + "'";
        fail("expected " + std::string(what) + ", got " + got);
    }
    return next();
}

void TokenStream::fail(const std::string& message) const { fail_at(peek(), message); }

void TokenStream::fail_at(const Token& token, const std::string& message) {
    throw ParseError(message, token.line, token.column);
}

bool is_identifier(std::string_view s) {
    if (s.empty()) return false;
    if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    return true;
}

bool is_natural(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

bool split_marked(std::string_view word, unsigned& mark, std::string& name) {
    auto colon = word.find(':');
    if (colon == std::string_view::npos) {
        if (!is_identifier(word)) return false;
        mark = 0;
        name = std::string(word);
        return true;
    }
    auto num = word.substr(0, colon);
    auto rest = word.substr(colon + 1);
    if (!is_natural(num) || !is_identifier(rest) || num.size() > 9) return false;
    mark = static_cast<unsigned>(std::stoul(std::string(num)));
    if (mark == 0) return false;
    name = std::string(rest);
    return true;
}

} // namespace tqp::detail
