#pragma once

// Shared tokenizer for the tree, automaton, transducer and query text formats.

#include "tqp/errors.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace tqp::detail {

enum class TokenKind { Word, LParen, RParen, Comma, Arrow, At, End };

struct Token {
    TokenKind kind = TokenKind::End;
    std::string text;
    std::size_t line = 0;
    std::size_t column = 0;
};

/// Words are runs of [A-Za-z0-9_:^] or a balanced `<...>` group (structured
/// state names). `#` starts a comment that runs to the end of the line.
std::vector<Token> tokenize(std::string_view text, std::size_t first_line = 1);

class TokenStream {
public:
    explicit TokenStream(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

    const Token& peek(std::size_t ahead = 0) const;
    Token next();
    bool at_end() const { return peek().kind == TokenKind::End; }
    bool accept(TokenKind kind);
    Token expect(TokenKind kind, std::string_view what);

    [[noreturn]] void fail(const std::string& message) const;
    [[noreturn]] static void fail_at(const Token& token, const std::string& message);

private:
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

bool is_identifier(std::string_view s);
bool is_natural(std::string_view s);
/// Splits `2:a` into (2, "a"); plain identifiers give mark 0. Returns false if malformed.
bool split_marked(std::string_view word, unsigned& mark, std::string& name);

} // namespace tqp::detail
