#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "nbspec/diagnostics.hpp"

namespace nbspec {

enum class TokKind {
    Ident,
    String,
    Number,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Colon,
    Comma,
    Semicolon,
    Equals,
    Caret,
    Question,
    Arrow,    // =>
    MapsTo,   // ->
    Newline,
    Eof,
};

struct Token {
    TokKind kind = TokKind::Eof;
    std::string text;  // identifier spelling, decoded string contents, or number spelling
    Span span;
};

struct LexResult {
    std::vector<Token> tokens;       // always ends with Eof
    std::vector<Diagnostic> diags;   // lex errors; tokens past an error are best-effort
};

// Tokenizes arbitrary bytes. Never throws; malformed input produces diagnostics.
LexResult tokenize(std::string_view input, const std::string& file = "<input>");

}  // namespace nbspec
