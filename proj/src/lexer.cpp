#include "nbspec/lexer.hpp"

#include <cctype>

namespace nbspec {

namespace {

bool ident_start(unsigned char c) { return std::isalpha(c) || c == '_'; }
bool ident_char(unsigned char c) { return std::isalnum(c) || c == '_'; }

// Returns the length of a valid UTF-8 sequence starting at input[i], or 0.
size_t utf8_len(std::string_view s, size_t i) {
    unsigned char c = s[i];
    if (c < 0x80) return 1;
    size_t len;
    if ((c & 0xE0) == 0xC0 && c >= 0xC2) len = 2;
    else if ((c & 0xF0) == 0xE0) len = 3;
    else if ((c & 0xF8) == 0xF0 && c <= 0xF4) len = 4;
    else return 0;
    if (i + len > s.size()) return 0;
    for (size_t k = 1; k < len; ++k)
        if ((static_cast<unsigned char>(s[i + k]) & 0xC0) != 0x80) return 0;
    return len;
}

struct Lexer {
    std::string_view src;
    std::string file;
    size_t pos = 0;
    int line = 1;
    int col = 1;
    LexResult out;

    Span here() const { return Span{file, line, col, line, col}; }

    void advance(size_t n) {
        for (size_t k = 0; k < n && pos < src.size(); ++k) {
            if (src[pos] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++pos;
        }
    }

    void error(const std::string& msg, Span sp) {
        out.diags.push_back({Severity::Error, "lex-error", msg, sp});
    }

    void push(TokKind kind, std::string text, Span sp) {
        sp.end_line = line;
        sp.end_col = col > 1 ? col - 1 : 1;
        if (sp.end_line < sp.start_line ||
            (sp.end_line == sp.start_line && sp.end_col < sp.start_col)) {
            sp.end_line = sp.start_line;
            sp.end_col = sp.start_col;
        }
        out.tokens.push_back({kind, std::move(text), sp});
    }

    void run() {
        while (pos < src.size()) {
            unsigned char c = src[pos];
            Span sp = here();
            if (c == '\n') {
                advance(1);
                push(TokKind::Newline, "\n", sp);
                continue;
            }
            if (c == '\r') {  // CRLF or stray CR; both count as one newline
                advance(1);
                if (pos < src.size() && src[pos] == '\n') advance(1);
                push(TokKind::Newline, "\n", sp);
                continue;
            }
            if (c == ' ' || c == '\t') {
                advance(1);
                continue;
            }
            if (c == '#') {
                while (pos < src.size() && src[pos] != '\n') {
                    size_t len = utf8_len(src, pos);
                    if (len == 0) {
                        error("invalid UTF-8 byte in comment", here());
                        len = 1;
                    }
                    advance(len);
                }
                continue;
            }
            if (ident_start(c)) {
                std::string text;
                while (pos < src.size()) {
                    unsigned char ic = src[pos];
                    if (ident_char(ic)) {
                        text += static_cast<char>(ic);
                        advance(1);
                    } else if (ic >= 0x80) {
                        error("invalid UTF-8 byte in identifier", here());
                        advance(1);
                        break;
                    } else {
                        break;
                    }
                }
                push(TokKind::Ident, std::move(text), sp);
                continue;
            }
            if (std::isdigit(c) || (c == '-' && pos + 1 < src.size() &&
                                    std::isdigit(static_cast<unsigned char>(src[pos + 1])))) {
                std::string text;
                if (c == '-') {
                    text += '-';
                    advance(1);
                }
                while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) {
                    text += src[pos];
                    advance(1);
                }
                if (pos + 1 < src.size() && src[pos] == '.' &&
                    std::isdigit(static_cast<unsigned char>(src[pos + 1]))) {
                    text += '.';
                    advance(1);
                    while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) {
                        text += src[pos];
                        advance(1);
                    }
                }
                push(TokKind::Number, std::move(text), sp);
                continue;
            }
            if (c == '"') {
                advance(1);
                std::string text;
                bool closed = false;
                while (pos < src.size()) {
                    unsigned char sc = src[pos];
                    if (sc == '"') {
                        advance(1);
                        closed = true;
                        break;
                    }
                    if (sc == '\n') break;  // unterminated at end of line
                    if (sc == '\\' && pos + 1 < src.size()) {
                        char esc = src[pos + 1];
                        advance(2);
                        switch (esc) {
                            case 'n': text += '\n'; break;
                            case 't': text += '\t'; break;
                            case '"': text += '"'; break;
                            case '\\': text += '\\'; break;
                            default:
                                error(std::string("unknown escape '\\") + esc + "'", here());
                                text += esc;
                        }
                        continue;
                    }
                    size_t len = utf8_len(src, pos);
                    if (len == 0) {
                        error("invalid UTF-8 byte in string", here());
                        advance(1);
                        continue;
                    }
                    text.append(src.substr(pos, len));
                    advance(len);
                }
                if (!closed) error("unterminated string literal", sp);
                push(TokKind::String, std::move(text), sp);
                continue;
            }
            switch (c) {
                case '(': advance(1); push(TokKind::LParen, "(", sp); continue;
                case ')': advance(1); push(TokKind::RParen, ")", sp); continue;
                case '{': advance(1); push(TokKind::LBrace, "{", sp); continue;
                case '}': advance(1); push(TokKind::RBrace, "}", sp); continue;
                case '[': advance(1); push(TokKind::LBracket, "[", sp); continue;
                case ']': advance(1); push(TokKind::RBracket, "]", sp); continue;
                case ':': advance(1); push(TokKind::Colon, ":", sp); continue;
                case ',': advance(1); push(TokKind::Comma, ",", sp); continue;
                case ';': advance(1); push(TokKind::Semicolon, ";", sp); continue;
                case '^': advance(1); push(TokKind::Caret, "^", sp); continue;
                case '?': advance(1); push(TokKind::Question, "?", sp); continue;
                case '=':
                    if (pos + 1 < src.size() && src[pos + 1] == '>') {
                        advance(2);
                        push(TokKind::Arrow, "=>", sp);
                    } else {
                        advance(1);
                        push(TokKind::Equals, "=", sp);
                    }
                    continue;
                case '-':
                    if (pos + 1 < src.size() && src[pos + 1] == '>') {
                        advance(2);
                        push(TokKind::MapsTo, "->", sp);
                        continue;
                    }
                    [[fallthrough]];
                default:
                    if (c >= 0x80) {
                        size_t len = utf8_len(src, pos);
                        if (len == 0) {
                            error("invalid UTF-8 byte", sp);
                            advance(1);
                        } else {
                            error("unexpected non-ASCII character outside string", sp);
                            advance(len);
                        }
                    } else {
                        error(std::string("unexpected character '") + static_cast<char>(c) + "'",
                              sp);
                        advance(1);
                    }
            }
        }
        out.tokens.push_back({TokKind::Eof, "", here()});
    }
};

}  // namespace

LexResult tokenize(std::string_view input, const std::string& file) {
    Lexer lx;
    lx.src = input;
    lx.file = file;
    lx.run();
    return std::move(lx.out);
}

std::string format_diagnostic(const Diagnostic& d) {
    std::string s = d.span.file + ":" + std::to_string(d.span.start_line) + ":" +
                    std::to_string(d.span.start_col) + ": ";
    s += d.severity == Severity::Error ? "error" : "warning";
    s += " [" + d.code + "] " + d.message;
    return s;
}

}  // namespace nbspec
