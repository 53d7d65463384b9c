#pragma once

#include <string>
#include <vector>

namespace nbspec {

// 1-based line/column range inside one input file.
struct Span {
    std::string file;
    int start_line = 1;
    int start_col = 1;
    int end_line = 1;
    int end_col = 1;

    bool operator==(const Span&) const = default;
};

inline bool span_before(const Span& a, const Span& b) {
    if (a.file != b.file) return a.file < b.file;
    if (a.start_line != b.start_line) return a.start_line < b.start_line;
    return a.start_col < b.start_col;
}

enum class Severity { Error, Warning };

struct Diagnostic {
    Severity severity = Severity::Error;
    std::string code;     // short stable identifier, e.g. "unknown-identifier"
    std::string message;
    Span span;

    bool operator==(const Diagnostic&) const = default;
};

inline bool has_errors(const std::vector<Diagnostic>& diags) {
    for (const auto& d : diags)
        if (d.severity == Severity::Error) return true;
    return false;
}

std::string format_diagnostic(const Diagnostic& d);

}  // namespace nbspec
