#pragma once

#include <optional>
#include <vector>

#include "nbspec/ast.hpp"
#include "nbspec/lexer.hpp"

namespace nbspec {

struct ParseResult {
    std::vector<ast::RawDecl> decls;
    std::vector<Diagnostic> diags;
};

// Parses a token stream into raw declarations. Recovers at declaration
// boundaries so one pass reports every syntax error.
ParseResult parse_spec(const std::vector<Token>& tokens);

// Scenario files hold exactly one scenario declaration.
struct ScenarioParseResult {
    std::optional<ast::ScenarioDecl> scenario;
    std::vector<Diagnostic> diags;
};
ScenarioParseResult parse_scenario(const std::vector<Token>& tokens);

// Convenience: tokenize + parse in one step.
ParseResult parse_spec_text(std::string_view text, const std::string& file = "<input>");
ScenarioParseResult parse_scenario_text(std::string_view text,
                                        const std::string& file = "<input>");

bool is_layer_tag(const std::string& name);

}  // namespace nbspec
