#pragma once

#include <string>
#include <vector>

#include "nbspec/ast.hpp"

namespace nbspec {

// Deterministic canonical pretty-print. Parsing the output yields
// declarations structurally equal to the input (modulo spans).
std::string format_canonical(const std::vector<ast::RawDecl>& decls);

}  // namespace nbspec
