#pragma once

#include <string>

#include "blockcc/ast.hpp"

namespace blockcc {

// Parses a translation unit of the C subset. Throws CompileError with kind
// Syntax or UnsupportedFeature.
Ast parse_source(const std::string& text);

// print_module followed by a reparse, giving canonical spans and layout.
Ast canonicalize(const Ast& ast);

// Integer constant expression evaluation (case labels, array sizes, overflow
// checks). Returns nullopt when the expression is not an integer constant.
std::optional<int64_t> const_eval_int(const Expr& e);
std::optional<double> const_eval_float(const Expr& e);

}  // namespace blockcc
