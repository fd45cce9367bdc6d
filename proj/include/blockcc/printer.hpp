#pragma once

#include <string>

#include "blockcc/ast.hpp"

namespace blockcc {

// Canonical text forms. print then parse yields a structurally identical AST,
// and printing the reparse yields the same text (fixpoint).
std::string print_expr(const Expr& e);
std::string print_stmt(const Stmt& s, int indent = 0);
std::string print_function(const FunctionDef& fn);
std::string print_module(const Ast& ast);

// Declaration fragment like "int *p" or "long arr[4]".
std::string print_declarator(const TypePtr& type, const std::string& name);

}  // namespace blockcc
