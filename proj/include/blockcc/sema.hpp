#pragma once

#include "blockcc/ast.hpp"

namespace blockcc {

// Resolves names, checks label targets, and annotates every expression with
// its static type (Expr::type). Throws CompileError on violations, including
// UnresolvedLabel / DuplicateLabel for goto and UnsupportedFeature for
// constructs the backend cannot lower (aggregate parameters, etc).
void analyze_module(Ast& ast);

TypePtr integer_promote(const TypePtr& t);
TypePtr usual_arith_conversion(const TypePtr& a, const TypePtr& b);

// True when a value of type `from` may be used where `to` is expected
// without an explicit cast (arithmetic conversions, exact pointer match).
bool implicitly_convertible(const TypePtr& from, const TypePtr& to);

}  // namespace blockcc
