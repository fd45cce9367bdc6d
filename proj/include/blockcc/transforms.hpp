#pragma once

#include <string>
#include <utility>
#include <vector>

#include "blockcc/ast.hpp"
#include "blockcc/verify.hpp"

namespace blockcc {

struct RenameEntry {
    std::string scope_path;
    std::string original;
    std::string fresh;
};

struct RenameMap {
    std::vector<RenameEntry> entries;
};

/// Gives every declaration in the function a unique name (`<orig>__<n>`, n
/// counting declarations of that identifier in preorder) and rebinds each
/// reference to its innermost enclosing declaration. Globals and call targets
/// keep their names.
std::pair<FunctionDef, RenameMap> rename_variables(const FunctionDef& fn);

/// Rewrites expressions with more than `limit` operator nodes into sequences
/// of temporary declarations, preserving left-to-right evaluation order.
/// Temporaries take the static type of the hoisted sub-expression, so the
/// function must be sema-annotated. Conditionally evaluated operands (the
/// arms of ?:, the right side of && and ||) and loop headers are left alone.
FunctionDef decompose_complex_expressions(const FunctionDef& fn, int limit);

/// Compiles both versions with the system C compiler against the same
/// generated driver and compares their output over the test cases. Throws
/// CompileError(Harness) if either version fails to build.
bool verify_rename_equivalence(const FunctionDef& original, const FunctionDef& renamed,
                               const std::vector<TestCase>& tests);

}  // namespace blockcc
