#pragma once

// Test-only bounded interpreter for the C subset. Used as an independent
// oracle for transform equivalence and generator termination checks.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "blockcc/ast.hpp"

namespace blockcc::testsupport {

struct InterpValue {
    bool is_float = false;
    int64_t i = 0;   // canonical signed representation for integer types
    double f = 0.0;
    TypePtr type;
};

struct InterpResult {
    InterpValue ret;
    std::map<std::string, InterpValue> globals;  // scalar globals after the call
    uint64_t steps = 0;
    std::vector<std::string> call_log;  // callee names in call order
};

struct InterpOptions {
    uint64_t max_steps = 1000000;
};

// Runs ast.functions[name] with scalar arguments. Throws CompileError
// (kind Harness) on step-budget exhaustion or unsupported constructs
// (goto is not supported here).
InterpResult interpret(const Ast& ast, const std::string& fn_name,
                       const std::vector<InterpValue>& args,
                       const InterpOptions& opts = {});

InterpValue make_int_value(TypeKind k, int64_t v);
InterpValue make_float_value(TypeKind k, double v);

}  // namespace blockcc::testsupport
