#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "blockcc/ast.hpp"
#include "blockcc/proc.hpp"

namespace blockcc {

/// A scalar value tagged with its static C type. Integer payloads are kept in
/// canonical signed 64-bit form (truncated to the type's width and extended
/// per its signedness).
struct TypedValue {
    TypePtr type;
    int64_t i = 0;
    double f = 0.0;
};

TypedValue make_typed_int(TypeKind k, int64_t v);
TypedValue make_typed_float(TypeKind k, double v);
bool value_is_float(const TypedValue& v);
std::string format_typed_value(const TypedValue& v);

struct Comparison {
    bool exact = true;
    double epsilon = 0.0;  // relative, when !exact
};

/// |a - b| <= eps * max(1, |a|, |b|); NaN matches NaN.
bool floats_close(double a, double b, double eps);

struct TestCase {
    std::string name;
    std::vector<TypedValue> args;
    std::optional<TypedValue> expected_return;
    std::optional<std::string> expected_stdout;
    Comparison comparison;
    // Post-call expected values of scalar globals, filled by differential runs.
    std::vector<std::pair<std::string, TypedValue>> expected_globals;
};

enum class Stage { Assemble, Link, Run, Compare };
enum class ErrorClass { None, Semantic, Runtime, Behavioral };

const char* stage_name(Stage s);
const char* error_class_name(ErrorClass c);

struct FailedCase {
    std::string name;
    std::string detail;
};

struct VerificationReport {
    Stage stage = Stage::Compare;
    bool pass = false;
    ErrorClass error_class = ErrorClass::None;
    std::string diagnostics;
    std::vector<FailedCase> failed_cases;
};

struct ErrorFeedback {
    ErrorClass error_class = ErrorClass::None;
    std::string diagnostics;
    std::string excerpt;
    int attempt_number = 1;
};

/// Caps diagnostics text keeping the tail, which is where assemblers and the
/// driver put the decisive lines.
std::string cap_tail(const std::string& text, size_t limit = 4000);

/// Signature info the driver needs about the function under test.
struct DriverSpec {
    std::string fn_name;
    std::vector<TypePtr> param_types;
    TypePtr return_type;
    // Scalar arithmetic globals dumped after every case, in declaration order.
    std::vector<std::pair<std::string, TypePtr>> globals;
};

/// Builds the spec from a parsed module; rejects functions whose signature
/// cannot be driven (pointer/array/record parameters or return).
DriverSpec driver_spec_for(const Ast& ast, const std::string& fn_name);

/// C source of a main() that runs every case (or one, by argv index), printing
/// "case <i>" then "ret <value>" and "g <name> <value>" lines per case.
std::string build_driver_source(const DriverSpec& spec, const std::vector<TestCase>& tests);

/// Assembles the module, compiles the driver, links both. Throws
/// CompileError(Semantic) on assembler or linker failure (message prefixed
/// with the failing stage), Harness if the driver itself will not compile.
std::filesystem::path assemble_link(const std::string& module_text, const std::string& driver_c,
                                    const TempDir& dir);

/// Compiles C translation units with the system compiler and links them.
/// Throws CompileError(Harness) on any failure.
std::filesystem::path compile_c_sources(const std::vector<std::pair<std::string, std::string>>& units,
                                        const TempDir& dir);

/// Runs the driver executable in "all" mode and checks every case.
VerificationReport run_tests(const std::filesystem::path& executable,
                             const std::vector<TestCase>& tests, int timeout_secs = 10);

/// assemble_link + run_tests with failures folded into the report instead of
/// thrown (semantic errors become stage=assemble/link reports).
VerificationReport verify_module(const std::string& module_text, const DriverSpec& spec,
                                 const std::vector<TestCase>& tests, int timeout_secs = 10);

ErrorFeedback feedback_from_report(const VerificationReport& report, const std::string& module_text,
                                   int attempt_number);

/// One document per function in a test file.
struct TestDoc {
    std::string fn_name;
    std::vector<TestCase> cases;
};

std::vector<TestDoc> parse_test_file(const std::string& text);
std::string serialize_test_docs(const std::vector<TestDoc>& docs);

}  // namespace blockcc
