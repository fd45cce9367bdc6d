#pragma once

#include <string>
#include <vector>

#include "blockcc/parser.hpp"
#include "blockcc/rebuild.hpp"
#include "blockcc/sema.hpp"
#include "blockcc/symtab.hpp"
#include "blockcc/translation.hpp"
#include "blockcc/verify.hpp"

namespace blockcc::testsupport {

// parse -> canonicalize -> analyze. Local names must be unique per function
// (the pipeline runs the renaming pass first; test sources just avoid
// shadowing).
Ast parse_and_analyze(const std::string& source);

SymbolTable frame_for(const FunctionDef& fn, const std::vector<GlobalPlan>& globals);

// Whole module through the reference backend, one function at a time.
std::string ref_compile_module(const Ast& ast);

// Runs the system-compiler build of `c_source` over the cases and copies the
// observed returns / global states into the expectations.
std::vector<TestCase> capture_expected(const std::string& c_source, const DriverSpec& spec,
                                       std::vector<TestCase> tests);

// System compiler as oracle, reference backend as candidate.
VerificationReport differential_report(const std::string& c_source,
                                       const std::string& fn_name,
                                       std::vector<TestCase> tests);

TypedValue iv(int64_t v, TypeKind k = TypeKind::Int);
TypedValue dv(double v, TypeKind k = TypeKind::Double);
TestCase tcase(std::string name, std::vector<TypedValue> args = {});

}  // namespace blockcc::testsupport
