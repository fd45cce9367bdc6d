#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "blockcc/verify.hpp"

namespace blockcc {

/// Deterministic-from-seed random program in the supported subset. The module
/// has a handful of initialized scalar globals and one function `gen_fn`
/// taking two scalar parameters and returning long. No goto, every variable
/// initialized before use, loops bounded by dedicated counters, shift counts
/// masked, divisors nonzero constants, no float-to-int narrowing: the program
/// has one defined behavior and terminates.
std::string gen_subset_program(uint64_t seed, int size_budget);

/// Two generated bodies concatenated into a single `gen_fn`, sharing the
/// first seed's globals. Exercises sequential composition of composable
/// blocks.
std::string gen_concat_program(uint64_t seed_a, uint64_t seed_b, int size_budget);

/// Name of the generated function.
std::string gen_fn_name();

/// Deterministic argument tuples for a generated program's signature.
std::vector<TestCase> gen_test_cases(uint64_t seed, const DriverSpec& spec, int n_cases);

/// Runs the system-compiler build of the source over the cases and copies
/// the observed return values and global states into the expectations.
/// Throws OracleUnavailable when the oracle build crashes or hangs.
std::vector<TestCase> capture_oracle_expected(const std::string& c_source,
                                              const DriverSpec& spec,
                                              std::vector<TestCase> tests);

struct SeedCase {
    uint64_t seed = 0;
    int budget = 0;
    bool expected_pass = true;
};

/// Built-in corpus: seeds 1..count with budgets cycling over small/medium/large.
std::vector<SeedCase> default_seed_corpus(int count);

/// Manifest format: one `seed budget expected` row per line; `#` comments.
std::vector<SeedCase> parse_seed_manifest(const std::string& text);
std::string serialize_seed_manifest(const std::vector<SeedCase>& cases);

/// Checks T(s1 . s2) == T(s1) ++ T(s2) under the reference backend: the two
/// statements (over long parameters `a` and `b`) are translated once as a
/// whole function and once as independent parts rebuilt by concatenation,
/// then both modules run the same input grid. Returns false on the first
/// behavioral difference, with the mismatch described in `why`.
bool theorem_check_basic_statements(
    const std::vector<std::pair<std::string, std::string>>& pairs,
    std::string* why = nullptr);

/// Deterministic assignment-statement pairs over `a` and `b` for the check
/// above.
std::vector<std::pair<std::string, std::string>> random_basic_statement_pairs(
    uint64_t seed, int count);

/// Each fixture is a full function whose body is one control structure.
/// Split with an always-split policy, translate parts independently, rebuild,
/// and compare behavior against the whole-function reference translation.
bool theorem_check_control_structures(const std::vector<std::string>& fixtures,
                                      std::string* why = nullptr);

/// The five structure kinds plus fall-through and nested break/continue
/// fixtures.
std::vector<std::string> control_structure_fixtures();

}  // namespace blockcc
