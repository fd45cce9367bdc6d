#include <doctest.h>

#include "blockcc/composability.hpp"

#include <fstream>
#include <sstream>

#include "blockcc/diag.hpp"
#include "blockcc/parser.hpp"
#include "blockcc/pipeline.hpp"
#include "blockcc/sema.hpp"
#include "blockcc/splitter.hpp"
#include "support/interpreter.hpp"
#include "support/refcompile.hpp"

using namespace blockcc;
using namespace blockcc::testsupport;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    REQUIRE_MESSAGE(in.good(), "cannot open " << path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

InterpValue interp_arg(const TypedValue& v) {
    if (value_is_float(v)) return make_float_value(v.type->kind, v.f);
    return make_int_value(v.type->kind, v.i);
}

}  // namespace

TEST_SUITE_BEGIN("composability");

TEST_CASE("generator is deterministic per seed") {
    CHECK(gen_subset_program(3, 20) == gen_subset_program(3, 20));
    CHECK(gen_subset_program(3, 20) != gen_subset_program(4, 20));
}

TEST_CASE("seed 0 budget 10 matches the golden snapshot") {
    std::string golden = read_file(std::string(BLOCKCC_TEST_DATA) + "/gen_seed0.c");
    CHECK(gen_subset_program(0, 10) == golden);
}

TEST_CASE("generated programs stay inside the subset and are goto-free") {
    for (uint64_t seed = 1; seed <= 40; ++seed) {
        CAPTURE(seed);
        std::string src = gen_subset_program(seed, 12 + int(seed % 5) * 9);
        Ast ast = parse_and_analyze(src);
        REQUIRE(ast.functions.size() == 1);
        CHECK(ast.functions[0].name == gen_fn_name());
        ComposabilityVerdict v = check_composability(ast.functions[0]);
        CHECK(v.composable);
        CHECK(v.blocking_constructs.empty());
    }
}

TEST_CASE("generated programs terminate within the interpreter step budget") {
    for (uint64_t seed = 1; seed <= 25; ++seed) {
        CAPTURE(seed);
        std::string src = gen_subset_program(seed, 30);
        Ast ast = parse_and_analyze(src);
        DriverSpec spec = driver_spec_for(ast, gen_fn_name());
        for (const auto& t : gen_test_cases(seed, spec, 3)) {
            std::vector<InterpValue> args;
            for (const auto& a : t.args) args.push_back(interp_arg(a));
            InterpResult r = interpret(ast, gen_fn_name(), args);
            CHECK(r.steps < 1000000);
        }
    }
}

TEST_CASE("generated programs pass the lego pipeline against the system oracle") {
    PipelineConfig cfg;
    cfg.mode = TranslateMode::LegoPart;
    cfg.split_threshold = 1;  // low enough that every control structure splits
    auto backend = make_ref_backend();
    for (uint64_t seed : {11u, 22u, 33u, 44u, 55u, 66u}) {
        CAPTURE(seed);
        std::string src = gen_subset_program(seed, 35);
        Ast ast = parse_and_analyze(src);
        DriverSpec spec = driver_spec_for(ast, gen_fn_name());
        std::vector<TestCase> tests =
            capture_expected(src, spec, gen_test_cases(seed, spec, 5));
        PipelineResult r = pipeline_compile(src, gen_fn_name(), tests, cfg, *backend);
        CHECK_MESSAGE(r.pass, r.last_report.diagnostics);
    }
}

TEST_CASE("concatenated bodies remain composable and correct") {
    PipelineConfig cfg;
    cfg.mode = TranslateMode::LegoPart;
    cfg.split_threshold = 1;
    auto backend = make_ref_backend();
    std::string src = gen_concat_program(5, 9, 18);
    Ast ast = parse_and_analyze(src);
    CHECK(check_composability(ast.functions[0]).composable);
    DriverSpec spec = driver_spec_for(ast, gen_fn_name());
    std::vector<TestCase> tests = capture_expected(src, spec, gen_test_cases(59, spec, 5));
    PipelineResult r = pipeline_compile(src, gen_fn_name(), tests, cfg, *backend);
    CHECK_MESSAGE(r.pass, r.last_report.diagnostics);
}

TEST_CASE("basic statement pairs compose under translation") {
    std::string why;
    bool ok = theorem_check_basic_statements(
        {{"a = b + 3;", "b = a - 1;"}, {";", ";"}}, &why);
    CHECK_MESSAGE(ok, why);
}

TEST_CASE("random basic statement pairs compose under translation") {
    std::string why;
    auto pairs = random_basic_statement_pairs(99, 25);
    REQUIRE(pairs.size() == 25);
    CHECK_MESSAGE(theorem_check_basic_statements(pairs, &why), why);
}

TEST_CASE("the five control structures compose under split and rebuild") {
    std::string why;
    auto fixtures = control_structure_fixtures();
    REQUIRE(fixtures.size() >= 7);
    CHECK_MESSAGE(theorem_check_control_structures(fixtures, &why), why);
}

TEST_CASE("inner break targets the inner loop's end label") {
    Ast ast = parse_and_analyze(control_structure_fixtures()[5]);
    const FunctionDef& fn = ast.functions[0];
    auto parts = split_parts(fn, SplitConfig{}, always_split_policy());
    const ControlPart* brk = nullptr;
    for (const auto& p : parts)
        if (p.kind == PartKind::SourceBlock && p.payload.find("break") != std::string::npos)
            brk = &p;
    REQUIRE(brk != nullptr);
    REQUIRE(brk->break_stack.size() == 2);
    CHECK(brk->break_stack[0] != brk->break_stack[1]);
    CHECK(brk->break_stack[1].find("end") != std::string::npos);
    CHECK(brk->loop_depth == 2);
}

TEST_CASE("seed manifest round-trips") {
    std::vector<SeedCase> corpus = default_seed_corpus(10);
    std::string text = serialize_seed_manifest(corpus);
    std::vector<SeedCase> back = parse_seed_manifest(text);
    REQUIRE(back.size() == corpus.size());
    for (size_t i = 0; i < corpus.size(); ++i) {
        CHECK(back[i].seed == corpus[i].seed);
        CHECK(back[i].budget == corpus[i].budget);
        CHECK(back[i].expected_pass == corpus[i].expected_pass);
    }
    CHECK(parse_seed_manifest("# only a comment\n\n").empty());
    CHECK_THROWS_AS(parse_seed_manifest("12 nonsense\n"), CompileError);
}

TEST_SUITE_END();
