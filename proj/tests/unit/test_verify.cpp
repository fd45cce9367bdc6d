#include <doctest.h>

#include "blockcc/parser.hpp"
#include "blockcc/verify.hpp"

using namespace blockcc;

namespace {

DriverSpec add2_spec() {
    DriverSpec spec;
    spec.fn_name = "add2";
    spec.param_types = {make_scalar(TypeKind::Int), make_scalar(TypeKind::Int)};
    spec.return_type = make_scalar(TypeKind::Int);
    return spec;
}

std::vector<TestCase> add2_cases() {
    TestCase a;
    a.name = "small";
    a.args = {make_typed_int(TypeKind::Int, 2), make_typed_int(TypeKind::Int, 3)};
    a.expected_return = make_typed_int(TypeKind::Int, 5);
    TestCase b;
    b.name = "negative";
    b.args = {make_typed_int(TypeKind::Int, 10), make_typed_int(TypeKind::Int, -4)};
    b.expected_return = make_typed_int(TypeKind::Int, 6);
    std::vector<TestCase> v;
    v.push_back(std::move(a));
    v.push_back(std::move(b));
    return v;
}

const char* kAdd2Good =
    "    .text\n"
    "    .globl add2\n"
    "    .type add2, @function\n"
    "add2:\n"
    "    movl %edi, %eax\n"
    "    addl %esi, %eax\n"
    "    ret\n";

}  // namespace

TEST_CASE("correct assembly passes its cases") {
    auto report = verify_module(kAdd2Good, add2_spec(), add2_cases());
    CHECK(report.pass);
    CHECK(report.error_class == ErrorClass::None);
    CHECK(report.failed_cases.empty());
}

TEST_CASE("comparing two immediates is a semantic error at assembly") {
    std::string bad =
        "    .text\n"
        "    .globl add2\n"
        "add2:\n"
        "    cmpl $1, $2\n"
        "    ret\n";
    auto report = verify_module(bad, add2_spec(), add2_cases());
    CHECK(!report.pass);
    CHECK(report.stage == Stage::Assemble);
    CHECK(report.error_class == ErrorClass::Semantic);
    CHECK(report.diagnostics.find("assembler:") == 0);
    CHECK(report.diagnostics.find("module.s") != std::string::npos);
}

TEST_CASE("undefined symbol is a semantic error at link") {
    std::string bad =
        "    .text\n"
        "    .globl add2\n"
        "add2:\n"
        "    call missing_helper\n"
        "    ret\n";
    auto report = verify_module(bad, add2_spec(), add2_cases());
    CHECK(!report.pass);
    CHECK(report.stage == Stage::Link);
    CHECK(report.error_class == ErrorClass::Semantic);
    CHECK(report.diagnostics.find("missing_helper") != std::string::npos);
}

TEST_CASE("infinite loop is a runtime error via timeout") {
    std::string spin =
        "    .text\n"
        "    .globl add2\n"
        "add2:\n"
        ".Lspin:\n"
        "    jmp .Lspin\n";
    auto report = verify_module(spin, add2_spec(), add2_cases(), 2);
    CHECK(!report.pass);
    CHECK(report.stage == Stage::Run);
    CHECK(report.error_class == ErrorClass::Runtime);
    CHECK(report.diagnostics.find("timed out") != std::string::npos);
    CHECK(!report.failed_cases.empty());
}

TEST_CASE("crash is a runtime error") {
    std::string crash =
        "    .text\n"
        "    .globl add2\n"
        "add2:\n"
        "    movq $0, %rax\n"
        "    movq (%rax), %rax\n"
        "    ret\n";
    auto report = verify_module(crash, add2_spec(), add2_cases(), 5);
    CHECK(!report.pass);
    CHECK(report.stage == Stage::Run);
    CHECK(report.error_class == ErrorClass::Runtime);
    CHECK(report.diagnostics.find("signal") != std::string::npos);
}

TEST_CASE("off-by-one result is behavioral and lists the cases") {
    std::string off =
        "    .text\n"
        "    .globl add2\n"
        "add2:\n"
        "    movl %edi, %eax\n"
        "    addl %esi, %eax\n"
        "    addl $1, %eax\n"
        "    ret\n";
    auto report = verify_module(off, add2_spec(), add2_cases());
    CHECK(!report.pass);
    CHECK(report.stage == Stage::Compare);
    CHECK(report.error_class == ErrorClass::Behavioral);
    REQUIRE(report.failed_cases.size() == 2);
    CHECK(report.failed_cases[0].name == "small");
    CHECK(report.failed_cases[0].detail.find("got 6") != std::string::npos);
}

TEST_CASE("feedback quotes the offending assembly lines") {
    std::string bad =
        "    .text\n"
        "    .globl add2\n"
        "add2:\n"
        "    cmpl $1, $2\n"
        "    ret\n";
    auto report = verify_module(bad, add2_spec(), add2_cases());
    ErrorFeedback fb = feedback_from_report(report, bad, 1);
    CHECK(fb.error_class == ErrorClass::Semantic);
    CHECK(fb.attempt_number == 1);
    CHECK(fb.excerpt.find("cmpl $1, $2") != std::string::npos);
}

TEST_CASE("driver checks globals and supports floats") {
    Ast ast = parse_source(
        "long total = 0;\n"
        "double scale(double x){total = total + 1; return x * 1.5;}");
    DriverSpec spec = driver_spec_for(ast, "scale");
    REQUIRE(spec.globals.size() == 1);
    CHECK(spec.globals[0].first == "total");

    TestCase tc;
    tc.name = "half";
    tc.args = {make_typed_float(TypeKind::Double, 3.0)};
    tc.expected_return = make_typed_float(TypeKind::Double, 4.5);
    tc.comparison = {false, 1e-9};
    tc.expected_globals = {{"total", make_typed_int(TypeKind::Long, 1)}};

    TempDir dir;
    auto exe = compile_c_sources({{"fn.c", "long total = 0;\n"
                                          "double scale(double x){total = total + 1; return x * 1.5;}\n"},
                                  {"driver.c", build_driver_source(spec, {tc})}},
                                 dir);
    auto report = run_tests(exe, {tc});
    CHECK(report.pass);

    TestCase wrong = tc;
    wrong.expected_globals[0].second = make_typed_int(TypeKind::Long, 2);
    auto report2 = run_tests(exe, {wrong});
    CHECK(!report2.pass);
    CHECK(report2.error_class == ErrorClass::Behavioral);
    REQUIRE(report2.failed_cases.size() == 1);
    CHECK(report2.failed_cases[0].detail.find("total") != std::string::npos);
}

TEST_CASE("float tolerance is relative") {
    CHECK(floats_close(1.0, 1.0 + 1e-12, 1e-9));
    CHECK(!floats_close(1.0, 1.0 + 1e-6, 1e-9));
    CHECK(floats_close(1e20, 1e20 * (1 + 1e-10), 1e-9));
    CHECK(floats_close(0.0, 1e-12, 1e-9));
    CHECK(!floats_close(0.0, 1e-6, 1e-9));
}

TEST_CASE("test files round-trip") {
    std::string text =
        "# sample\n"
        "function f\n"
        "case zero\n"
        "arg int 0\n"
        "arg double 1.5\n"
        "ret double 3.25\n"
        "global total long 7\n"
        "case big\n"
        "arg int -12\n"
        "arg double 0.5\n"
        "ret double -6\n"
        "tol 1e-6\n";
    auto docs = parse_test_file(text);
    REQUIRE(docs.size() == 1);
    CHECK(docs[0].fn_name == "f");
    REQUIRE(docs[0].cases.size() == 2);
    CHECK(docs[0].cases[0].args[0].i == 0);
    CHECK(docs[0].cases[0].args[1].f == 1.5);
    CHECK(docs[0].cases[0].comparison.exact == false);
    CHECK(docs[0].cases[0].comparison.epsilon == 1e-9);
    CHECK(docs[0].cases[1].comparison.epsilon == 1e-6);
    REQUIRE(docs[0].cases[0].expected_globals.size() == 1);

    auto docs2 = parse_test_file(serialize_test_docs(docs));
    REQUIRE(docs2.size() == 1);
    REQUIRE(docs2[0].cases.size() == 2);
    CHECK(docs2[0].cases[0].expected_return->f == 3.25);
    CHECK(docs2[0].cases[1].comparison.epsilon == 1e-6);
    CHECK(docs2[0].cases[0].expected_globals[0].second.i == 7);

    CHECK_THROWS_AS(parse_test_file("function f\ncase empty\narg int 1\n"), CompileError);
}

TEST_CASE("cap_tail keeps the end") {
    std::string longtext(5000, 'x');
    longtext += "THE END";
    std::string capped = cap_tail(longtext, 100);
    CHECK(capped.size() <= 103);
    CHECK(capped.find("THE END") != std::string::npos);
    CHECK(capped.rfind("...", 0) == 0);
}
