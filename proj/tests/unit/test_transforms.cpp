#include <doctest.h>

#include <map>
#include <random>

#include "blockcc/features.hpp"
#include "blockcc/parser.hpp"
#include "blockcc/printer.hpp"
#include "blockcc/sema.hpp"
#include "blockcc/transforms.hpp"
#include "support/interpreter.hpp"

using namespace blockcc;
using namespace blockcc::testsupport;

namespace {

Ast with_fn(const Ast& base, const FunctionDef& fn) {
    Ast out = clone_ast(base);
    for (auto& f : out.functions)
        if (f.name == fn.name) f = clone_function(fn);
    return out;
}

void collect_stmt_kinds(const Stmt& s, std::map<StmtKind, int>& counts) {
    counts[s.kind]++;
    for (const auto& c : s.body) collect_stmt_kinds(*c, counts);
    if (s.then_branch) collect_stmt_kinds(*s.then_branch, counts);
    if (s.else_branch) collect_stmt_kinds(*s.else_branch, counts);
    if (s.loop_body) collect_stmt_kinds(*s.loop_body, counts);
    if (s.for_init) collect_stmt_kinds(*s.for_init, counts);
    if (s.for_incr) collect_stmt_kinds(*s.for_incr, counts);
    for (const auto& c : s.cases)
        for (const auto& cs : c.body) collect_stmt_kinds(*cs, counts);
}

void max_expr_ops(const Expr& e, int& worst) {
    worst = std::max(worst, operator_node_count(e));
}

void walk_exprs(const Stmt& s, int& worst) {
    if (s.lhs) max_expr_ops(*s.lhs, worst);
    if (s.rhs) max_expr_ops(*s.rhs, worst);
    if (s.expr) max_expr_ops(*s.expr, worst);
    if (s.decl_init) max_expr_ops(*s.decl_init, worst);
    for (const auto& c : s.body) walk_exprs(*c, worst);
    if (s.then_branch) walk_exprs(*s.then_branch, worst);
    if (s.else_branch) walk_exprs(*s.else_branch, worst);
    if (s.loop_body) walk_exprs(*s.loop_body, worst);
    if (s.for_init) walk_exprs(*s.for_init, worst);
    if (s.for_incr) walk_exprs(*s.for_incr, worst);
    for (const auto& c : s.cases)
        for (const auto& cs : c.body) walk_exprs(*cs, worst);
}

}  // namespace

TEST_CASE("rename suffixes every declaration") {
    Ast ast = parse_source("int f(int a){int x; x = a + 1; return x;}");
    auto [renamed, map] = rename_variables(ast.functions[0]);
    CHECK(renamed.params[0].name == "a__1");
    CHECK(renamed.body->body[0]->decl_name == "x__1");
    CHECK(renamed.body->body[1]->lhs->name == "x__1");
    CHECK(renamed.body->body[1]->rhs->a->name == "a__1");
    REQUIRE(map.entries.size() == 2);
    CHECK(map.entries[0].original == "a");
    CHECK(map.entries[0].fresh == "a__1");
    CHECK(map.entries[0].scope_path == "0");
}

TEST_CASE("rename resolves shadowing to the innermost declaration") {
    Ast ast = parse_source(
        "int f(){int x = 0; { int x = 0; x = 1; } x = 2; return x;}");
    auto [renamed, map] = rename_variables(ast.functions[0]);
    const auto& body = renamed.body->body;
    CHECK(body[0]->decl_name == "x__1");
    REQUIRE(body[1]->kind == StmtKind::Block);
    CHECK(body[1]->body[0]->decl_name == "x__2");
    CHECK(body[1]->body[1]->lhs->name == "x__2");
    CHECK(body[2]->lhs->name == "x__1");

    REQUIRE(map.entries.size() == 2);
    CHECK(map.entries[0].scope_path == "0");
    CHECK(map.entries[1].scope_path == "0/1");
    CHECK(map.entries[1].fresh == "x__2");

    // Fresh names are unique, statement-kind multiset is unchanged.
    std::map<StmtKind, int> before, after;
    collect_stmt_kinds(*ast.functions[0].body, before);
    collect_stmt_kinds(*renamed.body, after);
    CHECK(before == after);
}

TEST_CASE("rename leaves globals and call targets alone") {
    Ast ast = parse_source(
        "int total = 0;\n"
        "int bump(int v){return v + 1;}\n"
        "int f(int bump__x){total = bump(bump__x); return total;}");
    auto [renamed, map] = rename_variables(ast.functions[1]);
    CHECK(renamed.body->body[0]->lhs->name == "total");
    CHECK(renamed.body->body[0]->rhs->name == "bump");
    CHECK(renamed.body->body[0]->rhs->args[0]->name == "bump__x__1");
}

TEST_CASE("for loops scope their init declaration") {
    Ast ast = parse_source(
        "int f(){int i = 9; int s = 0; for (int i = 0; i < 3; i++){s = s + i;} return s + i;}");
    auto [renamed, map] = rename_variables(ast.functions[0]);
    const auto& body = renamed.body->body;
    CHECK(body[0]->decl_name == "i__1");
    CHECK(body[2]->for_init->decl_name == "i__2");
    CHECK(body[2]->expr->a->name == "i__2");
    CHECK(body[2]->loop_body->body[0]->rhs->b->name == "i__2");
    CHECK(body[3]->expr->b->name == "i__1");
}

TEST_CASE("renamed function is behaviorally equivalent") {
    Ast ast = parse_source(
        "int f(int n){int x = 0; { int x = 5; x = x + n; if (x > 6) { x = x * 2; } } x = x + n; "
        "return x;}");
    auto [renamed, map] = rename_variables(ast.functions[0]);

    std::vector<TestCase> tests;
    for (int n : {0, 1, 2, -3, 100}) {
        TestCase tc;
        tc.name = "n" + std::to_string(n);
        tc.args = {make_typed_int(TypeKind::Int, n)};
        tc.expected_return = make_typed_int(TypeKind::Int, 0);  // differential, value unused
        tests.push_back(std::move(tc));
    }
    CHECK(verify_rename_equivalence(ast.functions[0], renamed, tests));

    // Mis-bound rename: retarget the inner block's assignment to the outer x.
    Ast bad_ast = parse_source(
        "int f(int n__1){int x__1 = 0; { int x__2 = 5; x__1 = x__2 + n__1; if (x__1 > 6) { x__1 = "
        "x__1 * 2; } } x__1 = x__1 + n__1; return x__1;}");
    CHECK(!verify_rename_equivalence(ast.functions[0], bad_ast.functions[0], tests));
}

TEST_CASE("decompose leaves simple statements alone") {
    Ast ast = parse_source("int f(int a, int b){int x; x = a + b; return x;}");
    analyze_module(ast);
    FunctionDef out = decompose_complex_expressions(ast.functions[0], 4);
    CHECK(print_function(out) == print_function(ast.functions[0]));
}

TEST_CASE("decompose splits a wide arithmetic expression") {
    Ast ast = parse_source(
        "int f(int a, int b, int c, int d, int e, int q, int g){int x; x = ((a*b)+(c*d))-((e/q)+g); "
        "return x;}");
    analyze_module(ast);
    FunctionDef out = decompose_complex_expressions(ast.functions[0], 2);

    int worst = 0;
    walk_exprs(*out.body, worst);
    CHECK(worst <= 2);

    // Temporaries carry the sub-expression type.
    int temps = 0;
    for (const auto& s : out.body->body)
        if (s->kind == StmtKind::Decl && s->decl_name.rfind("__t", 0) == 0) {
            temps++;
            CHECK(s->decl_type->kind == TypeKind::Int);
        }
    CHECK(temps >= 2);

    // Behavior is unchanged over random inputs.
    std::mt19937_64 rng(7);
    Ast decomposed_ast = with_fn(ast, out);
    for (int round = 0; round < 100; round++) {
        std::vector<InterpValue> args;
        for (int i = 0; i < 7; i++) {
            int64_t v = int64_t(rng() % 2001) - 1000;
            if (i == 5 && v == 0) v = 3;  // q divides
            args.push_back(make_int_value(TypeKind::Int, v));
        }
        auto r1 = interpret(ast, "f", args);
        auto r2 = interpret(decomposed_ast, "f", args);
        REQUIRE(r1.ret.i == r2.ret.i);
    }
}

TEST_CASE("decompose keeps call order left to right") {
    Ast ast = parse_source(
        "int calls = 0;\n"
        "int fa(){calls = calls * 10 + 1; return 7;}\n"
        "int fb(){calls = calls * 10 + 2; return 9;}\n"
        "int f(){int x; x = fa() + fb(); return calls;}");
    analyze_module(ast);
    FunctionDef out = decompose_complex_expressions(ast.functions[2], 2);
    Ast decomposed_ast = with_fn(ast, out);

    auto r1 = interpret(ast, "f", {});
    auto r2 = interpret(decomposed_ast, "f", {});
    CHECK(r1.ret.i == 12);
    CHECK(r2.ret.i == 12);
    REQUIRE(r2.call_log.size() == 2);
    CHECK(r2.call_log[0] == "fa");
    CHECK(r2.call_log[1] == "fb");

    // The split form really did hoist both calls.
    CHECK(out.body->body.size() > ast.functions[2].body->body.size());
}

TEST_CASE("decompose respects float typing") {
    Ast ast = parse_source(
        "double f(double a, double b, int c, int d){double x; x = (a*b+c)*(b-a)+(c*d); return x;}");
    analyze_module(ast);
    FunctionDef out = decompose_complex_expressions(ast.functions[0], 2);

    bool saw_double = false, saw_int = false;
    for (const auto& s : out.body->body)
        if (s->kind == StmtKind::Decl && s->decl_name.rfind("__t", 0) == 0) {
            if (s->decl_type->kind == TypeKind::Double) saw_double = true;
            if (s->decl_type->kind == TypeKind::Int) saw_int = true;
        }
    CHECK(saw_double);
    CHECK(saw_int);

    Ast decomposed_ast = with_fn(ast, out);
    std::mt19937_64 rng(11);
    for (int round = 0; round < 100; round++) {
        std::vector<InterpValue> args = {
            make_float_value(TypeKind::Double, double(int64_t(rng() % 1000)) / 8),
            make_float_value(TypeKind::Double, double(int64_t(rng() % 1000)) / 16),
            make_int_value(TypeKind::Int, int64_t(rng() % 100)),
            make_int_value(TypeKind::Int, int64_t(rng() % 100)),
        };
        auto r1 = interpret(ast, "f", args);
        auto r2 = interpret(decomposed_ast, "f", args);
        REQUIRE(r1.ret.f == r2.ret.f);
    }
}

TEST_CASE("decompose leaves loop headers alone") {
    Ast ast = parse_source(
        "int f(int n){int s = 0; int i; for (i = 0; i < n*n*n*n*n*n; i++){s = s + 1;} "
        "while (s > n*n*n*n*n*n/2) {s = s - 1;} return s;}");
    analyze_module(ast);
    FunctionDef out = decompose_complex_expressions(ast.functions[0], 2);
    const auto& body = out.body->body;
    // No temporaries introduced: both offending expressions sit in loop headers.
    for (const auto& s : body) CHECK(s->decl_name.rfind("__t", 0) != 0);
    Ast decomposed_ast = with_fn(ast, out);
    auto r1 = interpret(ast, "f", {make_int_value(TypeKind::Int, 2)});
    auto r2 = interpret(decomposed_ast, "f", {make_int_value(TypeKind::Int, 2)});
    CHECK(r1.ret.i == r2.ret.i);
}
