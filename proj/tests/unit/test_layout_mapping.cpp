#include <doctest.h>

#include "blockcc/layout.hpp"
#include "blockcc/parser.hpp"
#include "blockcc/sema.hpp"
#include "blockcc/symtab.hpp"

using namespace blockcc;

TEST_CASE("builtin scalar layouts") {
    CHECK(compute_layout(make_scalar(TypeKind::Char)).size == 1);
    CHECK(compute_layout(make_scalar(TypeKind::Char)).align == 1);
    CHECK(compute_layout(make_scalar(TypeKind::Short)).size == 2);
    CHECK(compute_layout(make_scalar(TypeKind::Int)).size == 4);
    CHECK(compute_layout(make_scalar(TypeKind::Long)).size == 8);
    CHECK(compute_layout(make_scalar(TypeKind::Float)).size == 4);
    CHECK(compute_layout(make_scalar(TypeKind::Double)).size == 8);
    CHECK(compute_layout(make_pointer(make_scalar(TypeKind::Char))).size == 8);
    CHECK(compute_layout(make_pointer(make_scalar(TypeKind::Char))).align == 8);
}

TEST_CASE("struct char+int is 8 bytes with int at 4") {
    TypePtr t = make_record(false, "s",
                            {{"c", make_scalar(TypeKind::Char)},
                             {"i", make_scalar(TypeKind::Int)}});
    TypeLayout l = compute_layout(t);
    CHECK(l.size == 8);
    CHECK(l.align == 4);
    REQUIRE(l.members.size() == 2);
    CHECK(l.members[0].offset == 0);
    CHECK(l.members[1].offset == 4);
}

TEST_CASE("union char[3] vs long") {
    TypePtr t = make_record(true, "u",
                            {{"c", make_array(make_scalar(TypeKind::Char), 3)},
                             {"l", make_scalar(TypeKind::Long)}});
    TypeLayout l = compute_layout(t);
    CHECK(l.size == 8);
    CHECK(l.align == 8);
    CHECK(l.members[0].offset == 0);
    CHECK(l.members[1].offset == 0);
}

TEST_CASE("array layout multiplies") {
    TypeLayout l = compute_layout(make_array(make_scalar(TypeKind::Double), 3));
    CHECK(l.size == 24);
    CHECK(l.align == 8);
    CHECK(l.count == 3);
}

TEST_CASE("recursive by-value record is rejected") {
    auto rec = std::make_shared<Type>();
    rec->kind = TypeKind::Record;
    rec->tag = "n";
    rec->members.push_back({"v", make_scalar(TypeKind::Int)});
    rec->members.push_back({"self", rec});
    try {
        compute_layout(rec);
        FAIL("expected RecursiveType");
    } catch (const CompileError& e) {
        CHECK(e.kind() == ErrorKind::RecursiveType);
    }
}

TEST_CASE("self-referential pointer member is fine") {
    Ast ast = parse_source(
        "struct node {int v; struct node *next;};\n"
        "int f(struct node *n){return n->v;}");
    analyze_module(ast);
    TypeLayout l = compute_layout(ast.records[0].type);
    CHECK(l.size == 16);
    CHECK(l.members[1].offset == 8);
}

TEST_CASE("layout oracle agrees on a handful of fixtures") {
    std::vector<LayoutSubject> subjects;
    auto add = [&](const std::string& decls, TypePtr t) {
        LayoutSubject s;
        s.decls = decls;
        s.type = t;
        s.layout = compute_layout(t);
        subjects.push_back(std::move(s));
    };
    add("", make_scalar(TypeKind::Int));
    add("", make_array(make_scalar(TypeKind::Double), 3));
    add("struct sx { char c; int i; long l; };",
        make_record(false, "sx",
                    {{"c", make_scalar(TypeKind::Char)},
                     {"i", make_scalar(TypeKind::Int)},
                     {"l", make_scalar(TypeKind::Long)}}));
    add("union ux { char c[3]; long l; };",
        make_record(true, "ux",
                    {{"c", make_array(make_scalar(TypeKind::Char), 3)},
                     {"l", make_scalar(TypeKind::Long)}}));
    SystemCompilerOracle oracle;
    auto mismatches = verify_layout_against_oracle(subjects, oracle);
    for (const auto& m : mismatches)
        MESSAGE(m.key << " computed=" << m.computed << " oracle=" << m.oracle);
    CHECK(mismatches.empty());
}

TEST_CASE("sabotaged layout is caught by the oracle") {
    std::vector<LayoutSubject> subjects;
    LayoutSubject s;
    s.decls = "struct sb { char c; int i; };";
    s.type = make_record(false, "sb",
                         {{"c", make_scalar(TypeKind::Char)},
                          {"i", make_scalar(TypeKind::Int)}});
    s.layout = compute_layout(s.type);
    s.layout.members[1].offset = 2;  // forced wrong
    subjects.push_back(std::move(s));
    SystemCompilerOracle oracle;
    auto mismatches = verify_layout_against_oracle(subjects, oracle);
    REQUIRE(mismatches.size() == 1);
    CHECK(mismatches[0].key == "offset:struct sb.i");
    CHECK(mismatches[0].computed == 2);
    CHECK(mismatches[0].oracle == 4);
}

TEST_CASE("frame allocation follows declaration order") {
    Ast ast = parse_source("int f(){int a; double d; a = 1; d = 2.0; return a;}");
    analyze_module(ast);
    const auto& fn = ast.functions[0];
    SymbolTable table = allocate_frame(fn, collect_local_layouts(fn));
    REQUIRE(table.locals.size() == 2);
    CHECK(table.locals[0].name == "a");
    CHECK(table.locals[0].offset == -4);
    CHECK(table.locals[1].name == "d");
    CHECK(table.locals[1].offset == -16);
    CHECK(table.frame_size == 16);
    CHECK(table.saved_regs_note.empty());
    CHECK(check_no_overlap(table).empty());
}

TEST_CASE("char buffer plus int frame") {
    Ast ast = parse_source("int f(){char buf[13]; int n; n = 0; buf[0] = 1; return n;}");
    analyze_module(ast);
    const auto& fn = ast.functions[0];
    SymbolTable table = allocate_frame(fn, collect_local_layouts(fn));
    CHECK(table.locals[0].offset == -13);
    CHECK(table.locals[1].offset == -20);
    CHECK(table.frame_size == 32);
    CHECK(check_no_overlap(table).empty());
}

TEST_CASE("no locals means empty frame") {
    Ast ast = parse_source("int f(){return 3;}");
    analyze_module(ast);
    const auto& fn = ast.functions[0];
    SymbolTable table = allocate_frame(fn, collect_local_layouts(fn));
    CHECK(table.locals.empty());
    CHECK(table.frame_size == 0);
}

TEST_CASE("parameters get slots and spill registers") {
    Ast ast = parse_source("double f(int a, double x, long b){return a + x + b;}");
    analyze_module(ast);
    const auto& fn = ast.functions[0];
    SymbolTable table = allocate_frame(fn, collect_local_layouts(fn));
    REQUIRE(table.params.size() == 3);
    CHECK(table.params[0].is_sse == false);
    CHECK(table.params[0].reg_index == 0);
    CHECK(table.params[1].is_sse == true);
    CHECK(table.params[1].reg_index == 0);
    CHECK(table.params[2].is_sse == false);
    CHECK(table.params[2].reg_index == 1);
    CHECK(table.locals.size() == 3);
    CHECK(check_no_overlap(table).empty());
}

TEST_CASE("calls reserve a scratch save slot") {
    Ast ast = parse_source("int g(){return 1;}\nint f(){return g();}");
    analyze_module(ast);
    const auto& fn = ast.functions[1];
    SymbolTable table = allocate_frame(fn, collect_local_layouts(fn));
    CHECK(table.scratch_save_slot == -8);
    REQUIRE(table.saved_regs_note.size() == 1);
    CHECK(table.saved_regs_note[0] == "rbx");
    CHECK(table.frame_size == 16);
}

TEST_CASE("mutated tables are flagged") {
    SymbolTable table;
    table.fn_name = "f";
    table.frame_size = 16;
    TypeLayout int_layout = compute_layout(make_scalar(TypeKind::Int));
    table.locals.push_back({"a", -8, int_layout});
    table.locals.push_back({"b", -8, int_layout});
    auto violations = check_no_overlap(table);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].kind == Violation::Kind::Overlap);

    SymbolTable mis;
    mis.frame_size = 16;
    mis.locals.push_back({"a", -6, int_layout});
    auto v2 = check_no_overlap(mis);
    REQUIRE(v2.size() == 1);
    CHECK(v2[0].kind == Violation::Kind::Misaligned);

    SymbolTable oob;
    oob.frame_size = 16;
    oob.locals.push_back({"a", -20, int_layout});
    auto v3 = check_no_overlap(oob);
    REQUIRE(v3.size() == 1);
    CHECK(v3[0].kind == Violation::Kind::OutOfBounds);
}

TEST_CASE("global plans") {
    Ast ast = parse_source("int g = 7;\ndouble arr[3];\nint f(){return g;}");
    analyze_module(ast);
    auto plans = map_globals(ast.globals);
    REQUIRE(plans.size() == 2);
    CHECK(plans[0].section == ".data");
    CHECK(plans[0].align == 4);
    CHECK(plans[0].init_directive == ".long 7");
    CHECK(plans[1].section == ".bss");
    CHECK(plans[1].layout.size == 24);
    CHECK(plans[1].align == 8);

    std::vector<GlobalDecl> dup;
    dup.push_back({"g", make_scalar(TypeKind::Int), nullptr, {}});
    dup.push_back({"g", make_scalar(TypeKind::Int), nullptr, {}});
    CHECK_THROWS_AS(map_globals(dup), CompileError);
}

TEST_CASE("sema catches basic violations") {
    auto expect_throw = [](const char* src) {
        Ast ast = parse_source(src);
        CHECK_THROWS_AS(analyze_module(ast), CompileError);
    };
    expect_throw("int f(){return x;}");
    expect_throw("int f(){int a; int a; return 0;}");
    expect_throw("int f(){break; return 0;}");
    expect_throw("int f(){goto missing; return 0;}");
    expect_throw("int f(int a){return a(1);}");
    expect_throw("struct s {int x;};\nint f(struct s p){return 0;}");
    expect_throw("void f(){return 1;}");

    Ast good = parse_source(
        "struct pt {int x; int y;};\n"
        "int helper(int v){return v + 1;}\n"
        "int f(struct pt *p, int n){int i; int s = 0; for (i = 0; i < n; i++){s += "
        "helper(i);} p->x = s; return s;}");
    analyze_module(good);
    const auto& fn = good.functions[1];
    CHECK(fn.body->body.back()->expr->type->kind == TypeKind::Int);
}
