#include "blockcc/splitter.hpp"

#include <random>
#include <set>

#include "blockcc/parser.hpp"
#include "blockcc/printer.hpp"
#include "doctest.h"

using namespace blockcc;

namespace {

const FunctionDef& fn_of(const Ast& ast, const char* name = "f") {
    const FunctionDef* fn = find_function(ast, name);
    REQUIRE(fn != nullptr);
    return *fn;
}

std::vector<ControlPart> split_all(const FunctionDef& fn) {
    return split_parts(fn, SplitConfig{}, always_split_policy());
}

const ControlPart* label_part(const std::vector<ControlPart>& parts, const std::string& name) {
    for (const auto& p : parts)
        if (p.kind == PartKind::Label && p.payload == name) return &p;
    return nullptr;
}

// Break/continue statements that belong to the part itself, not to a nested
// loop or switch carried inside the part's payload.
void collect_own_breaks(const Stmt& s, std::vector<const Stmt*>& brks,
                        std::vector<const Stmt*>& conts) {
    switch (s.kind) {
        case StmtKind::Break: brks.push_back(&s); return;
        case StmtKind::Continue: conts.push_back(&s); return;
        case StmtKind::Block:
            for (const auto& c : s.body) collect_own_breaks(*c, brks, conts);
            return;
        case StmtKind::If:
            collect_own_breaks(*s.then_branch, brks, conts);
            if (s.else_branch) collect_own_breaks(*s.else_branch, brks, conts);
            return;
        default:
            return;
    }
}

void check_depth_invariant(const std::vector<ControlPart>& parts) {
    for (const auto& p : parts) {
        if (p.kind != PartKind::SourceBlock) continue;
        std::vector<const Stmt*> brks, conts;
        for (const Stmt* s : p.stmts) collect_own_breaks(*s, brks, conts);
        if (!brks.empty()) {
            REQUIRE(!p.break_stack.empty());
            const ControlPart* target = label_part(parts, p.break_stack.back());
            REQUIRE(target != nullptr);
            CHECK(target->loop_depth == p.loop_depth);
        }
        if (!conts.empty()) {
            REQUIRE(!p.continue_stack.empty());
            bool found = false;
            for (const auto& q : parts) {
                if (q.payload != p.continue_stack.back()) continue;
                if (q.kind == PartKind::Label) {
                    CHECK(q.loop_depth == p.loop_depth);
                    found = true;
                } else if (!q.head_labels.empty() &&
                           q.head_labels[0] == p.continue_stack.back()) {
                    found = true;
                }
            }
            if (!found) {
                for (const auto& q : parts)
                    for (const auto& hl : q.head_labels)
                        if (hl == p.continue_stack.back()) {
                            CHECK(q.loop_depth == p.loop_depth);
                            found = true;
                        }
            }
            CHECK(found);
        }
    }
}

}  // namespace

TEST_CASE("straight-line and nested structured code is composable") {
    Ast a = parse_source("int g; void f(int x){g = x; g = g * 2;}");
    CHECK(check_composability(fn_of(a)).composable);

    Ast b = parse_source(
        "int g; void f(int n){int i; for(i = 0; i < n; i = i + 1){"
        "if(i > 2){g = g + i;}else{while(g < 10){g = g + 1;}}}}");
    ComposabilityVerdict v = check_composability(fn_of(b));
    CHECK(v.composable);
    CHECK(v.blocking_constructs.empty());
}

TEST_CASE("goto blocks composability with a reason") {
    Ast a = parse_source("int g; void f(int x){if(x){goto out;} g = 1; out: g = 2;}");
    ComposabilityVerdict v = check_composability(fn_of(a));
    CHECK(!v.composable);
    REQUIRE(v.blocking_constructs.size() == 1);
    CHECK(v.blocking_constructs[0].second == "goto breaks structured control flow");

    Ast b = parse_source(
        "int g; void f(int x){top: g = 0; while(x){goto top;} if(x){goto top;}}");
    CHECK(check_composability(fn_of(b)).blocking_constructs.size() == 2);
}

TEST_CASE("split_parts refuses non-composable functions") {
    Ast a = parse_source("int g; void f(int x){again: g = g + 1; goto again;}");
    try {
        split_all(fn_of(a));
        FAIL("expected NonComposable");
    } catch (const CompileError& e) {
        CHECK(e.kind() == ErrorKind::NonComposable);
        CHECK(std::string(e.what()).find("goto breaks structured control flow") !=
              std::string::npos);
    }
}

TEST_CASE("tiny function becomes a single source block part") {
    Ast a = parse_source("int g; void f(int x){int y; y = x + 1; g = y * 2;}");
    const FunctionDef& fn = fn_of(a);
    std::vector<ControlPart> parts = split_parts(fn, SplitConfig{}, heuristic_policy({}));
    REQUIRE(parts.size() == 1);
    CHECK(parts[0].kind == PartKind::SourceBlock);
    CHECK(parts[0].role == "keep");
    CHECK(parts[0].id == 0);
    CHECK(parts[0].loop_depth == 0);
    CHECK(parts[0].break_stack.empty());
    CHECK(parts[0].stmts.size() == 3);
    CHECK(verify_split_integrity(fn, parts));
}

TEST_CASE("for loop splits into the eight-part shape") {
    Ast a = parse_source("int s; void f(int n){for(s = 0; s < n; s = s + 1){s = s + 2;}}");
    const FunctionDef& fn = fn_of(a);
    std::vector<ControlPart> parts = split_all(fn);
    REQUIRE(parts.size() == 8);

    CHECK(parts[0].kind == PartKind::SourceBlock);
    CHECK(parts[0].role == "init");
    CHECK(parts[0].payload == "s = 0;\n");

    CHECK(parts[1].kind == PartKind::Label);
    CHECK(parts[1].payload == ".L_f__0_body");

    CHECK(parts[2].kind == PartKind::SourceBlock);
    CHECK(parts[2].role == "cmp");
    CHECK(parts[2].payload == "s < n");
    CHECK(parts[2].cond != nullptr);

    CHECK(parts[3].kind == PartKind::CondJump);
    CHECK(parts[3].payload == ".L_f__0_end");
    CHECK(!parts[3].jump_if_true);

    CHECK(parts[4].kind == PartKind::SourceBlock);
    CHECK(parts[4].role == "keep");
    CHECK(parts[4].payload == "s = s + 2;\n");
    REQUIRE(parts[4].break_stack.size() == 1);
    CHECK(parts[4].break_stack[0] == ".L_f__0_end");
    REQUIRE(parts[4].continue_stack.size() == 1);
    CHECK(parts[4].continue_stack[0] == ".L_f__0_cont");

    CHECK(parts[5].kind == PartKind::SourceBlock);
    CHECK(parts[5].role == "incr");
    CHECK(parts[5].payload == "s = s + 1;\n");
    REQUIRE(parts[5].head_labels.size() == 1);
    CHECK(parts[5].head_labels[0] == ".L_f__0_cont");

    CHECK(parts[6].kind == PartKind::UncondJump);
    CHECK(parts[6].payload == ".L_f__0_body");

    CHECK(parts[7].kind == PartKind::Label);
    CHECK(parts[7].payload == ".L_f__0_end");

    for (size_t i = 0; i < parts.size(); ++i) {
        CHECK(parts[i].id == int(i));
        CHECK(parts[i].loop_depth == 1);
    }
    CHECK(verify_split_integrity(fn, parts));
}

TEST_CASE("if-else splits into the seven-part shape") {
    Ast a = parse_source("int g; void f(int c){if(c < 0){g = 1;}else{g = 2;}}");
    const FunctionDef& fn = fn_of(a);
    std::vector<ControlPart> parts = split_all(fn);
    REQUIRE(parts.size() == 7);
    CHECK(parts[0].role == "cmp");
    CHECK(parts[0].payload == "c < 0");
    CHECK(parts[1].kind == PartKind::CondJump);
    CHECK(parts[1].payload == ".L_f__0_else");
    CHECK(parts[2].payload == "g = 1;\n");
    CHECK(parts[3].kind == PartKind::UncondJump);
    CHECK(parts[3].payload == ".L_f__0_endif");
    CHECK(parts[4].kind == PartKind::Label);
    CHECK(parts[4].payload == ".L_f__0_else");
    CHECK(parts[5].payload == "g = 2;\n");
    CHECK(parts[6].kind == PartKind::Label);
    CHECK(parts[6].payload == ".L_f__0_endif");
    for (const auto& p : parts) CHECK(p.loop_depth == 0);
    CHECK(verify_split_integrity(fn, parts));
}

TEST_CASE("if without else splits into four parts") {
    Ast a = parse_source("int g; void f(int c){if(c){g = 1;}}");
    const FunctionDef& fn = fn_of(a);
    std::vector<ControlPart> parts = split_all(fn);
    REQUIRE(parts.size() == 4);
    CHECK(parts[0].role == "cmp");
    CHECK(parts[1].kind == PartKind::CondJump);
    CHECK(parts[1].payload == ".L_f__0_endif");
    CHECK(parts[2].role == "keep");
    CHECK(parts[3].kind == PartKind::Label);
    CHECK(parts[3].payload == ".L_f__0_endif");
    CHECK(verify_split_integrity(fn, parts));
}

TEST_CASE("while splits into six parts") {
    Ast a = parse_source("int g; void f(int n){while(g < n){g = g + 1;}}");
    const FunctionDef& fn = fn_of(a);
    std::vector<ControlPart> parts = split_all(fn);
    REQUIRE(parts.size() == 6);
    CHECK(parts[0].kind == PartKind::Label);
    CHECK(parts[0].payload == ".L_f__0_body");
    CHECK(parts[1].role == "cmp");
    CHECK(parts[2].kind == PartKind::CondJump);
    CHECK(parts[2].payload == ".L_f__0_end");
    CHECK(parts[3].role == "keep");
    REQUIRE(parts[3].continue_stack.size() == 1);
    CHECK(parts[3].continue_stack[0] == ".L_f__0_body");
    CHECK(parts[4].kind == PartKind::UncondJump);
    CHECK(parts[4].payload == ".L_f__0_body");
    CHECK(parts[5].kind == PartKind::Label);
    CHECK(verify_split_integrity(fn, parts));
}

TEST_CASE("do-while splits into five parts with inverted jump polarity") {
    Ast a = parse_source("int g; void f(int n){do{g = g + 1;}while(g < n);}");
    const FunctionDef& fn = fn_of(a);
    std::vector<ControlPart> parts = split_all(fn);
    REQUIRE(parts.size() == 5);
    CHECK(parts[0].kind == PartKind::Label);
    CHECK(parts[0].payload == ".L_f__0_body");
    CHECK(parts[1].role == "keep");
    CHECK(parts[2].role == "cmp");
    REQUIRE(parts[2].head_labels.size() == 1);
    CHECK(parts[2].head_labels[0] == ".L_f__0_cont");
    CHECK(parts[3].kind == PartKind::CondJump);
    CHECK(parts[3].payload == ".L_f__0_body");
    CHECK(parts[3].jump_if_true);
    CHECK(parts[4].kind == PartKind::Label);
    CHECK(parts[4].payload == ".L_f__0_end");
    CHECK(verify_split_integrity(fn, parts));
}

TEST_CASE("switch splits into dispatch jumps plus labeled bodies") {
    Ast a = parse_source(
        "int g; void f(int c){switch(c){case 1: g = 1; break; case 2: g = 2; break; "
        "default: g = 0;}}");
    const FunctionDef& fn = fn_of(a);
    std::vector<ControlPart> parts = split_all(fn);
    REQUIRE(parts.size() == 11);
    CHECK(parts[0].role == "expr");
    CHECK(parts[0].payload == "c");

    CHECK(parts[1].kind == PartKind::CondJump);
    CHECK(parts[1].payload == ".L_f__0_case0");
    REQUIRE(parts[1].case_value.has_value());
    CHECK(*parts[1].case_value == 1);

    CHECK(parts[2].kind == PartKind::CondJump);
    CHECK(parts[2].payload == ".L_f__0_case1");
    CHECK(*parts[2].case_value == 2);

    CHECK(parts[3].kind == PartKind::UncondJump);
    CHECK(parts[3].payload == ".L_f__0_default");

    CHECK(parts[4].kind == PartKind::Label);
    CHECK(parts[4].payload == ".L_f__0_case0");
    CHECK(parts[5].role == "keep");
    REQUIRE(parts[5].break_stack.size() == 1);
    CHECK(parts[5].break_stack[0] == ".L_f__0_end");
    CHECK(parts[5].continue_stack.empty());

    CHECK(parts[6].payload == ".L_f__0_case1");
    CHECK(parts[8].kind == PartKind::Label);
    CHECK(parts[8].payload == ".L_f__0_default");
    CHECK(parts[9].payload == "g = 0;\n");
    CHECK(parts[10].payload == ".L_f__0_end");
    for (const auto& p : parts) CHECK(p.loop_depth == 0);
    CHECK(verify_split_integrity(fn, parts));
}

TEST_CASE("switch without default dispatches to the end label") {
    Ast a = parse_source("int g; void f(int c){switch(c){case 4: g = 4; break;}}");
    const FunctionDef& fn = fn_of(a);
    std::vector<ControlPart> parts = split_all(fn);
    REQUIRE(parts.size() == 6);
    CHECK(parts[2].kind == PartKind::UncondJump);
    CHECK(parts[2].payload == ".L_f__0_end");
    CHECK(verify_split_integrity(fn, parts));
}

TEST_CASE("heuristic splits only oversized control blocks") {
    SplitConfig cfg;
    cfg.split_threshold = 50;
    CHECK(heuristic_decide({nullptr, 500000, false, 0}, cfg) == SplitDecision::Keep);
    CHECK(heuristic_decide({nullptr, 50, true, 0}, cfg) == SplitDecision::Keep);
    CHECK(heuristic_decide({nullptr, 51, true, 0}, cfg) == SplitDecision::Split);

    Ast a = parse_source("int s; void f(int n){for(s = 0; s < n; s = s + 1){s = s + 2;}}");
    const FunctionDef& fn = fn_of(a);

    SplitConfig tiny;
    tiny.split_threshold = 1;
    std::vector<ControlPart> split = split_parts(fn, tiny, heuristic_policy(tiny));
    CHECK(split.size() == 8);

    SplitConfig huge;
    huge.split_threshold = 1000000;
    std::vector<ControlPart> kept = split_parts(fn, huge, heuristic_policy(huge));
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].role == "keep");
    CHECK(verify_split_integrity(fn, kept));
}

TEST_CASE("invalid split threshold is rejected") {
    Ast a = parse_source("int g; void f(int x){g = x;}");
    SplitConfig cfg;
    cfg.split_threshold = 0;
    CHECK_THROWS_AS(split_parts(fn_of(a), cfg, never_split_policy()), CompileError);
}

TEST_CASE("nested if-else inside a for expands to fourteen parts") {
    Ast a = parse_source(
        "int s; void f(int n){for(s = 0; s < n; s = s + 1){"
        "if(s < 2){s = s + 1;}else{s = s + 3;}}}");
    const FunctionDef& fn = fn_of(a);
    std::vector<ControlPart> parts = split_all(fn);
    REQUIRE(parts.size() == 14);

    CHECK(parts[4].role == "cmp");
    CHECK(parts[4].construct_kind == StmtKind::If);
    CHECK(parts[4].construct_id == 1);
    CHECK(parts[4].loop_depth == 1);
    CHECK(parts[5].payload == ".L_f__1_else");
    REQUIRE(parts[6].break_stack.size() == 1);
    CHECK(parts[6].break_stack[0] == ".L_f__0_end");
    CHECK(parts[10].payload == ".L_f__1_endif");
    CHECK(parts[11].role == "incr");
    CHECK(verify_split_integrity(fn, parts));
}

TEST_CASE("break and continue stacks match part loop depth") {
    Ast a = parse_source(
        "int s; void f(int n){"
        "while(s < n){"
        "  for(s = 0; s < n; s = s + 1){"
        "    if(s > 4){break;}"
        "    if(s > 2){continue;}"
        "    s = s * 2;"
        "  }"
        "  do{ s = s + 1; if(s > 9){break;} }while(s < 3);"
        "}}");
    const FunctionDef& fn = fn_of(a);
    std::vector<ControlPart> parts = split_all(fn);
    check_depth_invariant(parts);

    const ControlPart* brk = nullptr;
    for (const auto& p : parts) {
        std::vector<const Stmt*> brks, conts;
        for (const Stmt* s : p.stmts) collect_own_breaks(*s, brks, conts);
        if (!brks.empty() && p.loop_depth == 2) brk = &p;
    }
    REQUIRE(brk != nullptr);
    REQUIRE(brk->break_stack.size() == 2);
    CHECK(brk->break_stack[0] == ".L_f__0_end");
    CHECK(verify_split_integrity(fn, parts));
}

TEST_CASE("condition-less for parses to a canonical form and still splits") {
    Ast a = parse_source("int g; void f(int n){for(;;){break;}}");
    const FunctionDef& fn = fn_of(a);
    std::vector<ControlPart> parts = split_all(fn);
    REQUIRE(parts.size() == 8);
    CHECK(parts[2].payload == "1");
    CHECK(verify_split_integrity(fn, parts));
}

TEST_CASE("labeled loops stay in source blocks") {
    Ast b = parse_source("int g; void f(int n){top: while(g < n){g = g + 1;}}");
    const FunctionDef& fn2 = fn_of(b);
    std::vector<ControlPart> parts2 = split_all(fn2);
    REQUIRE(parts2.size() == 1);
    CHECK(verify_split_integrity(fn2, parts2));
}

TEST_CASE("empty body yields no parts and still verifies") {
    Ast a = parse_source("void f(int n){}");
    const FunctionDef& fn = fn_of(a);
    std::vector<ControlPart> parts = split_all(fn);
    CHECK(parts.empty());
    CHECK(verify_split_integrity(fn, parts));
}

TEST_CASE("recombined text reproduces the body modulo whitespace") {
    Ast a = parse_source(
        "int s; void f(int n){int i; i = 0;"
        "for(i = 0; i < n; i = i + 1){s = s + i;}"
        "if(s > 10){s = 0;}else{do{s = s + 1;}while(s < 5);}"
        "switch(n){case 1: s = 1; break; default: s = 2;}"
        "return;}");
    const FunctionDef& fn = fn_of(a);
    std::vector<ControlPart> parts = split_all(fn);
    CHECK(verify_split_integrity(fn, parts));

    Ast reparsed = parse_source("int s; void f(int n){" + recombine_parts_text(parts) + "}");
    std::string again;
    for (const auto& st : fn_of(reparsed).body->body) again += print_stmt(*st);
    std::string direct;
    for (const auto& st : fn.body->body) direct += print_stmt(*st);
    CHECK(again == direct);
}

TEST_CASE("integrity rejects tampered part lists") {
    Ast a = parse_source(
        "int s; void f(int n){for(s = 0; s < n; s = s + 1){s = s + 2;}"
        "while(s > 0){s = s - 1;}}");
    const FunctionDef& fn = fn_of(a);
    std::vector<ControlPart> good = split_all(fn);
    REQUIRE(verify_split_integrity(fn, good));

    SUBCASE("jump retargeted to an undefined label") {
        auto bad = good;
        bad[3].payload = ".L_f__0_bogus";
        CHECK(!verify_split_integrity(fn, bad));
    }
    SUBCASE("jump retargeted to another construct's label") {
        auto bad = good;
        REQUIRE(bad[3].kind == PartKind::CondJump);
        bad[3].payload = ".L_f__1_end";
        CHECK(!verify_split_integrity(fn, bad));
    }
    SUBCASE("condition payload edited") {
        auto bad = good;
        bad[2].payload = "s <= n";
        CHECK(!verify_split_integrity(fn, bad));
    }
    SUBCASE("part dropped") {
        auto bad = good;
        bad.erase(bad.begin());
        CHECK(!verify_split_integrity(fn, bad));
        for (size_t i = 0; i < bad.size(); ++i) bad[i].id = int(i);
        CHECK(!verify_split_integrity(fn, bad));
    }
    SUBCASE("adjacent parts swapped") {
        auto bad = good;
        std::swap(bad[4], bad[5]);
        for (size_t i = 0; i < bad.size(); ++i) bad[i].id = int(i);
        CHECK(!verify_split_integrity(fn, bad));
    }
    SUBCASE("duplicated label part") {
        auto bad = good;
        bad.push_back(bad[1]);
        for (size_t i = 0; i < bad.size(); ++i) bad[i].id = int(i);
        CHECK(!verify_split_integrity(fn, bad));
    }
    SUBCASE("jump polarity flipped") {
        auto bad = good;
        bad[3].jump_if_true = true;
        CHECK(!verify_split_integrity(fn, bad));
    }
}

TEST_CASE("integrity holds for random policies") {
    Ast a = parse_source(
        "int s; int t;"
        "void f(int n){"
        "int i; i = 0; s = 0;"
        "while(i < n){"
        "  for(s = 0; s < i; s = s + 1){"
        "    if(s == 3){continue;}"
        "    if(s > 7){break;}"
        "    t = t + s;"
        "  }"
        "  do{ t = t - 1; }while(t > 100);"
        "  switch(i){case 0: t = 1; break; case 2: t = 2; break; default: t = t + 1;}"
        "  if(t < 0){t = 0;}else{t = t * 2;}"
        "  i = i + 1;"
        "}"
        "for(; i < 20;){i = i + 3;}"
        "return;}");
    const FunctionDef& fn = fn_of(a);

    std::mt19937 rng(1234);
    for (int round = 0; round < 50; ++round) {
        SplitPolicy coin = [&rng](const SplitCandidate& c) {
            if (!c.is_control) return SplitDecision::Keep;
            return (rng() & 1) ? SplitDecision::Split : SplitDecision::Keep;
        };
        std::vector<ControlPart> parts = split_parts(fn, SplitConfig{}, coin);
        CHECK(verify_split_integrity(fn, parts));
        check_depth_invariant(parts);
    }
}

TEST_CASE("splitting is deterministic") {
    Ast a = parse_source(
        "int s; void f(int n){for(s = 0; s < n; s = s + 1){if(s > 2){s = 0;}}}");
    const FunctionDef& fn = fn_of(a);
    std::string d1 = dump_parts(split_all(fn));
    std::string d2 = dump_parts(split_all(fn));
    CHECK(d1 == d2);
}

TEST_CASE("construct ids do not depend on the policy") {
    Ast a = parse_source(
        "int s; void f(int n){for(s = 0; s < n; s = s + 1){s = s + 2;}"
        "if(s > 3){s = 0;}}");
    const FunctionDef& fn = fn_of(a);

    std::vector<ControlPart> all = split_all(fn);
    SplitPolicy only_for = [](const SplitCandidate& c) {
        return (c.is_control && c.stmt->kind == StmtKind::For) ? SplitDecision::Split
                                                               : SplitDecision::Keep;
    };
    std::vector<ControlPart> some = split_parts(fn, SplitConfig{}, only_for);

    CHECK(label_part(all, ".L_f__0_body") != nullptr);
    CHECK(label_part(some, ".L_f__0_body") != nullptr);
    CHECK(label_part(all, ".L_f__1_endif") != nullptr);
    CHECK(label_part(some, ".L_f__1_endif") == nullptr);
    CHECK(verify_split_integrity(fn, some));
}

TEST_CASE("dump lists id kind depth and flattened payload") {
    Ast a = parse_source("int s; void f(int n){for(s = 0; s < n; s = s + 1){s = s + 2;}}");
    std::string d = dump_parts(split_all(fn_of(a)));
    CHECK(d.find("0 SourceBlock 1 s = 0;") == 0);
    CHECK(d.find("1 Label 1 .L_f__0_body") != std::string::npos);
    CHECK(d.find("3 CondJump 1 .L_f__0_end") != std::string::npos);
    CHECK(d.find("6 UncondJump 1 .L_f__0_body") != std::string::npos);
    CHECK(d.find('\t') == std::string::npos);
}

TEST_CASE("stitched part graph matches the source graph after contraction") {
    Ast a = parse_source(
        "int s; void f(int n){while(s < n){if(s == 2){s = s + 3;}else{s = s * 2;}}}");
    const FunctionDef& fn = fn_of(a);
    std::vector<ControlPart> parts = split_all(fn);
    Cfg want = contract_fallthrough_chains(build_cfg(fn));
    Cfg got = contract_fallthrough_chains(stitch_parts_cfg(parts));
    CHECK(cfg_isomorphic(want, got));
    CHECK(want.nodes.size() == got.nodes.size());
}
