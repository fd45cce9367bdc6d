#include <doctest.h>

#include "blockcc/parser.hpp"
#include "support/interpreter.hpp"

using namespace blockcc;
using namespace blockcc::testsupport;

namespace {

int64_t run_i(const std::string& src, const std::vector<InterpValue>& args = {}) {
    Ast ast = parse_source(src);
    return interpret(ast, "f", args).ret.i;
}

double run_f(const std::string& src, const std::vector<InterpValue>& args = {}) {
    Ast ast = parse_source(src);
    return interpret(ast, "f", args).ret.f;
}

}  // namespace

TEST_CASE("integer arithmetic follows C") {
    CHECK(run_i("int f(){return 2 + 3 * 4;}") == 14);
    CHECK(run_i("int f(){return -7 / 2;}") == -3);
    CHECK(run_i("int f(){return -7 % 2;}") == -1);
    CHECK(run_i("int f(){return 7 % -2;}") == 1);
    CHECK(run_i("long f(){return 10000000000 / 3;}") == 3333333333);
    CHECK(run_i("int f(){unsigned int u = 0; u = u - 1; return u > 100;}") == 1);
    CHECK(run_i("int f(){return (10 > 3) + (2 == 2) * 5;}") == 6);
}

TEST_CASE("wrap and width semantics match two's complement hardware") {
    CHECK(run_i("int f(){int x = 2147483647; x = x + 1; return x;}") == INT32_MIN);
    CHECK(run_i("int f(){char c = 200; return c;}") == int8_t(200));
    CHECK(run_i("int f(){unsigned char c = 200; c = c + 100; return c;}") == uint8_t(300));
    CHECK(run_i("int f(){short s = 40000; return s;}") == int16_t(40000));
    CHECK(run_i("long f(){unsigned int u = 4000000000; return u + 0;}") == 4000000000);
    CHECK(run_i("int f(){return 1 << 33;}") == 2);       // count masked to width
    CHECK(run_i("long f(){return 1L << 33;}") == 8589934592L);
    CHECK(run_i("int f(){return -8 >> 1;}") == -4);      // arithmetic for signed
    CHECK(run_i("int f(){unsigned int u = 2147483648U; return (u >> 31) == 1;}") == 1);
}

TEST_CASE("control flow") {
    CHECK(run_i("int f(int n){int s = 0; int i; for (i = 0; i < n; i++){ if (i % 2 == 0) { "
                "continue; } s = s + i; } return s;}",
                {make_int_value(TypeKind::Int, 10)}) == 25);
    CHECK(run_i("int f(){int i = 0; while (1) { i++; if (i == 7) { break; } } return i;}") == 7);
    CHECK(run_i("int f(){int i = 10; do { i = i - 3; } while (i > 0); return i;}") == -2);
    CHECK(run_i("int f(int x){switch (x) { case 1: return 10; case 2: case 3: return 23; "
                "default: return -1; } }",
                {make_int_value(TypeKind::Int, 3)}) == 23);
    CHECK(run_i("int f(int x){int r = 0; switch (x) { case 1: r = r + 1; case 2: r = r + 2; "
                "break; case 3: r = 100; } return r;}",
                {make_int_value(TypeKind::Int, 1)}) == 3);
    CHECK(run_i("int f(int x){return x > 0 ? x : -x;}", {make_int_value(TypeKind::Int, -5)}) == 5);
}

TEST_CASE("short circuit skips side effects") {
    CHECK(run_i("int g = 0;\nint bump(){g = g + 1; return 1;}\n"
                "int f(){int r = 0 && bump(); return g * 10 + r;}") == 0);
    CHECK(run_i("int g = 0;\nint bump(){g = g + 1; return 0;}\n"
                "int f(){int r = 1 || bump(); return g * 10 + r;}") == 1);
    CHECK(run_i("int g = 0;\nint bump(){g = g + 1; return 1;}\n"
                "int f(){int r = 1 && bump(); return g * 10 + r;}") == 11);
}

TEST_CASE("floats and conversions") {
    CHECK(run_f("double f(){return 1.5 + 2.25;}") == 3.75);
    CHECK(run_f("double f(){return 7 / 2;}") == 3.0);
    CHECK(run_f("double f(){return 7 / 2.0;}") == 3.5);
    CHECK(run_f("double f(){float x = 0.1f; return x;}") == double(0.1f));
    CHECK(run_i("int f(){return (int)3.9;}") == 3);
    CHECK(run_i("int f(){return (int)-3.9;}") == -3);
    CHECK(run_f("double f(){unsigned long u = 18446744073709551615UL; return u / 2;}") ==
          double(uint64_t(18446744073709551615ULL) / 2));
    CHECK(run_i("int f(){double d = 2.5; d += 1; return (int)(d * 2.0);}") == 7);
}

TEST_CASE("pointers arrays structs unions") {
    CHECK(run_i("int f(){int a[4]; int i; for (i = 0; i < 4; i++){a[i] = i * i;} "
                "return a[0] + a[1] + a[2] + a[3];}") == 14);
    CHECK(run_i("int f(){int x = 5; int *p = &x; *p = 9; return x;}") == 9);
    CHECK(run_i("int f(){int a[3]; int *p = a; a[0] = 1; a[1] = 2; a[2] = 4; p = p + 1; "
                "return *p + p[1];}") == 6);
    CHECK(run_i("struct pt {int x; int y;};\n"
                "int f(){struct pt p; p.x = 3; p.y = 4; return p.x * p.x + p.y * p.y;}") == 25);
    CHECK(run_i("struct pt {int x; int y;};\n"
                "int f(){struct pt p; struct pt *q = &p; q->x = 7; return p.x;}") == 7);
    CHECK(run_i("union u {int i; unsigned char b[4];};\n"
                "int f(){union u v; v.i = 258; return v.b[0] + v.b[1];}") == 3);
    CHECK(run_i("int f(){int a[3]; int *p = a; int *q = &a[2]; return q - p;}") == 2);
}

TEST_CASE("increments and compound assignment") {
    CHECK(run_i("int f(){int x = 5; int y = x++; return x * 10 + y;}") == 65);
    CHECK(run_i("int f(){int x = 5; int y = ++x; return x * 10 + y;}") == 66);
    CHECK(run_i("int f(){int x = 5; x += 3; x *= 2; x -= 1; x /= 3; return x;}") == 5);
    CHECK(run_i("int f(){int x = 6; x <<= 2; x |= 1; x &= 27; x ^= 2; return x;}") == 27);
    CHECK(run_i("int f(){int a[2]; a[0] = 1; a[1] = 10; int i = 0; a[i++] += 5; "
                "return a[0] * 100 + a[1] + i;}") == 611);
}

TEST_CASE("globals persist across calls") {
    Ast ast = parse_source(
        "int counter = 3;\n"
        "int bump(int by){counter = counter + by; return counter;}\n"
        "int f(int n){bump(n); bump(n); return counter;}");
    auto r = interpret(ast, "f", {make_int_value(TypeKind::Int, 4)});
    CHECK(r.ret.i == 11);
    CHECK(r.globals.at("counter").i == 11);
    REQUIRE(r.call_log.size() == 2);
    CHECK(r.call_log[0] == "bump");
}

TEST_CASE("recursion works and runaway loops hit the step budget") {
    CHECK(run_i("int f(int n){if (n < 2) { return 1; } return n * f(n - 1);}",
                {make_int_value(TypeKind::Int, 6)}) == 720);
    Ast ast = parse_source("int f(){int i = 0; while (1) { i++; } return i;}");
    InterpOptions opts;
    opts.max_steps = 1000;
    CHECK_THROWS_AS(interpret(ast, "f", {}, opts), CompileError);
}

TEST_CASE("division traps are reported") {
    Ast ast = parse_source("int f(int d){return 10 / d;}");
    CHECK_THROWS_AS(interpret(ast, "f", {make_int_value(TypeKind::Int, 0)}), CompileError);
}
