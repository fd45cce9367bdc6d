#include "blockcc/composability.hpp"

#include <chrono>
#include <cstdlib>
#include <optional>
#include <random>
#include <sstream>

#include "blockcc/diag.hpp"
#include "blockcc/parser.hpp"
#include "blockcc/printer.hpp"
#include "blockcc/proc.hpp"
#include "blockcc/rebuild.hpp"
#include "blockcc/sema.hpp"
#include "blockcc/splitter.hpp"
#include "blockcc/symtab.hpp"
#include "blockcc/translation.hpp"

namespace blockcc {

namespace {

// All draws go through modulo so the stream depends only on mt19937_64,
// which the standard pins down bit for bit.
class Rng {
  public:
    explicit Rng(uint64_t seed) : e_(seed ^ 0x9E3779B97F4A7C15ULL) { e_.discard(3); }
    int range(int n) { return n <= 1 ? 0 : static_cast<int>(e_() % static_cast<uint64_t>(n)); }
    bool chance(int pct) { return range(100) < pct; }

  private:
    std::mt19937_64 e_;
};

const int64_t INT_CONSTS[] = {0, 1, 2, 3, 4, 5, 7, 8, 10, 12, 100, -1, -2, -5, -17, 255, 1000};
const int64_t DIVISORS[] = {2, 3, 5, 7, 9, 12};
const char* DBL_CONSTS[] = {"0.0",  "1.0",  "0.5",   "1.5",  "2.0",
                            "-0.75", "3.25", "-2.5", "0.25", "8.0"};
const char* DBL_FACTORS[] = {"0.5", "0.75", "1.25", "-0.5", "1.5"};

std::string i64s(int64_t v) { return std::to_string(v); }

struct Var {
    std::string name;
    char cls = 'i';  // i=int u=unsigned l=long d=double
    bool assignable = true;
};

const char* cls_type(char c) {
    switch (c) {
        case 'i': return "int";
        case 'u': return "unsigned";
        case 'l': return "long";
        default: return "double";
    }
}

// Emits one function body's statements. Loops run on dedicated counters that
// nothing else writes, `continue` appears only where the increment still
// runs, shifts go through unsigned with masked counts, divisors are positive
// constants, and doubles never flow back into integers.
struct Gen {
    Rng rng;
    std::string prefix;
    std::vector<Var> scalars;
    std::vector<Var> doubles;
    int next_local = 0;
    int depth = 0;
    std::vector<char> loops;  // innermost last: f, w, d
    bool in_switch = false;
    std::ostringstream body;
    int indent = 1;

    Gen(uint64_t seed, std::string pfx) : rng(seed), prefix(std::move(pfx)) {}

    std::string fresh(const char* stem) {
        return prefix + stem + std::to_string(next_local++);
    }

    void line(const std::string& text) {
        for (int i = 0; i < indent; ++i) body << "    ";
        body << text << "\n";
    }

    std::string int_leaf() {
        if (!scalars.empty() && rng.chance(70))
            return scalars[rng.range(static_cast<int>(scalars.size()))].name;
        return i64s(INT_CONSTS[rng.range(std::size(INT_CONSTS))]);
    }

    std::string int_expr(int d) {
        if (d <= 0) return int_leaf();
        switch (rng.range(11)) {
            case 0:
            case 1: return int_leaf();
            case 2: return "(-(" + int_expr(d - 1) + "))";
            case 3: return "(~(" + int_expr(d - 1) + "))";
            case 4: return "(!(" + int_expr(d - 1) + "))";
            case 5: {
                static const char* ops[] = {"+", "-", "*", "&", "|", "^"};
                return "(" + int_expr(d - 1) + " " + ops[rng.range(6)] + " " +
                       int_expr(d - 1) + ")";
            }
            case 6: {
                const char* op = rng.chance(50) ? "/" : "%";
                return "(" + int_expr(d - 1) + " " + op + " " +
                       i64s(DIVISORS[rng.range(std::size(DIVISORS))]) + ")";
            }
            case 7: {
                const char* op = rng.chance(50) ? "<<" : ">>";
                return "((long)((unsigned long)(" + int_expr(d - 1) + ") " + op + " (" +
                       int_leaf() + " & 15)))";
            }
            case 8: {
                static const char* ops[] = {"<", "<=", ">", ">=", "==", "!="};
                return "(" + int_expr(d - 1) + " " + ops[rng.range(6)] + " " +
                       int_expr(d - 1) + ")";
            }
            case 9:
                return "((" + cond_expr() + ") ? (" + int_expr(d - 1) + ") : (" +
                       int_expr(d - 1) + "))";
            default:
                return "(" + int_expr(d - 1) + " + " + int_expr(d - 1) + ")";
        }
    }

    std::string dbl_leaf() {
        if (!doubles.empty() && rng.chance(70))
            return doubles[rng.range(static_cast<int>(doubles.size()))].name;
        return DBL_CONSTS[rng.range(std::size(DBL_CONSTS))];
    }

    std::string dbl_expr(int d) {
        if (d <= 0) return dbl_leaf();
        switch (rng.range(6)) {
            case 0: return dbl_leaf();
            case 1: return "(" + dbl_expr(d - 1) + " + " + dbl_expr(d - 1) + ")";
            case 2: return "(" + dbl_expr(d - 1) + " - " + dbl_expr(d - 1) + ")";
            case 3:
                return "(" + dbl_expr(d - 1) + " * " +
                       DBL_FACTORS[rng.range(std::size(DBL_FACTORS))] + ")";
            case 4: return "(" + dbl_expr(d - 1) + (rng.chance(50) ? " / 2.0)" : " / 4.0)");
            default: return "(" + dbl_expr(d - 1) + " + " + int_leaf() + ")";
        }
    }

    std::string cond_expr() {
        if (!doubles.empty() && rng.chance(20)) {
            static const char* ops[] = {"<", "<=", ">", ">="};
            return dbl_leaf() + " " + ops[rng.range(4)] + " " +
                   DBL_CONSTS[rng.range(std::size(DBL_CONSTS))];
        }
        static const char* ops[] = {"<", "<=", ">", ">=", "==", "!="};
        return int_expr(1) + " " + ops[rng.range(6)] + " " + int_expr(1);
    }

    const Var* pick_assignable(const std::vector<Var>& pool) {
        std::vector<const Var*> ok;
        for (const auto& v : pool)
            if (v.assignable) ok.push_back(&v);
        if (ok.empty()) return nullptr;
        return ok[rng.range(static_cast<int>(ok.size()))];
    }

    void declare_int(int& budget) {
        char cls = "iiul"[rng.range(4)];
        std::string name = fresh("v");
        line(std::string(cls_type(cls)) + " " + name + " = " + int_expr(2) + ";");
        scalars.push_back({name, cls, true});
        --budget;
    }

    void declare_dbl(int& budget) {
        std::string name = fresh("d");
        line("double " + name + " = " + dbl_expr(2) + ";");
        doubles.push_back({name, 'd', true});
        --budget;
    }

    void assign(int& budget) {
        bool dbl = !doubles.empty() && rng.chance(25);
        if (dbl) {
            const Var* v = pick_assignable(doubles);
            if (!v) return;
            switch (rng.range(4)) {
                case 0: line(v->name + " = " + dbl_expr(2) + ";"); break;
                case 1: line(v->name + " += " + dbl_expr(1) + ";"); break;
                case 2: line(v->name + " -= " + dbl_expr(1) + ";"); break;
                default:
                    line(v->name + " *= " + DBL_FACTORS[rng.range(std::size(DBL_FACTORS))] +
                         ";");
                    break;
            }
        } else {
            const Var* v = pick_assignable(scalars);
            if (!v) return;
            if (rng.chance(55)) {
                line(v->name + " = " + int_expr(2) + ";");
            } else {
                static const char* ops[] = {"+=", "-=", "*=", "&=", "|=", "^="};
                line(v->name + " " + ops[rng.range(6)] + " " + int_expr(1) + ";");
            }
        }
        --budget;
    }

    void open_scope(size_t& s_mark, size_t& d_mark) {
        s_mark = scalars.size();
        d_mark = doubles.size();
        ++indent;
        ++depth;
    }

    void close_scope(size_t s_mark, size_t d_mark) {
        scalars.resize(s_mark);
        doubles.resize(d_mark);
        --indent;
        --depth;
    }

    void block(int& budget) {
        int n = 1 + rng.range(3);
        for (int i = 0; i < n && budget > 0; ++i) stmt(budget);
    }

    void if_stmt(int& budget) {
        --budget;
        line("if (" + cond_expr() + ") {");
        size_t s, d;
        open_scope(s, d);
        block(budget);
        close_scope(s, d);
        if (rng.chance(40)) {
            line("} else {");
            open_scope(s, d);
            block(budget);
            close_scope(s, d);
        }
        line("}");
    }

    void for_stmt(int& budget) {
        budget -= 2;
        std::string c = fresh("c");
        int bound = 1 + rng.range(8);
        line("int " + c + " = 0;");
        scalars.push_back({c, 'i', false});
        line("for (" + c + " = 0; " + c + " < " + std::to_string(bound) + "; " + c +
             " = " + c + " + 1) {");
        loops.push_back('f');
        size_t s, d;
        open_scope(s, d);
        block(budget);
        close_scope(s, d);
        loops.pop_back();
        line("}");
    }

    void while_stmt(int& budget) {
        budget -= 2;
        std::string w = fresh("w");
        int bound = 1 + rng.range(8);
        line("int " + w + " = 0;");
        scalars.push_back({w, 'i', false});
        line("while (" + w + " < " + std::to_string(bound) + ") {");
        loops.push_back('w');
        size_t s, d;
        open_scope(s, d);
        block(budget);
        line(w + " = " + w + " + 1;");
        close_scope(s, d);
        loops.pop_back();
        line("}");
    }

    void do_stmt(int& budget) {
        budget -= 2;
        std::string q = fresh("q");
        int bound = 1 + rng.range(8);
        line("int " + q + " = 0;");
        scalars.push_back({q, 'i', false});
        line("do {");
        loops.push_back('d');
        size_t s, d;
        open_scope(s, d);
        block(budget);
        line(q + " = " + q + " + 1;");
        close_scope(s, d);
        loops.pop_back();
        line("} while (" + q + " < " + std::to_string(bound) + ");");
    }

    void switch_stmt(int& budget) {
        budget -= 2;
        line("switch ((" + int_expr(1) + ") & 3) {");
        ++indent;
        bool was_in_switch = in_switch;
        in_switch = true;
        int ncases = 2 + rng.range(2);
        int value = rng.range(2);
        for (int i = 0; i < ncases && value < 4; ++i) {
            line("case " + std::to_string(value) + ":");
            ++indent;
            int inner = 1 + rng.range(2);
            for (int k = 0; k < inner; ++k) assign(budget);
            bool last = i == ncases - 1;
            if (last || !rng.chance(25)) line("break;");
            --indent;
            value += 1 + rng.range(2);
        }
        if (rng.chance(75)) {
            line("default:");
            ++indent;
            assign(budget);
            line("break;");
            --indent;
        }
        in_switch = was_in_switch;
        --indent;
        line("}");
    }

    void loop_exit(int& budget) {
        if (loops.empty()) return;
        --budget;
        bool can_continue = loops.back() == 'f' && !in_switch;
        const char* kw = can_continue && rng.chance(40) ? "continue;" : "break;";
        line("if (" + cond_expr() + ") {");
        ++indent;
        line(kw);
        --indent;
        line("}");
    }

    void stmt(int& budget) {
        if (budget <= 0) return;
        int roll = rng.range(100);
        if (depth >= 3) roll = roll % 45;  // deep nesting: declarations and assignments only
        if (roll < 18) declare_int(budget);
        else if (roll < 25) declare_dbl(budget);
        else if (roll < 45) assign(budget);
        else if (roll < 58) if_stmt(budget);
        else if (roll < 70) for_stmt(budget);
        else if (roll < 78) while_stmt(budget);
        else if (roll < 84) do_stmt(budget);
        else if (roll < 92) switch_stmt(budget);
        else loop_exit(budget);
    }

    void run(int budget) {
        while (budget > 0) stmt(budget);
    }

    std::string scalar_leaf_name() {
        if (scalars.empty()) return "0";
        return scalars[rng.range(static_cast<int>(scalars.size()))].name;
    }
};

std::string gen_impl(uint64_t seed_a, std::optional<uint64_t> seed_b, int budget) {
    if (budget < 1) budget = 1;
    Rng meta(seed_a);
    std::ostringstream out;
    std::vector<Var> gscalars;
    std::vector<Var> gdoubles;

    int n_globals = 2 + meta.range(3);
    for (int i = 0; i < n_globals; ++i) {
        char cls = "iul"[meta.range(3)];
        std::string name = "g" + std::to_string(i);
        if (meta.chance(70))
            out << cls_type(cls) << " " << name << " = "
                << i64s(INT_CONSTS[meta.range(std::size(INT_CONSTS))]) << ";\n";
        else
            out << cls_type(cls) << " " << name << ";\n";
        gscalars.push_back({name, cls, true});
    }
    if (meta.chance(50)) {
        out << "double gd0 = " << DBL_CONSTS[meta.range(std::size(DBL_CONSTS))] << ";\n";
        gdoubles.push_back({"gd0", 'd', true});
    }

    char pcls[2];
    for (char& c : pcls) {
        int r = meta.range(10);
        c = r < 4 ? 'i' : r < 7 ? 'l' : r < 9 ? 'u' : 'd';
    }
    out << "\nlong gen_fn(" << cls_type(pcls[0]) << " pa, " << cls_type(pcls[1])
        << " pb) {\n";

    Gen g(seed_a * 1000003 + 17, "x");
    g.scalars = gscalars;
    g.doubles = gdoubles;
    for (int i = 0; i < 2; ++i) {
        Var p{i == 0 ? "pa" : "pb", pcls[i], true};
        if (p.cls == 'd') g.doubles.push_back(p);
        else g.scalars.push_back(p);
    }
    g.run(budget);
    out << g.body.str();

    if (seed_b) {
        Gen g2(*seed_b * 1000003 + 29, "y");
        g2.scalars = gscalars;
        g2.doubles = gdoubles;
        for (int i = 0; i < 2; ++i) {
            Var p{i == 0 ? "pa" : "pb", pcls[i], true};
            if (p.cls == 'd') g2.doubles.push_back(p);
            else g2.scalars.push_back(p);
        }
        g2.next_local = 0;
        g2.run(budget);
        out << g2.body.str();
    }

    // Fold a few live scalars into the result; globals are dumped by the
    // driver anyway.
    std::string r1 = g.scalar_leaf_name();
    std::string r2 = g.scalar_leaf_name();
    std::string r3 = g.scalar_leaf_name();
    out << "    return (((long)(" << r1 << ") * 1000003 + (long)(" << r2 << ")) ^ (long)("
        << r3 << "));\n}\n";
    return out.str();
}

std::string observed(const std::string& module_text, const DriverSpec& spec,
                     const std::vector<TestCase>& tests) {
    TempDir dir("blockcc-thm");
    auto exe = assemble_link(module_text, build_driver_source(spec, tests), dir);
    ProcResult r = run_process({exe.string(), "all"}, std::chrono::milliseconds(30000));
    if (!r.ok())
        throw CompileError(ErrorKind::Harness, "theorem driver failed: " + cap_tail(r.err, 500));
    return r.out;
}

std::vector<TestCase> long_pair_grid() {
    static const std::pair<int64_t, int64_t> grid[] = {
        {0, 0},   {1, 2},          {-3, 7},         {100, -41},
        {-1, -1}, {123456789, -9}, {7, 1000000007},
    };
    std::vector<TestCase> tests;
    int i = 0;
    for (auto [a, b] : grid) {
        TestCase t;
        t.name = "grid" + std::to_string(i++);
        t.args = {make_typed_int(TypeKind::Long, a), make_typed_int(TypeKind::Long, b)};
        tests.push_back(std::move(t));
    }
    return tests;
}

}  // namespace

std::string gen_fn_name() { return "gen_fn"; }

std::string gen_subset_program(uint64_t seed, int size_budget) {
    return gen_impl(seed, std::nullopt, size_budget);
}

std::string gen_concat_program(uint64_t seed_a, uint64_t seed_b, int size_budget) {
    return gen_impl(seed_a, seed_b, size_budget);
}

std::vector<TestCase> gen_test_cases(uint64_t seed, const DriverSpec& spec, int n_cases) {
    static const int64_t ipool[] = {0,    1,     -1,     2,      7,      -3,      100,
                                    255,  -128,  4096,   123456, -98765, 1 << 20, -17};
    static const double dpool[] = {0.0, 1.5, -2.25, 0.5, 8.0, -0.75, 100.25, 3.0};
    Rng r(seed ^ 0xC0FFEE);
    std::vector<TestCase> tests;
    for (int i = 0; i < n_cases; ++i) {
        TestCase t;
        t.name = "gen" + std::to_string(i);
        for (const auto& ty : spec.param_types) {
            bool dbl = ty->kind == TypeKind::Double || ty->kind == TypeKind::Float;
            if (i == 0) {
                t.args.push_back(dbl ? make_typed_float(ty->kind, 0.0)
                                     : make_typed_int(ty->kind, 0));
            } else if (dbl) {
                t.args.push_back(make_typed_float(ty->kind, dpool[r.range(std::size(dpool))]));
            } else {
                t.args.push_back(make_typed_int(ty->kind, ipool[r.range(std::size(ipool))]));
            }
        }
        tests.push_back(std::move(t));
    }
    return tests;
}

std::vector<TestCase> capture_oracle_expected(const std::string& c_source,
                                              const DriverSpec& spec,
                                              std::vector<TestCase> tests) {
    std::string driver = build_driver_source(spec, tests);
    TempDir dir("blockcc-oracle");
    auto exe = compile_c_sources({{"module.c", c_source}, {"driver.c", driver}}, dir);
    ProcResult r = run_process({exe.string(), "all"}, std::chrono::milliseconds(60000));
    if (r.timed_out || r.signaled)
        fail(ErrorKind::OracleUnavailable, "oracle run crashed or hung: " + cap_tail(r.err));

    auto parse_observed = [](const TypePtr& t, const std::string& text) {
        if (is_float(t->kind))
            return make_typed_float(t->kind, std::strtod(text.c_str(), nullptr));
        int64_t v = is_signed_integer(t->kind)
                        ? std::strtoll(text.c_str(), nullptr, 10)
                        : static_cast<int64_t>(std::strtoull(text.c_str(), nullptr, 10));
        return make_typed_int(t->kind, v);
    };

    std::istringstream in(r.out);
    std::string line;
    TestCase* cur = nullptr;
    size_t g_ix = 0;
    while (std::getline(in, line)) {
        if (line.rfind("case ", 0) == 0) {
            size_t idx = std::strtoull(line.c_str() + 5, nullptr, 10);
            cur = idx < tests.size() ? &tests[idx] : nullptr;
            if (cur) {
                cur->expected_globals.clear();
                g_ix = 0;
            }
        } else if (!cur) {
            continue;
        } else if (line.rfind("ret ", 0) == 0) {
            cur->expected_return = parse_observed(spec.return_type, line.substr(4));
        } else if (line.rfind("g ", 0) == 0) {
            size_t sp = line.find(' ', 2);
            if (sp == std::string::npos) continue;
            std::string name = line.substr(2, sp - 2);
            if (g_ix < spec.globals.size() && spec.globals[g_ix].first == name) {
                cur->expected_globals.emplace_back(
                    name, parse_observed(spec.globals[g_ix].second, line.substr(sp + 1)));
                g_ix++;
            }
        }
    }
    return tests;
}

std::vector<SeedCase> default_seed_corpus(int count) {
    std::vector<SeedCase> cases;
    cases.reserve(count);
    for (int i = 0; i < count; ++i)
        cases.push_back({static_cast<uint64_t>(i + 1), 12 + (i % 5) * 9, true});
    return cases;
}

std::vector<SeedCase> parse_seed_manifest(const std::string& text) {
    std::vector<SeedCase> cases;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t h = line.find('#');
        if (h != std::string::npos) line.resize(h);
        std::istringstream row(line);
        SeedCase c;
        int expected = 1;
        if (!(row >> c.seed)) continue;  // blank or comment-only line
        if (!(row >> c.budget >> expected))
            throw CompileError(ErrorKind::Config,
                               "seed manifest line " + std::to_string(lineno) +
                                   ": want 'seed budget expected'");
        c.expected_pass = expected != 0;
        cases.push_back(c);
    }
    return cases;
}

std::string serialize_seed_manifest(const std::vector<SeedCase>& cases) {
    std::ostringstream out;
    out << "# seed budget expected\n";
    for (const auto& c : cases)
        out << c.seed << " " << c.budget << " " << (c.expected_pass ? 1 : 0) << "\n";
    return out.str();
}

bool theorem_check_basic_statements(
    const std::vector<std::pair<std::string, std::string>>& pairs, std::string* why) {
    std::vector<TestCase> tests = long_pair_grid();
    for (const auto& [s1, s2] : pairs) {
        try {
            std::string src = "long thm_pair(long a, long b) {\n    " + s1 + "\n    " + s2 +
                              "\n    return (a * 1000003) ^ b;\n}\n";
            Ast ast = canonicalize(parse_source(src));
            analyze_module(ast);
            const FunctionDef& fn = ast.functions.at(0);
            SymbolTable table = allocate_frame(fn, collect_local_layouts(fn));
            DriverSpec spec = driver_spec_for(ast, fn.name);

            AssemblyFragment whole = ref_translate_function(fn, table, &ast);
            std::string mod_whole =
                emit_module({{fn.name, rebuild_direct(whole, table)}}, {});

            std::vector<ControlPart> parts;
            parts.reserve(fn.body->body.size());
            int id = 0;
            for (const auto& st : fn.body->body) {
                ControlPart p;
                p.kind = PartKind::SourceBlock;
                p.payload = print_stmt(*st);
                p.id = id++;
                p.role = "keep";
                p.stmts = {st.get()};
                parts.push_back(std::move(p));
            }
            std::vector<TranslatedPart> translated;
            translated.reserve(parts.size());
            for (const auto& p : parts)
                translated.push_back({&p, ref_translate_part(p, fn, table, &ast)});
            std::string mod_parts =
                emit_module({{fn.name, rebuild_function(translated, table)}}, {});

            std::string a = observed(mod_whole, spec, tests);
            std::string b = observed(mod_parts, spec, tests);
            if (a != b) {
                if (why)
                    *why = "pair (" + s1 + " | " + s2 + ") diverged:\nwhole:\n" + a +
                           "parts:\n" + b;
                return false;
            }
        } catch (const CompileError& e) {
            if (why) *why = "pair (" + s1 + " | " + s2 + ") failed: " + e.what();
            return false;
        }
    }
    return true;
}

std::vector<std::pair<std::string, std::string>> random_basic_statement_pairs(uint64_t seed,
                                                                              int count) {
    Rng r(seed * 2654435761 + 7);
    auto one = [&r]() -> std::string {
        const char* t = r.chance(50) ? "a" : "b";
        const char* o = *t == 'a' ? "b" : "a";
        std::string k = i64s(INT_CONSTS[r.range(std::size(INT_CONSTS))]);
        std::string d = i64s(DIVISORS[r.range(std::size(DIVISORS))]);
        switch (r.range(13)) {
            case 0: return std::string(t) + " = " + o + " + " + k + ";";
            case 1: return std::string(t) + " = " + o + " - " + k + ";";
            case 2: return std::string(t) + " = " + t + " * " + k + " + " + o + ";";
            case 3: return std::string(t) + " = (" + o + " ^ " + k + ") & " + t + ";";
            case 4: return std::string(t) + " += " + o + ";";
            case 5: return std::string(t) + " -= " + k + ";";
            case 6: return std::string(t) + " *= " + k + ";";
            case 7: return std::string(t) + " = " + o + " / " + d + ";";
            case 8: return std::string(t) + " = " + o + " % " + d + ";";
            case 9: return std::string(t) + " = -(" + o + ");";
            case 10: return std::string(t) + " = ~(" + t + ");";
            case 11:
                return std::string(t) + " = (" + o + " < " + k + ") ? (" + t + " + 1) : (" +
                       o + " - 1);";
            default: return ";";
        }
    };
    std::vector<std::pair<std::string, std::string>> pairs;
    pairs.reserve(count);
    for (int i = 0; i < count; ++i) pairs.emplace_back(one(), one());
    return pairs;
}

bool theorem_check_control_structures(const std::vector<std::string>& fixtures,
                                      std::string* why) {
    for (const auto& src : fixtures) {
        try {
            Ast ast = canonicalize(parse_source(src));
            analyze_module(ast);
            const FunctionDef& fn = ast.functions.at(0);
            SymbolTable table = allocate_frame(fn, collect_local_layouts(fn));
            table.globals = map_globals(ast.globals);
            DriverSpec spec = driver_spec_for(ast, fn.name);
            std::vector<TestCase> tests = gen_test_cases(7, spec, 6);

            AssemblyFragment whole = ref_translate_function(fn, table, &ast);
            std::string mod_whole =
                emit_module({{fn.name, rebuild_direct(whole, table)}}, table.globals);

            auto parts = split_parts(fn, SplitConfig{}, always_split_policy());
            std::vector<TranslatedPart> translated;
            translated.reserve(parts.size());
            for (const auto& p : parts)
                translated.push_back({&p, ref_translate_part(p, fn, table, &ast)});
            std::string mod_parts =
                emit_module({{fn.name, rebuild_function(translated, table)}}, table.globals);

            std::string a = observed(mod_whole, spec, tests);
            std::string b = observed(mod_parts, spec, tests);
            if (a != b) {
                if (why)
                    *why = fn.name + " diverged:\nwhole:\n" + a + "parts:\n" + b;
                return false;
            }
        } catch (const CompileError& e) {
            if (why) *why = std::string("fixture failed: ") + e.what();
            return false;
        }
    }
    return true;
}

std::vector<std::string> control_structure_fixtures() {
    return {
        R"(int fix_while(int a, int b) {
    int n = 0;
    int s = b;
    while (n < 10) {
        s = s + a;
        n = n + 1;
    }
    return s + n;
})",
        R"(int fix_for(int a, int b) {
    int s = 0;
    int i;
    for (i = 0; i < 8; i = i + 1) {
        if (i == (a & 3)) {
            continue;
        }
        s = s + i * b;
    }
    return s;
})",
        R"(int fix_do(int a, int b) {
    int n = a & 7;
    int s = 0;
    do {
        s = s + b;
        n = n - 1;
    } while (n > 0);
    return s;
})",
        R"(int fix_if(int a, int b) {
    int r = 0;
    if (a > b) {
        r = a - b;
    } else {
        r = b - a + 1;
    }
    return r;
})",
        R"(int fix_switch(int a, int b) {
    int r = b;
    switch (a & 3) {
        case 0:
            r = r + 1;
            break;
        case 1:
            r = r + 10;
        case 2:
            r = r + 100;
            break;
        default:
            r = r - 7;
            break;
    }
    return r;
})",
        R"(int fix_nested_break(int a, int b) {
    int s = 0;
    int i;
    int j;
    for (i = 0; i < 5; i = i + 1) {
        for (j = 0; j < 5; j = j + 1) {
            if (j == (a & 3)) {
                break;
            }
            s = s + 1;
        }
        s = s + b;
    }
    return s;
})",
        R"(int fix_nested_continue(int a, int b) {
    int s = 0;
    int i;
    int j;
    for (i = 0; i < 4; i = i + 1) {
        for (j = 0; j < 4; j = j + 1) {
            if (((i + j) & 1) == (b & 1)) {
                continue;
            }
            s = s + i * 10 + j;
        }
    }
    return s + a;
})",
    };
}

}  // namespace blockcc
