#include "blockcc/verify.hpp"

#include <cctype>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <map>
#include <sstream>

#include "blockcc/diag.hpp"
#include "blockcc/printer.hpp"

namespace blockcc {

TypedValue make_typed_int(TypeKind k, int64_t v) {
    TypedValue tv;
    tv.type = make_scalar(k);
    tv.i = canonical_int(k, v);
    return tv;
}

TypedValue make_typed_float(TypeKind k, double v) {
    TypedValue tv;
    tv.type = make_scalar(k);
    tv.f = k == TypeKind::Float ? double(float(v)) : v;
    return tv;
}

bool value_is_float(const TypedValue& v) {
    return v.type && is_float(v.type->kind);
}

std::string format_typed_value(const TypedValue& v) {
    char buf[64];
    if (value_is_float(v)) {
        snprintf(buf, sizeof buf, "%.17g", v.f);
    } else if (v.type && !is_signed_integer(v.type->kind)) {
        snprintf(buf, sizeof buf, "%" PRIu64, uint64_t(v.i));
    } else {
        snprintf(buf, sizeof buf, "%" PRId64, v.i);
    }
    return buf;
}

bool floats_close(double a, double b, double eps) {
    if (std::isnan(a) && std::isnan(b)) return true;
    if (a == b) return true;
    double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
    return std::fabs(a - b) <= eps * scale;
}

const char* stage_name(Stage s) {
    switch (s) {
        case Stage::Assemble: return "assemble";
        case Stage::Link: return "link";
        case Stage::Run: return "run";
        case Stage::Compare: return "compare";
    }
    return "?";
}

const char* error_class_name(ErrorClass c) {
    switch (c) {
        case ErrorClass::None: return "none";
        case ErrorClass::Semantic: return "semantic";
        case ErrorClass::Runtime: return "runtime";
        case ErrorClass::Behavioral: return "behavioral";
    }
    return "?";
}

std::string cap_tail(const std::string& text, size_t limit) {
    if (text.size() <= limit) return text;
    return "..." + text.substr(text.size() - limit);
}

namespace {

bool drivable_scalar(const TypePtr& t) {
    return t && is_arith(t->kind);
}

std::string c_type_name(const TypePtr& t) { return print_declarator(t, ""); }

// Emits a C expression with the exact value and type of `v`.
std::string c_literal(const TypedValue& v) {
    char buf[96];
    std::string cast = "(" + c_type_name(v.type) + ")";
    if (value_is_float(v)) {
        if (!std::isfinite(v.f)) fail(ErrorKind::Harness, "non-finite test value");
        snprintf(buf, sizeof buf, "%a", v.f);
        return cast + buf;
    }
    if (!is_signed_integer(v.type->kind)) {
        snprintf(buf, sizeof buf, "%" PRIu64 "ULL", uint64_t(v.i));
        return cast + buf;
    }
    if (v.i == INT64_MIN) return cast + "(-9223372036854775807LL - 1)";
    snprintf(buf, sizeof buf, "(%" PRId64 "LL)", v.i);
    return cast + buf;
}

void emit_print_value(std::string& out, const std::string& tag, const std::string& expr,
                      const TypePtr& t) {
    if (is_float(t->kind)) {
        out += "    printf(\"" + tag + " %.17g\\n\", (double)(" + expr + "));\n";
    } else if (is_signed_integer(t->kind)) {
        out += "    printf(\"" + tag + " %lld\\n\", (long long)(" + expr + "));\n";
    } else {
        out += "    printf(\"" + tag + " %llu\\n\", (unsigned long long)(" + expr + "));\n";
    }
}

}  // namespace

DriverSpec driver_spec_for(const Ast& ast, const std::string& fn_name) {
    const FunctionDef* fn = find_function(ast, fn_name);
    if (!fn) fail(ErrorKind::Harness, "driver: no function named " + fn_name);
    DriverSpec spec;
    spec.fn_name = fn_name;
    spec.return_type = fn->return_type;
    if (fn->return_type->kind != TypeKind::Void && !drivable_scalar(fn->return_type))
        fail(ErrorKind::Harness, "driver: return type of " + fn_name + " is not a scalar");
    for (const auto& p : fn->params) {
        if (!drivable_scalar(p.type))
            fail(ErrorKind::Harness, "driver: parameter " + p.name + " is not a scalar");
        spec.param_types.push_back(p.type);
    }
    for (const auto& g : ast.globals)
        if (drivable_scalar(g.type)) spec.globals.emplace_back(g.name, g.type);
    return spec;
}

std::string build_driver_source(const DriverSpec& spec, const std::vector<TestCase>& tests) {
    std::string out;
    out += "#include <stdio.h>\n#include <stdlib.h>\n\n";
    std::string params;
    if (spec.param_types.empty()) {
        params = "void";
    } else {
        for (size_t i = 0; i < spec.param_types.size(); i++) {
            if (i) params += ", ";
            params += c_type_name(spec.param_types[i]);
        }
    }
    out += "extern " + c_type_name(spec.return_type) + " " + spec.fn_name + "(" + params + ");\n";
    for (const auto& [name, type] : spec.globals)
        out += "extern " + print_declarator(type, name) + ";\n";
    out += "\nstatic void dump_state(void) {\n";
    for (const auto& [name, type] : spec.globals) emit_print_value(out, "g " + name, name, type);
    out += "}\n\n";

    for (size_t i = 0; i < tests.size(); i++) {
        const TestCase& tc = tests[i];
        if (tc.args.size() != spec.param_types.size())
            fail(ErrorKind::Harness, "driver: case " + tc.name + " has " +
                                         std::to_string(tc.args.size()) + " args, function takes " +
                                         std::to_string(spec.param_types.size()));
        out += "static void run_case_" + std::to_string(i) + "(void) {\n";
        std::string call = spec.fn_name + "(";
        for (size_t a = 0; a < tc.args.size(); a++) {
            if (a) call += ", ";
            TypedValue arg = tc.args[a];
            arg.type = spec.param_types[a];
            call += c_literal(arg);
        }
        call += ")";
        if (spec.return_type->kind == TypeKind::Void) {
            out += "    " + call + ";\n";
        } else {
            out += "    " + c_type_name(spec.return_type) + " r = " + call + ";\n";
            emit_print_value(out, "ret", "r", spec.return_type);
        }
        out += "    dump_state();\n}\n\n";
    }

    out += "int main(int argc, char **argv) {\n";
    out += "    int only = -1;\n";
    out += "    setbuf(stdout, 0);\n";
    out += "    if (argc > 1 && argv[1][0] != 'a') only = atoi(argv[1]);\n";
    for (size_t i = 0; i < tests.size(); i++) {
        std::string idx = std::to_string(i);
        out += "    if (only == -1 || only == " + idx + ") { printf(\"case " + idx +
               "\\n\"); run_case_" + idx + "(); }\n";
    }
    out += "    return 0;\n}\n";
    return out;
}

std::filesystem::path assemble_link(const std::string& module_text, const std::string& driver_c,
                                    const TempDir& dir) {
    auto s_path = dir.file("module.s");
    auto c_path = dir.file("driver.c");
    write_text_file(s_path, module_text);
    write_text_file(c_path, driver_c);

    auto obj = [&](const std::string& name) { return dir.file(name).string(); };
    ProcResult as = run_process({"cc", "-c", s_path.string(), "-o", obj("module.o")});
    if (!as.ok())
        fail(ErrorKind::Semantic, "assembler: " + cap_tail(as.err + as.out));
    ProcResult dc = run_process({"cc", "-O0", "-c", c_path.string(), "-o", obj("driver.o")});
    if (!dc.ok()) fail(ErrorKind::Harness, "driver failed to compile: " + cap_tail(dc.err));
    auto exe = dir.file("prog");
    ProcResult ld = run_process({"cc", obj("module.o"), obj("driver.o"), "-o", exe.string()});
    if (!ld.ok())
        fail(ErrorKind::Semantic, "linker: " + cap_tail(ld.err + ld.out));
    return exe;
}

std::filesystem::path compile_c_sources(
    const std::vector<std::pair<std::string, std::string>>& units, const TempDir& dir) {
    std::vector<std::string> argv = {"cc", "-O0", "-fwrapv", "-o", dir.file("prog").string()};
    for (const auto& [name, text] : units) {
        auto p = dir.file(name);
        write_text_file(p, text);
        argv.push_back(p.string());
    }
    ProcResult r = run_process(argv);
    if (!r.ok()) fail(ErrorKind::Harness, "C build failed: " + cap_tail(r.err));
    return dir.file("prog");
}

namespace {

struct CaseOutput {
    bool seen = false;
    bool ret_seen = false;
    std::string ret_text;
    std::map<std::string, std::string> globals;
    std::string extra;
};

std::vector<CaseOutput> parse_driver_output(const std::string& text, size_t n_cases) {
    std::vector<CaseOutput> cases(n_cases);
    CaseOutput* cur = nullptr;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("case ", 0) == 0) {
            size_t idx = strtoull(line.c_str() + 5, nullptr, 10);
            cur = idx < n_cases ? &cases[idx] : nullptr;
            if (cur) cur->seen = true;
        } else if (!cur) {
            continue;
        } else if (line.rfind("ret ", 0) == 0) {
            cur->ret_seen = true;
            cur->ret_text = line.substr(4);
        } else if (line.rfind("g ", 0) == 0) {
            size_t sp = line.find(' ', 2);
            if (sp != std::string::npos) cur->globals[line.substr(2, sp - 2)] = line.substr(sp + 1);
        } else {
            cur->extra += line + "\n";
        }
    }
    return cases;
}

bool value_text_matches(const std::string& text, const TypedValue& want, const Comparison& cmp,
                        std::string& why) {
    if (value_is_float(want)) {
        char* end = nullptr;
        double got = strtod(text.c_str(), &end);
        if (end == text.c_str()) {
            why = "unparseable value '" + text + "'";
            return false;
        }
        bool ok = cmp.exact ? (got == want.f || (std::isnan(got) && std::isnan(want.f)))
                            : floats_close(got, want.f, cmp.epsilon);
        if (!ok) why = "got " + text + ", want " + format_typed_value(want);
        return ok;
    }
    int64_t got;
    if (is_signed_integer(want.type->kind))
        got = strtoll(text.c_str(), nullptr, 10);
    else
        got = int64_t(strtoull(text.c_str(), nullptr, 10));
    if (canonical_int(want.type->kind, got) != want.i) {
        why = "got " + text + ", want " + format_typed_value(want);
        return false;
    }
    return true;
}

std::string rstrip(const std::string& s) {
    size_t end = s.size();
    while (end > 0 && isspace((unsigned char)s[end - 1])) end--;
    return s.substr(0, end);
}

}  // namespace

VerificationReport run_tests(const std::filesystem::path& executable,
                             const std::vector<TestCase>& tests, int timeout_secs) {
    if (!std::filesystem::exists(executable))
        fail(ErrorKind::Harness, "missing executable " + executable.string());
    VerificationReport report;
    ProcResult r = run_process({executable.string(), "all"},
                               std::chrono::milliseconds(int64_t(timeout_secs) * 1000));
    auto cases = parse_driver_output(r.out, tests.size());

    if (r.timed_out || r.signaled || r.exit_code != 0) {
        report.stage = Stage::Run;
        report.error_class = ErrorClass::Runtime;
        if (r.timed_out)
            report.diagnostics = "timed out after " + std::to_string(timeout_secs) + "s";
        else if (r.signaled)
            report.diagnostics = "terminated by signal " + std::to_string(r.term_signal);
        else
            report.diagnostics = "exited with code " + std::to_string(r.exit_code);
        if (!r.err.empty()) report.diagnostics += "\nstderr:\n" + cap_tail(r.err, 1000);
        for (size_t i = 0; i < tests.size(); i++)
            if (!cases[i].seen || (tests[i].expected_return.has_value() && !cases[i].ret_seen))
                report.failed_cases.push_back({tests[i].name, "no complete output"});
        return report;
    }

    report.stage = Stage::Compare;
    for (size_t i = 0; i < tests.size(); i++) {
        const TestCase& tc = tests[i];
        const CaseOutput& co = cases[i];
        std::string why;
        if (!co.seen) {
            report.failed_cases.push_back({tc.name, "case produced no output"});
            continue;
        }
        if (tc.expected_return) {
            if (!co.ret_seen) {
                report.failed_cases.push_back({tc.name, "no return value printed"});
                continue;
            }
            if (!value_text_matches(co.ret_text, *tc.expected_return, tc.comparison, why)) {
                report.failed_cases.push_back({tc.name, "return: " + why});
                continue;
            }
        }
        bool global_bad = false;
        for (const auto& [gname, gwant] : tc.expected_globals) {
            auto it = co.globals.find(gname);
            if (it == co.globals.end()) {
                report.failed_cases.push_back({tc.name, "global " + gname + " not printed"});
                global_bad = true;
                break;
            }
            if (!value_text_matches(it->second, gwant, tc.comparison, why)) {
                report.failed_cases.push_back({tc.name, "global " + gname + ": " + why});
                global_bad = true;
                break;
            }
        }
        if (global_bad) continue;
        if (tc.expected_stdout && rstrip(co.extra) != rstrip(*tc.expected_stdout))
            report.failed_cases.push_back({tc.name, "stdout mismatch"});
    }

    if (report.failed_cases.empty()) {
        report.pass = true;
    } else {
        report.error_class = ErrorClass::Behavioral;
        std::string d = std::to_string(report.failed_cases.size()) + " of " +
                        std::to_string(tests.size()) + " cases failed";
        for (const auto& fc : report.failed_cases) d += "\n  " + fc.name + ": " + fc.detail;
        report.diagnostics = cap_tail(d);
    }
    return report;
}

VerificationReport verify_module(const std::string& module_text, const DriverSpec& spec,
                                 const std::vector<TestCase>& tests, int timeout_secs) {
    TempDir dir("blockcc-verify");
    std::filesystem::path exe;
    try {
        exe = assemble_link(module_text, build_driver_source(spec, tests), dir);
    } catch (const CompileError& e) {
        if (e.kind() != ErrorKind::Semantic) throw;
        VerificationReport report;
        report.stage = e.detail().rfind("linker:", 0) == 0 ? Stage::Link : Stage::Assemble;
        report.error_class = ErrorClass::Semantic;
        report.diagnostics = cap_tail(e.detail());
        return report;
    }
    return run_tests(exe, tests, timeout_secs);
}

ErrorFeedback feedback_from_report(const VerificationReport& report,
                                   const std::string& module_text, int attempt_number) {
    ErrorFeedback fb;
    fb.error_class = report.error_class;
    fb.diagnostics = cap_tail(report.diagnostics);
    fb.attempt_number = attempt_number;

    // Pull "<file>.s:<line>:" references out of the diagnostics and quote the
    // surrounding assembly.
    std::vector<std::string> lines;
    {
        std::istringstream in(module_text);
        std::string l;
        while (std::getline(in, l)) lines.push_back(l);
    }
    std::vector<size_t> hits;
    const std::string& d = report.diagnostics;
    for (size_t at = d.find(".s:"); at != std::string::npos; at = d.find(".s:", at + 3)) {
        size_t num = at + 3;
        size_t end = num;
        while (end < d.size() && isdigit((unsigned char)d[end])) end++;
        if (end > num) hits.push_back(strtoull(d.substr(num, end - num).c_str(), nullptr, 10));
    }
    std::string excerpt;
    for (size_t lineno : hits) {
        if (lineno == 0 || lineno > lines.size()) continue;
        size_t lo = lineno > 2 ? lineno - 2 : 1;
        size_t hi = std::min(lines.size(), lineno + 2);
        for (size_t n = lo; n <= hi; n++)
            excerpt += std::to_string(n) + ": " + lines[n - 1] + "\n";
        excerpt += "\n";
    }
    fb.excerpt = cap_tail(excerpt, 2000);
    return fb;
}

namespace {

struct TypeToken {
    const char* word;
    TypeKind kind;
};

const TypeToken kTypeTokens[] = {
    {"char", TypeKind::Char},     {"uchar", TypeKind::UChar}, {"short", TypeKind::Short},
    {"ushort", TypeKind::UShort}, {"int", TypeKind::Int},     {"uint", TypeKind::UInt},
    {"long", TypeKind::Long},     {"ulong", TypeKind::ULong}, {"float", TypeKind::Float},
    {"double", TypeKind::Double},
};

TypeKind parse_value_type(const std::string& word) {
    for (const auto& t : kTypeTokens)
        if (word == t.word) return t.kind;
    fail(ErrorKind::Harness, "test file: unknown type '" + word + "'");
}

const char* value_type_name(TypeKind k) {
    for (const auto& t : kTypeTokens)
        if (k == t.kind) return t.word;
    fail(ErrorKind::Harness, "test file: unprintable type");
}

TypedValue parse_typed_value(const std::string& type_word, const std::string& value_word) {
    TypeKind k = parse_value_type(type_word);
    if (is_float(k)) return make_typed_float(k, strtod(value_word.c_str(), nullptr));
    if (is_signed_integer(k) || value_word[0] == '-')
        return make_typed_int(k, strtoll(value_word.c_str(), nullptr, 0));
    return make_typed_int(k, int64_t(strtoull(value_word.c_str(), nullptr, 0)));
}

}  // namespace

std::vector<TestDoc> parse_test_file(const std::string& text) {
    std::vector<TestDoc> docs;
    TestDoc* doc = nullptr;
    TestCase* tc = nullptr;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto bad = [&](const std::string& why) {
        fail(ErrorKind::Harness, "test file line " + std::to_string(lineno) + ": " + why);
    };
    while (std::getline(in, line)) {
        lineno++;
        std::istringstream ls(line);
        std::string word;
        if (!(ls >> word) || word[0] == '#') continue;
        if (word == "function") {
            docs.emplace_back();
            doc = &docs.back();
            tc = nullptr;
            if (!(ls >> doc->fn_name)) bad("function needs a name");
        } else if (word == "case") {
            if (!doc) bad("case before function");
            doc->cases.emplace_back();
            tc = &doc->cases.back();
            if (!(ls >> tc->name)) bad("case needs a name");
        } else if (word == "arg") {
            std::string t, v;
            if (!tc || !(ls >> t >> v)) bad("arg needs: arg <type> <value>");
            tc->args.push_back(parse_typed_value(t, v));
        } else if (word == "ret") {
            std::string t, v;
            if (!tc || !(ls >> t >> v)) bad("ret needs: ret <type> <value>");
            tc->expected_return = parse_typed_value(t, v);
            if (value_is_float(*tc->expected_return) && tc->comparison.exact)
                tc->comparison = {false, 1e-9};
        } else if (word == "tol") {
            double eps;
            if (!tc || !(ls >> eps)) bad("tol needs an epsilon");
            tc->comparison = {false, eps};
        } else if (word == "exact") {
            if (!tc) bad("exact before case");
            tc->comparison = {true, 0.0};
        } else if (word == "global") {
            std::string n, t, v;
            if (!tc || !(ls >> n >> t >> v)) bad("global needs: global <name> <type> <value>");
            tc->expected_globals.emplace_back(n, parse_typed_value(t, v));
        } else if (word == "out") {
            if (!tc) bad("out before case");
            std::string rest;
            std::getline(ls, rest);
            if (!rest.empty() && rest[0] == ' ') rest = rest.substr(1);
            if (tc->expected_stdout)
                *tc->expected_stdout += "\n" + rest;
            else
                tc->expected_stdout = rest;
        } else {
            bad("unknown directive '" + word + "'");
        }
    }
    for (const auto& d : docs)
        for (const auto& c : d.cases)
            if (!c.expected_return && !c.expected_stdout && c.expected_globals.empty())
                fail(ErrorKind::Harness, "test file: case " + c.name + " has no expectations");
    return docs;
}

std::string serialize_test_docs(const std::vector<TestDoc>& docs) {
    std::string out;
    auto value_words = [](const TypedValue& v) {
        return std::string(value_type_name(v.type->kind)) + " " + format_typed_value(v);
    };
    for (const auto& doc : docs) {
        out += "function " + doc.fn_name + "\n";
        for (const auto& tc : doc.cases) {
            out += "case " + tc.name + "\n";
            for (const auto& a : tc.args) out += "arg " + value_words(a) + "\n";
            if (tc.expected_return) out += "ret " + value_words(*tc.expected_return) + "\n";
            bool is_float_ret = tc.expected_return && value_is_float(*tc.expected_return);
            if (!tc.comparison.exact) {
                if (!is_float_ret || tc.comparison.epsilon != 1e-9) {
                    char buf[32];
                    snprintf(buf, sizeof buf, "%g", tc.comparison.epsilon);
                    out += std::string("tol ") + buf + "\n";
                }
            } else if (is_float_ret) {
                out += "exact\n";
            }
            for (const auto& [n, v] : tc.expected_globals)
                out += "global " + n + " " + value_words(v) + "\n";
            if (tc.expected_stdout) {
                std::istringstream ls(*tc.expected_stdout);
                std::string l;
                while (std::getline(ls, l)) out += "out " + l + "\n";
            }
        }
        out += "\n";
    }
    return out;
}

}  // namespace blockcc
