#include <doctest.h>

#include "blockcc/translation.hpp"

#include <memory>

#include "blockcc/diag.hpp"
#include "blockcc/parser.hpp"
#include "blockcc/printer.hpp"
#include "blockcc/sema.hpp"
#include "support/refcompile.hpp"

using namespace blockcc;
using namespace blockcc::testsupport;

namespace {

// Backend that records every request it sees and replies with a fixed text.
class ScriptedBackend : public Backend {
  public:
    explicit ScriptedBackend(std::string reply) : reply_(std::move(reply)) {}
    std::string name() const override { return "scripted"; }
    AssemblyFragment translate_request(const TranslationRequest& req) override {
        ++calls;
        last_mode = req.mode;
        return make_fragment(reply_);
    }
    int calls = 0;
    TranslateMode last_mode = TranslateMode::Direct;

  private:
    std::string reply_;
};

struct Fixture {
    Ast ast;
    const FunctionDef* fn = nullptr;
    SymbolTable table;
    std::vector<ControlPart> parts;

    explicit Fixture(const std::string& src, bool split = false) {
        ast = parse_and_analyze(src);
        fn = &ast.functions.at(0);
        table = frame_for(*fn, map_globals(ast.globals));
        if (split) parts = split_parts(*fn, SplitConfig{}, always_split_policy());
    }

    TranslationRequest request(TranslateMode mode) const {
        TranslationRequest req;
        req.mode = mode;
        req.source = print_function(*fn);
        req.symbol_table = &table;
        req.fn = fn;
        req.module = &ast;
        return req;
    }
};

const char* SIMPLE_SRC = R"(
int addsub(int a, int b) {
    int s = a + b;
    s = s - 1;
    return s;
}
)";

const char* LOOP_SRC = R"(
int total(int n) {
    int s = 0;
    int i;
    for (i = 0; i < n; i = i + 1) {
        s = s + i;
    }
    return s;
}
)";

const ControlPart& part_with_kind(const std::vector<ControlPart>& parts, PartKind kind) {
    for (const auto& p : parts)
        if (p.kind == kind) return p;
    REQUIRE(false);
    return parts.front();
}

}  // namespace

TEST_SUITE_BEGIN("translation");

TEST_CASE("scan_labels separates definitions from jump requirements") {
    LabelScan s = scan_labels(
        "\tmovq %rdi, %rax\n"
        ".L_f__t0:\n"
        "\ttestq %rax, %rax\n"
        "\tjz .L_f__end\n"
        "\tjmp .L_f__t0\n"
        ".L_f__end:\n");
    CHECK(s.defined == std::set<std::string>{".L_f__t0", ".L_f__end"});
    CHECK(s.required == std::set<std::string>{".L_f__t0", ".L_f__end"});
    CHECK(s.duplicates.empty());
}

TEST_CASE("scan_labels reports duplicate definitions") {
    LabelScan s = scan_labels(".L_a:\n\tnop\n.L_a:\n");
    REQUIRE(s.duplicates.size() == 1);
    CHECK(s.duplicates[0] == ".L_a");
}

TEST_CASE("scan_labels ignores numeric local labels") {
    LabelScan s = scan_labels(
        "1:\n"
        "\taddq %rcx, %rax\n"
        "\tjns 1b\n"
        "\tjmp 2f\n"
        "2:\n"
        "\tjmp .L_real\n");
    CHECK(s.defined == std::set<std::string>{});
    CHECK(s.required == std::set<std::string>{".L_real"});
}

TEST_CASE("scan_labels treats call targets and indirect jumps as external") {
    LabelScan s = scan_labels(
        "\tcall helper\n"
        "\tjmp *%rax\n"
        "\tjmp *table(%rip)\n");
    CHECK(s.defined.empty());
    CHECK(s.required.empty());
}

TEST_CASE("make_fragment drops self-defined labels from the requirements") {
    AssemblyFragment f = make_fragment(
        ".L_loop:\n"
        "\tdecq %rax\n"
        "\tjnz .L_loop\n"
        "\tjz .L_out\n");
    CHECK(f.defined_labels == std::set<std::string>{".L_loop"});
    CHECK(f.required_labels == std::set<std::string>{".L_out"});
}

TEST_CASE("extract_assembly takes the body of a single fenced block") {
    AssemblyFragment f = extract_assembly(
        "Here is the translation:\n"
        "```asm\n"
        "\tmovq %rdi, %rax\n"
        "\tret\n"
        "```\n"
        "Done.\n");
    CHECK(f.text == "\tmovq %rdi, %rax\n\tret\n");
}

TEST_CASE("extract_assembly keeps the last block when several appear") {
    AssemblyFragment f = extract_assembly(
        "First try:\n"
        "```\n\tmovq $1, %rax\n```\n"
        "Actually, corrected:\n"
        "```\n\tmovq $2, %rax\n```\n");
    CHECK(f.text == "\tmovq $2, %rax\n");
}

TEST_CASE("extract_assembly without any fenced block is an extraction error") {
    try {
        extract_assembly("no code here, sorry");
        FAIL("expected CompileError");
    } catch (const CompileError& e) {
        CHECK(e.kind() == ErrorKind::Extraction);
    }
}

TEST_CASE("extract_assembly ignores an unterminated fence") {
    AssemblyFragment f = extract_assembly(
        "```\n\tmovq $7, %rax\n```\ntrailing prose with ``` opener\n");
    CHECK(f.text == "\tmovq $7, %rax\n");
}

TEST_CASE("build_prompt is deterministic and carries the request verbatim") {
    Fixture fx(SIMPLE_SRC);
    TranslationRequest req = fx.request(TranslateMode::Direct);
    std::string a = build_prompt(req);
    std::string b = build_prompt(req);
    CHECK(a == b);
    CHECK(a.find(req.source) != std::string::npos);
    CHECK(a.find(fx.table.serialize()) != std::string::npos);
    CHECK(a.find("two immediate operands") != std::string::npos);
    CHECK(a.find("exactly one fenced code block") != std::string::npos);
}

TEST_CASE("build_prompt mentions the mode and flag-conditioned guidance") {
    Fixture fx(SIMPLE_SRC);
    TranslationRequest req = fx.request(TranslateMode::Direct);
    std::string base = build_prompt(req);
    CHECK(base.find("Translate the whole function") != std::string::npos);
    CHECK(base.find("NaN") == std::string::npos);

    req.flags.numerical = true;
    std::string numeric = build_prompt(req);
    CHECK(numeric.find("NaN") != std::string::npos);

    req.flags.numerical = false;
    req.flags.order = true;
    std::string ordered = build_prompt(req);
    CHECK(ordered.find("left to right") != std::string::npos);
}

TEST_CASE("build_prompt embeds the previous attempt's feedback verbatim") {
    Fixture fx(SIMPLE_SRC);
    TranslationRequest req = fx.request(TranslateMode::Direct);
    ErrorFeedback fb;
    fb.error_class = ErrorClass::Semantic;
    fb.diagnostics = "Error: operand type mismatch for `cmp'";
    fb.excerpt = "\tcmpl $1, $2";
    fb.attempt_number = 2;
    req.feedback = fb;
    std::string p = build_prompt(req);
    CHECK(p.find(fb.diagnostics) != std::string::npos);
    CHECK(p.find(fb.excerpt) != std::string::npos);
    CHECK(p.find("attempt 2") != std::string::npos);
}

TEST_CASE("build_prompt describes the lego part contract") {
    Fixture fx(LOOP_SRC, true);
    const ControlPart& cmp = part_with_kind(fx.parts, PartKind::SourceBlock);
    TranslationRequest req = fx.request(TranslateMode::LegoPart);
    req.source = cmp.payload;
    req.part = &cmp;
    req.part_context = PartContext{cmp.id, cmp.head_labels, cmp.loop_depth};
    std::string p = build_prompt(req);
    CHECK(p.find("part") != std::string::npos);
    CHECK(p.find("%rax") != std::string::npos);
}

TEST_CASE("translate rejects lego requests without part context") {
    Fixture fx(SIMPLE_SRC);
    ScriptedBackend be("\tret\n");
    TranslationRequest req = fx.request(TranslateMode::LegoPart);
    try {
        translate(req, be);
        FAIL("expected CompileError");
    } catch (const CompileError& e) {
        CHECK(e.kind() == ErrorKind::Config);
    }
    CHECK(be.calls == 0);
}

TEST_CASE("translate rejects part context outside lego mode") {
    Fixture fx(SIMPLE_SRC);
    ScriptedBackend be("\tret\n");
    TranslationRequest req = fx.request(TranslateMode::Direct);
    req.part_context = PartContext{0, {}, 0};
    CHECK_THROWS_AS(translate(req, be), CompileError);
    CHECK(be.calls == 0);
}

TEST_CASE("label and jump parts never reach the backend") {
    Fixture fx(LOOP_SRC, true);
    ScriptedBackend be("\tnop\n");
    int structural = 0;
    for (const auto& part : fx.parts) {
        if (part.kind == PartKind::SourceBlock) continue;
        ++structural;
        TranslationRequest req = fx.request(TranslateMode::LegoPart);
        req.source = part.payload;
        req.part = &part;
        req.part_context = PartContext{part.id, part.head_labels, part.loop_depth};
        AssemblyFragment f = translate(req, be);
        CHECK(!f.text.empty());
    }
    CHECK(structural >= 3);
    CHECK(be.calls == 0);
}

TEST_CASE("structural fragments spell out the jump shape") {
    Fixture fx(LOOP_SRC, true);
    const ControlPart& label = part_with_kind(fx.parts, PartKind::Label);
    AssemblyFragment lf = structural_fragment(label);
    CHECK(lf.text == label.payload + ":\n");
    CHECK(lf.defined_labels.count(label.payload) == 1);

    const ControlPart& cj = part_with_kind(fx.parts, PartKind::CondJump);
    AssemblyFragment cf = structural_fragment(cj);
    CHECK(cf.text.find("testq %rax, %rax") != std::string::npos);
    CHECK(cf.required_labels.count(cj.payload) == 1);

    const ControlPart& uj = part_with_kind(fx.parts, PartKind::UncondJump);
    AssemblyFragment uf = structural_fragment(uj);
    CHECK(uf.text == "\tjmp " + uj.payload + "\n");
}

TEST_CASE("empty backend output fails whole-function requests") {
    Fixture fx(SIMPLE_SRC);
    ScriptedBackend be("");
    TranslationRequest req = fx.request(TranslateMode::Direct);
    try {
        translate(req, be);
        FAIL("expected CompileError");
    } catch (const CompileError& e) {
        CHECK(e.kind() == ErrorKind::EmptyOutput);
    }
}

TEST_CASE("reference backend translates whole functions and parts") {
    Fixture fx(LOOP_SRC, true);
    std::unique_ptr<Backend> ref = make_ref_backend();

    TranslationRequest whole = fx.request(TranslateMode::Direct);
    AssemblyFragment wf = translate(whole, *ref);
    CHECK(wf.text.find("pushq %rbp") != std::string::npos);
    CHECK(wf.text.find("ret") != std::string::npos);

    const ControlPart& cmp = part_with_kind(fx.parts, PartKind::SourceBlock);
    TranslationRequest preq = fx.request(TranslateMode::LegoPart);
    preq.source = cmp.payload;
    preq.part = &cmp;
    preq.part_context = PartContext{cmp.id, cmp.head_labels, cmp.loop_depth};
    AssemblyFragment pf = translate(preq, *ref);
    CHECK(pf.text.find("pushq %rbp") == std::string::npos);
}

TEST_CASE("fault backend corrects only after its diagnostic is fed back") {
    Fixture fx(SIMPLE_SRC);
    std::unique_ptr<Backend> fault = make_fault_backend(1);
    TranslationRequest req = fx.request(TranslateMode::Direct);

    AssemblyFragment first = fault->translate_request(req);
    CHECK(first.text.find("cmpl $1, $2") != std::string::npos);

    ErrorFeedback fb;
    fb.error_class = ErrorClass::Semantic;
    fb.diagnostics = "module.s: Error: operand type mismatch for `cmp'";
    fb.attempt_number = 1;
    req.feedback = fb;
    AssemblyFragment second = fault->translate_request(req);
    CHECK(second.text.find("cmpl $1, $2") == std::string::npos);

    req.feedback->diagnostics = "something unrelated";
    AssemblyFragment still_bad = fault->translate_request(req);
    CHECK(still_bad.text.find("cmpl $1, $2") != std::string::npos);
}

TEST_CASE("broken backend never recovers") {
    Fixture fx(SIMPLE_SRC);
    std::unique_ptr<Backend> broken = make_broken_backend();
    TranslationRequest req = fx.request(TranslateMode::Direct);
    ErrorFeedback fb;
    fb.diagnostics = "Error: operand type mismatch for `cmp'";
    fb.attempt_number = 10;
    req.feedback = fb;
    AssemblyFragment f = broken->translate_request(req);
    CHECK(f.text.find("cmpl $1, $2") != std::string::npos);
}

TEST_CASE("llm backend construction requires an endpoint") {
    LlmConfig cfg;
    cfg.model = "test";
    CHECK_THROWS_AS(make_llm_backend(cfg), CompileError);
}

TEST_SUITE_END();
