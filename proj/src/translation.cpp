#include "blockcc/translation.hpp"

#include <cctype>
#include <chrono>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace blockcc {

const char* translate_mode_name(TranslateMode m) {
    switch (m) {
        case TranslateMode::Direct: return "direct";
        case TranslateMode::Workflow: return "workflow";
        case TranslateMode::LegoPart: return "lego-part";
    }
    return "?";
}

namespace {

bool is_label_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' ||
           c == '$';
}

std::string_view trimmed(std::string_view s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

// 1f / 2b style references to GNU numeric local labels.
bool numeric_local_ref(std::string_view s) {
    if (s.size() < 2) return false;
    char last = s.back();
    if (last != 'f' && last != 'b') return false;
    return all_digits(s.substr(0, s.size() - 1));
}

}  // namespace

LabelScan scan_labels(const std::string& text) {
    LabelScan scan;
    std::istringstream in(text);
    std::string raw;
    while (std::getline(in, raw)) {
        std::string_view line = trimmed(raw);
        if (line.empty() || line[0] == '#') continue;

        // Label definition: <name>: possibly followed by nothing else.
        size_t colon = line.find(':');
        if (colon != std::string_view::npos) {
            std::string_view head = line.substr(0, colon);
            bool label_like = !head.empty();
            for (char c : head)
                if (!is_label_char(c)) label_like = false;
            if (label_like && trimmed(line.substr(colon + 1)).empty()) {
                if (all_digits(head)) continue;  // numeric local label
                std::string name(head);
                if (!scan.defined.insert(name).second) scan.duplicates.push_back(name);
                continue;
            }
        }

        // Jump instructions reference labels; call targets are symbols, and
        // indirect jumps through registers have no label operand.
        size_t sp = line.find_first_of(" \t");
        if (sp == std::string_view::npos) continue;
        std::string_view mnemonic = line.substr(0, sp);
        if (mnemonic.empty() || mnemonic[0] != 'j') continue;
        std::string_view target = trimmed(line.substr(sp + 1));
        if (target.empty() || target[0] == '*' || target[0] == '%') continue;
        if (numeric_local_ref(target) || all_digits(target)) continue;
        scan.required.insert(std::string(target));
    }
    return scan;
}

AssemblyFragment make_fragment(std::string text) {
    AssemblyFragment frag;
    frag.text = std::move(text);
    LabelScan scan = scan_labels(frag.text);
    frag.defined_labels = std::move(scan.defined);
    for (const auto& l : scan.required)
        if (!frag.defined_labels.count(l)) frag.required_labels.insert(l);
    return frag;
}

AssemblyFragment translate(const TranslationRequest& req, Backend& backend) {
    if (req.mode == TranslateMode::LegoPart) {
        if (!req.part_context)
            fail(ErrorKind::Config, "lego-part request without part context");
        if (req.part && req.part->kind != PartKind::SourceBlock)
            return structural_fragment(*req.part);
    } else if (req.part_context) {
        fail(ErrorKind::Config, "part context outside lego-part mode");
    }
    AssemblyFragment frag = backend.translate_request(req);
    if (req.mode != TranslateMode::LegoPart && trimmed(frag.text).empty())
        fail(ErrorKind::EmptyOutput,
             std::string("backend ") + backend.name() + " returned no assembly");
    return frag;
}

// ---------------------------------------------------------------------------
// Prompt assembly

namespace {

const char* DIRECT_EXAMPLE_C = R"(int add_one(int x) {
    return x + 1;
})";

const char* DIRECT_EXAMPLE_ASM = R"(	pushq %rbp
	movq %rsp, %rbp
	subq $16, %rsp
	movl %edi, -4(%rbp)
	movslq -4(%rbp), %rax
	cltq
	pushq %rax
	movq $1, %rax
	movq %rax, %rcx
	popq %rax
	addq %rcx, %rax
	cltq
	jmp .L_add_one__epilogue
.L_add_one__epilogue:
	leave
	ret)";

const char* PART_EXAMPLE_C = "s = s + i;";

const char* PART_EXAMPLE_ASM = R"(	movslq -4(%rbp), %rax
	pushq %rax
	movslq -8(%rbp), %rax
	movq %rax, %rcx
	popq %rax
	addq %rcx, %rax
	cltq
	movl %eax, -4(%rbp))";

}  // namespace

std::string build_prompt(const TranslationRequest& req) {
    std::ostringstream p;
    p << "You are a compiler. Translate the C code at the end of this message to "
         "x86-64 assembly in AT&T syntax for the GNU assembler.\n\n";

    switch (req.mode) {
        case TranslateMode::Direct:
        case TranslateMode::Workflow:
            p << "Translate the whole function body, including the standard frame "
                 "prologue (pushq %rbp; movq %rsp, %rbp; subq for the frame) and a "
                 "single epilogue label followed by leave; ret. Return statements "
                 "jump to the epilogue label.\n";
            break;
        case TranslateMode::LegoPart:
            p << "Translate ONLY the given code block. It is one piece of a larger "
                 "function that is assembled by concatenation. Do NOT emit a "
                 "prologue, an epilogue, or a function label. Do not invent new "
                 "labels for control flow outside the block; the jump targets "
                 "listed in the context already exist elsewhere in the "
                 "function.\n";
            break;
    }

    p << "\nRules:\n"
         "- Locals live at fixed offsets from %rbp; the symbol table below maps "
         "each variable to its offset and type. Do not allocate new stack slots.\n"
         "- Globals are addressed %rip-relative: name(%rip).\n"
         "- Keep every integer value canonically extended in its 64-bit "
         "register: sign-extend signed types, zero-extend unsigned types after "
         "each operation that narrows.\n"
         "- Never emit a compare with two immediate operands; the assembler "
         "rejects `cmp $a, $b`. Load one side into a register first.\n"
         "- An immediate must fit the destination width; wider constants go "
         "through movabsq into a register.\n";
    if (req.flags.numerical)
        p << "- Floating-point values travel in %xmm0; use SSE scalar "
             "instructions (movss/movsd, cvtsi2sd, ucomisd). Remember that "
             "ucomisd sets PF on NaN: equality needs setnp, inequality setp.\n";
    if (req.flags.order)
        p << "- Evaluate operands strictly left to right, spilling intermediate "
             "values to the stack with pushq rather than extra registers.\n";
    if (req.flags.long_fn && req.mode != TranslateMode::LegoPart)
        p << "- The function is long; keep the translation mechanical and do not "
             "reorder statements.\n";

    p << "\nExample:\n```c\n";
    if (req.mode == TranslateMode::LegoPart)
        p << PART_EXAMPLE_C;
    else
        p << DIRECT_EXAMPLE_C;
    p << "\n```\n```asm\n";
    if (req.mode == TranslateMode::LegoPart)
        p << PART_EXAMPLE_ASM << "\n";
    else
        p << DIRECT_EXAMPLE_ASM << "\n";
    p << "```\n(the example symbol table maps x and s to -4(%rbp) and i to "
         "-8(%rbp); your offsets are below)\n";

    if (req.symbol_table) p << "\nSymbol table:\n" << req.symbol_table->serialize();

    if (req.mode == TranslateMode::LegoPart && req.part_context) {
        const PartContext& pc = *req.part_context;
        p << "\nBlock context:\n";
        p << "- part id: " << pc.part_id << "\n";
        if (!pc.preceding_labels.empty()) {
            p << "- labels directly above this block:";
            for (const auto& l : pc.preceding_labels) p << " " << l;
            p << "\n";
        }
        p << "- loop depth: " << pc.loop_depth << "\n";
        if (req.part) {
            if (!req.part->break_stack.empty())
                p << "- break jumps to: " << req.part->break_stack.back() << "\n";
            if (!req.part->continue_stack.empty())
                p << "- continue jumps to: " << req.part->continue_stack.back() << "\n";
            if (req.part->role == "cmp")
                p << "- this block is a loop/branch condition: leave the value in "
                     "%rax (0 or nonzero); the jump that consumes it is emitted "
                     "elsewhere\n";
            if (req.part->role == "expr")
                p << "- this block is a switch scrutinee: leave the promoted value "
                     "in %rax; the case dispatch is emitted elsewhere\n";
        }
    }

    p << "\nC code to translate:\n```c\n" << req.source << "\n```\n";

    if (req.feedback && req.feedback->error_class != ErrorClass::None) {
        const ErrorFeedback& fb = *req.feedback;
        p << "\nYour previous attempt (attempt " << fb.attempt_number
          << ") failed verification.\n";
        p << "Error class: " << error_class_name(fb.error_class) << "\n";
        if (!fb.diagnostics.empty()) p << "Diagnostics:\n" << fb.diagnostics << "\n";
        if (!fb.excerpt.empty())
            p << "The failing output was:\n```asm\n" << fb.excerpt << "\n```\n";
        p << "Fix the problem and translate again.\n";
    }

    p << "\nReply with exactly one fenced code block containing only the "
         "assembly.\n";
    return p.str();
}

AssemblyFragment extract_assembly(const std::string& raw) {
    size_t pos = 0;
    std::string last;
    bool found = false;
    while (true) {
        size_t open = raw.find("```", pos);
        if (open == std::string::npos) break;
        size_t line_end = raw.find('\n', open);
        if (line_end == std::string::npos) break;
        size_t close = raw.find("```", line_end);
        if (close == std::string::npos) break;
        last = raw.substr(line_end + 1, close - line_end - 1);
        found = true;
        pos = close + 3;
    }
    if (!found)
        fail(ErrorKind::Extraction, "reply contains no fenced code block");
    return make_fragment(std::move(last));
}

// ---------------------------------------------------------------------------
// Backends

namespace {

class RefBackend : public Backend {
  public:
    std::string name() const override { return "ref"; }

    AssemblyFragment translate_request(const TranslationRequest& req) override {
        if (!req.fn || !req.symbol_table)
            fail(ErrorKind::Config,
                 "reference backend needs the function and its symbol table");
        if (req.mode == TranslateMode::LegoPart) {
            if (!req.part)
                fail(ErrorKind::Config, "reference backend needs the part handle");
            return ref_translate_part(*req.part, *req.fn, *req.symbol_table, req.module);
        }
        return ref_translate_function(*req.fn, *req.symbol_table, req.module);
    }
};

class LlmBackend : public Backend {
  public:
    explicit LlmBackend(LlmConfig cfg) : cfg_(std::move(cfg)) {
        if (cfg_.endpoint.empty())
            fail(ErrorKind::Config, "llm backend needs an endpoint (BLOCKCC_LLM_URL)");
        split_endpoint();
    }

    std::string name() const override { return "llm"; }

    AssemblyFragment translate_request(const TranslationRequest& req) override {
        std::string prompt = build_prompt(req);
        nlohmann::json body = {
            {"model", cfg_.model},
            {"temperature", 0},
            {"messages",
             nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
        };
        std::string payload = body.dump();

        std::string err;
        for (int attempt = 0; attempt < cfg_.transport_retries; ++attempt) {
            if (attempt)
                std::this_thread::sleep_for(std::chrono::seconds(1 << (attempt - 1)));
            httplib::Client client(base_);
            client.set_connection_timeout(cfg_.timeout_secs);
            client.set_read_timeout(cfg_.timeout_secs);
            httplib::Headers headers;
            if (!cfg_.api_key.empty())
                headers.emplace("Authorization", "Bearer " + cfg_.api_key);
            auto res = client.Post(path_, headers, payload, "application/json");
            if (!res) {
                err = "transport error: " + httplib::to_string(res.error());
                continue;
            }
            if (res->status < 200 || res->status >= 300) {
                err = "http " + std::to_string(res->status) + ": " +
                      cap_tail(res->body, 500);
                if (res->status >= 400 && res->status < 500 && res->status != 429) break;
                continue;
            }
            return parse_reply(res->body);
        }
        fail(ErrorKind::Backend, "llm request failed: " + err);
    }

  private:
    void split_endpoint() {
        size_t scheme = cfg_.endpoint.find("://");
        size_t path_start = scheme == std::string::npos
                                ? cfg_.endpoint.find('/')
                                : cfg_.endpoint.find('/', scheme + 3);
        if (path_start == std::string::npos) {
            base_ = cfg_.endpoint;
            path_ = "/v1/chat/completions";
        } else {
            base_ = cfg_.endpoint.substr(0, path_start);
            path_ = cfg_.endpoint.substr(path_start);
        }
    }

    AssemblyFragment parse_reply(const std::string& body) {
        nlohmann::json j = nlohmann::json::parse(body, nullptr, false);
        if (j.is_discarded())
            fail(ErrorKind::Backend, "llm reply is not valid json");
        if (!j.contains("choices") || j["choices"].empty())
            fail(ErrorKind::Backend, "llm reply has no choices");
        const auto& msg = j["choices"][0];
        std::string content;
        if (msg.contains("message") && msg["message"].contains("content"))
            content = msg["message"]["content"].get<std::string>();
        else if (msg.contains("text"))
            content = msg["text"].get<std::string>();
        else
            fail(ErrorKind::Backend, "llm reply has no message content");
        return extract_assembly(content);
    }

    LlmConfig cfg_;
    std::string base_;
    std::string path_;
};

class FaultBackend : public Backend {
  public:
    explicit FaultBackend(int bad_attempts) : bad_attempts_(bad_attempts) {}

    std::string name() const override { return "fault"; }

    AssemblyFragment translate_request(const TranslationRequest& req) override {
        AssemblyFragment frag = inner_.translate_request(req);
        int seen = req.feedback ? req.feedback->attempt_number : 0;
        bool diag_seen =
            req.feedback && req.feedback->diagnostics.find("cmp") != std::string::npos;
        bool sabotage;
        if (bad_attempts_ < 0)
            sabotage = true;
        else if (bad_attempts_ == 0)
            sabotage = false;
        else
            sabotage = seen < bad_attempts_ || !diag_seen;
        if (sabotage) {
            std::string text = frag.text;
            if (!text.empty() && text.back() != '\n') text += '\n';
            text += "\tcmpl $1, $2\n";
            return make_fragment(std::move(text));
        }
        return frag;
    }

  private:
    RefBackend inner_;
    int bad_attempts_;
};

}  // namespace

std::unique_ptr<Backend> make_ref_backend() { return std::make_unique<RefBackend>(); }

LlmConfig llm_config_from_env() {
    LlmConfig cfg;
    if (const char* v = std::getenv("BLOCKCC_LLM_URL")) cfg.endpoint = v;
    if (const char* v = std::getenv("BLOCKCC_LLM_API_KEY")) cfg.api_key = v;
    if (const char* v = std::getenv("BLOCKCC_LLM_MODEL")) cfg.model = v;
    return cfg;
}

std::unique_ptr<Backend> make_llm_backend(LlmConfig config) {
    return std::make_unique<LlmBackend>(std::move(config));
}

std::unique_ptr<Backend> make_fault_backend(int bad_attempts) {
    return std::make_unique<FaultBackend>(bad_attempts);
}

std::unique_ptr<Backend> make_broken_backend() {
    return std::make_unique<FaultBackend>(-1);
}

}  // namespace blockcc
