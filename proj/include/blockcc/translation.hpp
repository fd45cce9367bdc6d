#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "blockcc/ast.hpp"
#include "blockcc/features.hpp"
#include "blockcc/splitter.hpp"
#include "blockcc/symtab.hpp"
#include "blockcc/verify.hpp"

namespace blockcc {

enum class TranslateMode { Direct, Workflow, LegoPart };

const char* translate_mode_name(TranslateMode m);

struct PartContext {
    int part_id = -1;
    std::vector<std::string> preceding_labels;
    int loop_depth = 0;
};

struct TranslationRequest {
    TranslateMode mode = TranslateMode::Direct;
    std::string source;
    const SymbolTable* symbol_table = nullptr;
    FeatureFlags flags;
    std::optional<PartContext> part_context;  // required in lego-part mode
    std::optional<ErrorFeedback> feedback;

    // AST handles for the reference backend; the LLM backend reads only the
    // textual fields above.
    const FunctionDef* fn = nullptr;
    const ControlPart* part = nullptr;
    const Ast* module = nullptr;
};

struct AssemblyFragment {
    std::string text;
    std::set<std::string> defined_labels;
    std::set<std::string> required_labels;
    std::string clobbers_note;
};

struct LabelScan {
    std::set<std::string> defined;
    std::set<std::string> required;
    std::vector<std::string> duplicates;
};

/// Scans assembly text for label definitions (`name:` lines) and jump
/// targets. GNU numeric local labels (1:, 1f, 1b) are ignored; call targets
/// are symbols resolved at link time, not labels, so they are not required.
LabelScan scan_labels(const std::string& text);

/// Wraps text into a fragment with scanned label sets.
AssemblyFragment make_fragment(std::string text);

class Backend {
  public:
    virtual ~Backend() = default;
    virtual std::string name() const = 0;
    virtual AssemblyFragment translate_request(const TranslationRequest& req) = 0;
};

/// Translates a request through the backend. Label and jump parts never reach
/// the backend: their assembly is a deterministic one-liner derived from the
/// part itself. Validates mode invariants and rejects empty backend output.
AssemblyFragment translate(const TranslationRequest& req, Backend& backend);

/// Assembly for Label/CondJump/UncondJump parts. CondJump expects the
/// preceding comparison block to leave the condition value in %rax; dispatch
/// jumps carrying a case value compare %rax against the canonical constant.
AssemblyFragment structural_fragment(const ControlPart& part);

/// Deterministic prompt for the LLM backend: mode instructions, a one-shot
/// example, the serialized symbol table, flag-conditioned knowledge snippets,
/// the source, and verbatim feedback from the previous attempt when present.
std::string build_prompt(const TranslationRequest& req);

/// Takes the last fenced code block of a chat reply. Throws
/// CompileError(Extraction) when the reply has no code block.
AssemblyFragment extract_assembly(const std::string& raw);

// ---------------------------------------------------------------------------
// Reference backend: deterministic unoptimized x86-64 (AT&T syntax) for the
// supported C subset. Locals via offset(%rbp), globals via label(%rip).

AssemblyFragment ref_translate_function(const FunctionDef& fn, const SymbolTable& table,
                                        const Ast* module = nullptr);

AssemblyFragment ref_translate_part(const ControlPart& part, const FunctionDef& fn,
                                    const SymbolTable& table, const Ast* module = nullptr);

std::unique_ptr<Backend> make_ref_backend();

// ---------------------------------------------------------------------------
// LLM backend: HTTP chat-completion endpoint.

struct LlmConfig {
    std::string endpoint;  // e.g. https://host/v1/chat/completions
    std::string api_key;
    std::string model;
    int timeout_secs = 120;
    int transport_retries = 3;
};

/// Reads BLOCKCC_LLM_URL, BLOCKCC_LLM_API_KEY, BLOCKCC_LLM_MODEL.
LlmConfig llm_config_from_env();

std::unique_ptr<Backend> make_llm_backend(LlmConfig config);

// ---------------------------------------------------------------------------
// Fault-injection backends for repair-loop tests. Both delegate to the
// reference backend, then append `cmpl $1, $2` (an instruction the assembler
// rejects) to source-block fragments: the first until the attempt number
// exceeds bad_attempts, the second always.

std::unique_ptr<Backend> make_fault_backend(int bad_attempts);
std::unique_ptr<Backend> make_broken_backend();

}  // namespace blockcc
