#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "blockcc/rebuild.hpp"
#include "blockcc/splitter.hpp"
#include "blockcc/translation.hpp"
#include "blockcc/verify.hpp"

namespace blockcc {

struct PipelineConfig {
    TranslateMode mode = TranslateMode::LegoPart;
    int max_retries = 5;
    int split_threshold = 400;
    int expr_complexity_limit = 16;
    int timeout_secs = 10;
};

struct AttemptRecord {
    int attempt = 1;
    std::string module_text;
    VerificationReport report;
};

struct RepairOutcome {
    std::string module_text;  // from the last attempt
    int attempts = 0;
    std::vector<AttemptRecord> trail;
};

/// Thrown after k failing repair attempts; carries the full attempt trail.
class RepairExhausted : public CompileError {
  public:
    RepairExhausted(int k, RepairOutcome o)
        : CompileError(ErrorKind::ExhaustedRetries,
                       "no passing translation after " + std::to_string(k) + " attempts"),
          outcome(std::move(o)) {}
    RepairOutcome outcome;
};

/// The repair engine: build a module (receiving feedback from the previous
/// failing attempt), verify it, retry up to k times. Backend and extraction
/// failures count as failed attempts with semantic feedback; infrastructure
/// errors (Config, Harness, Internal, ...) propagate immediately.
RepairOutcome repair_rounds(
    const std::function<std::string(const std::optional<ErrorFeedback>&)>& build,
    const DriverSpec& spec, const std::vector<TestCase>& tests, int k,
    int timeout_secs = 10);

/// Whole-function repair loop: each round translates `req` through the
/// backend, rebuilds, wraps the result in a module with the table's globals,
/// and verifies. Lego-mode requests go through the pipeline instead.
RepairOutcome repair_loop(const TranslationRequest& req, Backend& backend,
                          const DriverSpec& spec, const std::vector<TestCase>& tests,
                          int k, int timeout_secs = 10);

/// One function readied for translation. `parts` is nonempty when the
/// function goes through split/rebuild; otherwise it is translated whole.
struct PreparedFunction {
    size_t fn_index = 0;
    std::string source;
    SymbolTable table;
    FeatureFlags flags;
    std::vector<ControlPart> parts;
};

struct PreparedModule {
    Ast ast;
    std::string source;  // printed form of `ast`
    std::vector<GlobalPlan> globals;
    std::vector<PreparedFunction> functions;
};

/// Frontend plus mode-specific preparation. Direct mode uses the module as
/// parsed; workflow and lego modes rename and decompose each function, then
/// reparse the printed result so the prepared source and the AST agree. Lego
/// mode additionally splits composable goto-free functions (split integrity
/// verified); functions that cannot split fall back to whole-function
/// translation.
PreparedModule prepare_module(const std::string& source, const PipelineConfig& cfg);

/// One translation pass over every prepared function.
std::string build_module_once(const PreparedModule& prepared, const PipelineConfig& cfg,
                              Backend& backend,
                              const std::optional<ErrorFeedback>& feedback);

struct PipelineResult {
    bool pass = false;
    int attempts = 0;
    std::string module_text;
    std::string prepared_source;
    VerificationReport last_report;
    std::vector<AttemptRecord> trail;
};

/// Full pipeline: prepare, then repair-loop translate/rebuild/verify against
/// the tests for `fn_name`. Never throws for translation or verification
/// failures; those end up in the result. Frontend and infrastructure errors
/// propagate as CompileError.
PipelineResult pipeline_compile(const std::string& source, const std::string& fn_name,
                                const std::vector<TestCase>& tests,
                                const PipelineConfig& cfg, Backend& backend);

/// pass=0, behavioral=1, semantic=2, runtime=3, infrastructure=4.
int exit_code_for(const PipelineResult& result);
int exit_code_for(ErrorKind kind);

}  // namespace blockcc
