#include "blockcc/pipeline.hpp"

#include "blockcc/parser.hpp"
#include "blockcc/printer.hpp"
#include "blockcc/sema.hpp"
#include "blockcc/transforms.hpp"

namespace blockcc {

namespace {

bool retryable(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Backend:
        case ErrorKind::Extraction:
        case ErrorKind::EmptyOutput:
        case ErrorKind::UndefinedLabel:
        case ErrorKind::DuplicateLabel:
        case ErrorKind::ImmediateOverflow:
            return true;
        default:
            return false;
    }
}

VerificationReport report_from_error(const CompileError& e) {
    VerificationReport rep;
    rep.stage = Stage::Assemble;
    rep.pass = false;
    rep.error_class = ErrorClass::Semantic;
    rep.diagnostics = e.what();
    return rep;
}

}  // namespace

RepairOutcome repair_rounds(
    const std::function<std::string(const std::optional<ErrorFeedback>&)>& build,
    const DriverSpec& spec, const std::vector<TestCase>& tests, int k,
    int timeout_secs) {
    if (k < 1) fail(ErrorKind::Config, "max retries must be at least 1");
    RepairOutcome out;
    std::optional<ErrorFeedback> feedback;
    for (int attempt = 1; attempt <= k; ++attempt) {
        std::string module_text;
        VerificationReport rep;
        try {
            module_text = build(feedback);
            rep = verify_module(module_text, spec, tests, timeout_secs);
        } catch (const CompileError& e) {
            if (!retryable(e.kind())) throw;
            rep = report_from_error(e);
        }
        out.attempts = attempt;
        out.module_text = module_text;
        out.trail.push_back({attempt, module_text, rep});
        if (rep.pass) return out;
        feedback = feedback_from_report(rep, module_text, attempt);
    }
    throw RepairExhausted(k, std::move(out));
}

RepairOutcome repair_loop(const TranslationRequest& req, Backend& backend,
                          const DriverSpec& spec, const std::vector<TestCase>& tests,
                          int k, int timeout_secs) {
    if (req.mode == TranslateMode::LegoPart)
        fail(ErrorKind::Config, "repair_loop drives whole-function requests; "
                                "lego mode goes through the pipeline");
    if (!req.fn || !req.symbol_table)
        fail(ErrorKind::Config, "repair_loop needs the function and its symbol table");
    auto build = [&](const std::optional<ErrorFeedback>& fb) {
        TranslationRequest r = req;
        r.feedback = fb;
        AssemblyFragment frag = translate(r, backend);
        std::string text = rebuild_direct(frag, *req.symbol_table);
        return emit_module({{req.fn->name, text}}, req.symbol_table->globals);
    };
    return repair_rounds(build, spec, tests, k, timeout_secs);
}

PreparedModule prepare_module(const std::string& source, const PipelineConfig& cfg) {
    Ast first = canonicalize(parse_source(source));
    analyze_module(first);

    PreparedModule pm;
    if (cfg.mode == TranslateMode::Direct) {
        pm.ast = std::move(first);
    } else {
        Ast staged;
        staged.records = first.records;
        for (const auto& g : first.globals)
            staged.globals.push_back(
                {g.name, g.type, g.init ? clone_expr(*g.init) : nullptr, g.span});
        for (const auto& fn : first.functions) {
            auto [renamed, map] = rename_variables(fn);
            (void)map;
            staged.functions.push_back(
                decompose_complex_expressions(renamed, cfg.expr_complexity_limit));
        }
        // Reparse the printed form so the source handed to backends and the
        // AST the reference backend walks are the same artifact.
        pm.ast = canonicalize(parse_source(print_module(staged)));
        analyze_module(pm.ast);
    }
    pm.source = print_module(pm.ast);
    pm.globals = map_globals(pm.ast.globals);

    SplitConfig split_cfg;
    split_cfg.split_threshold = cfg.split_threshold;
    split_cfg.expr_complexity_limit = cfg.expr_complexity_limit;

    for (size_t i = 0; i < pm.ast.functions.size(); ++i) {
        const FunctionDef& fn = pm.ast.functions[i];
        PreparedFunction pf;
        pf.fn_index = i;
        pf.source = print_function(fn);
        pf.table = allocate_frame(fn, collect_local_layouts(fn));
        pf.table.globals = pm.globals;
        pf.flags = analyze_features(fn, split_cfg);

        if (cfg.mode == TranslateMode::LegoPart && !pf.flags.has_goto &&
            check_composability(fn).composable) {
            pf.parts = split_parts(fn, split_cfg, heuristic_policy(split_cfg));
            if (!verify_split_integrity(fn, pf.parts))
                fail(ErrorKind::Internal,
                     "split integrity check failed for " + fn.name);
        }
        pm.functions.push_back(std::move(pf));
    }
    return pm;
}

std::string build_module_once(const PreparedModule& prepared, const PipelineConfig& cfg,
                              Backend& backend,
                              const std::optional<ErrorFeedback>& feedback) {
    std::vector<FunctionAsm> fns;
    for (const auto& pf : prepared.functions) {
        const FunctionDef& fn = prepared.ast.functions[pf.fn_index];
        if (cfg.mode == TranslateMode::LegoPart && !pf.parts.empty()) {
            std::vector<TranslatedPart> tps;
            for (const auto& part : pf.parts) {
                TranslationRequest req;
                req.mode = TranslateMode::LegoPart;
                req.source = part.payload;
                req.symbol_table = &pf.table;
                req.flags = pf.flags;
                req.part_context =
                    PartContext{part.id, part.head_labels, part.loop_depth};
                req.feedback = feedback;
                req.fn = &fn;
                req.part = &part;
                req.module = &prepared.ast;
                tps.push_back({&part, translate(req, backend)});
            }
            fns.push_back({fn.name, rebuild_function(tps, pf.table)});
        } else {
            TranslationRequest req;
            req.mode = cfg.mode == TranslateMode::Direct ? TranslateMode::Direct
                                                         : TranslateMode::Workflow;
            req.source = pf.source;
            req.symbol_table = &pf.table;
            req.flags = pf.flags;
            req.feedback = feedback;
            req.fn = &fn;
            req.module = &prepared.ast;
            fns.push_back({fn.name, rebuild_direct(translate(req, backend), pf.table)});
        }
    }
    return emit_module(fns, prepared.globals);
}

PipelineResult pipeline_compile(const std::string& source, const std::string& fn_name,
                                const std::vector<TestCase>& tests,
                                const PipelineConfig& cfg, Backend& backend) {
    PreparedModule pm = prepare_module(source, cfg);
    DriverSpec spec = driver_spec_for(pm.ast, fn_name);
    auto build = [&](const std::optional<ErrorFeedback>& fb) {
        return build_module_once(pm, cfg, backend, fb);
    };
    PipelineResult result;
    result.prepared_source = pm.source;
    try {
        RepairOutcome out = repair_rounds(build, spec, tests, cfg.max_retries,
                                          cfg.timeout_secs);
        result.pass = true;
        result.attempts = out.attempts;
        result.module_text = out.module_text;
        result.last_report = out.trail.back().report;
        result.trail = std::move(out.trail);
    } catch (RepairExhausted& e) {
        result.pass = false;
        result.attempts = e.outcome.attempts;
        result.module_text = e.outcome.module_text;
        if (!e.outcome.trail.empty()) result.last_report = e.outcome.trail.back().report;
        result.trail = std::move(e.outcome.trail);
    }
    return result;
}

int exit_code_for(const PipelineResult& result) {
    if (result.pass) return 0;
    switch (result.last_report.error_class) {
        case ErrorClass::Behavioral: return 1;
        case ErrorClass::Semantic: return 2;
        case ErrorClass::Runtime: return 3;
        case ErrorClass::None: return 4;
    }
    return 4;
}

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::ImmediateOverflow:
        case ErrorKind::UndefinedLabel:
        case ErrorKind::DuplicateLabel:
        case ErrorKind::Semantic:
            return 2;
        default:
            return 4;
    }
}

}  // namespace blockcc
