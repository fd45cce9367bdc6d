#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "blockcc/ast.hpp"
#include "blockcc/cfg.hpp"
#include "blockcc/features.hpp"

namespace blockcc {

enum class PartKind {
    SourceBlock,
    Label,
    CondJump,
    UncondJump,
};

const char* part_kind_name(PartKind kind);

/// One element of a split function. SourceBlock payloads hold C text; jump
/// and label payloads hold the label name. The AST handles (`stmts`, `cond`)
/// point into the function the parts were split from and back the integrity
/// checks; translation consumes the payload text plus the metadata.
///
/// `break_stack`/`continue_stack` list the labels a break/continue statement
/// inside this part's payload must jump to, innermost last. `head_labels`
/// are defined at the top of this part (continue targets that fall between
/// emitted labels, e.g. a for-loop's increment).
struct ControlPart {
    PartKind kind = PartKind::SourceBlock;
    std::string payload;
    int id = 0;
    int loop_depth = 0;

    std::string role;  // keep|init|head|cmp|body|incr|expr|then|else|case|default|end|exit|loop|endif|dispatch
    StmtKind construct_kind = StmtKind::Blank;  // For/While/DoWhile/If/Switch on shape parts
    int construct_id = -1;
    bool jump_if_true = false;              // CondJump: taken when condition holds
    std::optional<int64_t> case_value;      // CondJump/Label of a switch case
    std::vector<std::string> head_labels;
    std::vector<std::string> break_stack;
    std::vector<std::string> continue_stack;

    std::vector<const Stmt*> stmts;  // SourceBlock: statements behind the payload
    const Expr* cond = nullptr;      // cmp/expr parts: controlling expression
};

struct ComposabilityVerdict {
    bool composable = true;
    std::vector<std::pair<SourceSpan, std::string>> blocking_constructs;
};

enum class SplitDecision { Keep, Split };

struct SplitCandidate {
    const Stmt* stmt = nullptr;
    int token_estimate = 0;
    bool is_control = false;
    int loop_depth = 0;
};

using SplitPolicy = std::function<SplitDecision(const SplitCandidate&)>;

/// Bottom-up scan over the statement deque. Everything in the subset is a
/// recognized structure except goto, which breaks the structured control
/// flow and marks the function non-composable.
ComposabilityVerdict check_composability(const FunctionDef& fn);

/// Split iff the block is a control structure above the token threshold;
/// basic blocks are always kept.
SplitDecision heuristic_decide(const SplitCandidate& block, const SplitConfig& config);

SplitPolicy heuristic_policy(SplitConfig config);
SplitPolicy always_split_policy();
SplitPolicy never_split_policy();

/// Decompose the function body into ordered parts. Control structures the
/// policy elects to split expand into their label/jump shape with sub-blocks
/// processed recursively; kept blocks become SourceBlocks, with adjacent
/// kept parts merged. Labeled control statements are kept regardless of the
/// policy so the payload text stays faithful. Expects a renamed, composable
/// function; throws NonComposable otherwise.
///
/// Shapes (labels are `.L_<fn>__<construct>_<kind>`):
///   for       [init, Label(body), cmp, CondJump(end), body..., incr,
///              UncondJump(body), Label(end)]
///   while     [Label(body), cmp, CondJump(end), body..., UncondJump(body),
///              Label(end)]
///   do-while  [Label(body), body..., cmp, CondJump(body, if-true),
///              Label(end)]
///   if/else   [cmp, CondJump(else), then..., UncondJump(endif),
///              Label(else), else..., Label(endif)]
///   if        [cmp, CondJump(endif), then..., Label(endif)]
///   switch    [expr, CondJump(case_i)..., UncondJump(default|end),
///              (Label(case_i), body_i...)..., Label(end)]
std::vector<ControlPart> split_parts(const FunctionDef& fn, const SplitConfig& config,
                                     const SplitPolicy& decide);

/// Reassemble C text from the parts by inverting the split shapes.
std::string recombine_parts_text(const std::vector<ControlPart>& parts);

/// CFG induced by the parts: label/jump parts give the inter-part edges,
/// SourceBlock payloads contribute their internal flow, break/continue
/// resolve through the metadata stacks.
Cfg stitch_parts_cfg(const std::vector<ControlPart>& parts);

/// True iff recombining the parts reproduces the function body modulo
/// whitespace and the stitched CFG is isomorphic to build_cfg(fn) after
/// fallthrough contraction on both sides. Malformed parts yield false.
bool verify_split_integrity(const FunctionDef& fn, const std::vector<ControlPart>& parts);

/// One record per part: `id kind loop_depth payload…` with whitespace runs
/// in the payload flattened.
std::string dump_parts(const std::vector<ControlPart>& parts);

}  // namespace blockcc
