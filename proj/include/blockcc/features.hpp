#pragma once

#include <string>

#include "blockcc/ast.hpp"

namespace blockcc {

enum class SplitPolicyKind { Heuristic, Llm };

struct SplitConfig {
    int split_threshold = 400;      // tokens; 'long' flag and split decisions
    int expr_complexity_limit = 16; // operator nodes; 'order' flag
    SplitPolicyKind policy = SplitPolicyKind::Heuristic;
};

struct FeatureFlags {
    bool long_fn = false;    // token_estimate > split_threshold
    bool numerical = false;  // floating-point usage anywhere in the function
    bool order = false;      // an expression exceeds expr_complexity_limit
    bool has_goto = false;
    int token_estimate = 0;
};

// Whitespace-delimited lexeme count scaled by 1.3, rounded up.
int token_estimate_of(const std::string& text);

// Internal (non-leaf) expression nodes.
int operator_node_count(const Expr& e);

// fn should be type-annotated for the full 'numerical' rule; without types the
// literal/declaration scan still applies.
FeatureFlags analyze_features(const FunctionDef& fn, const SplitConfig& config);

}  // namespace blockcc
