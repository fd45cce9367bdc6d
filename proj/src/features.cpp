#include "blockcc/features.hpp"

#include "blockcc/printer.hpp"

namespace blockcc {

int token_estimate_of(const std::string& text) {
    long lexemes = 0;
    bool in_word = false;
    for (char c : text) {
        bool ws = c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
        if (ws) {
            in_word = false;
        } else if (!in_word) {
            in_word = true;
            ++lexemes;
        }
    }
    return static_cast<int>((lexemes * 13 + 9) / 10);
}

int operator_node_count(const Expr& e) {
    int n = 0;
    switch (e.kind) {
        case ExprKind::IntLit:
        case ExprKind::FloatLit:
        case ExprKind::Ident:
            return 0;
        default:
            n = 1;
            break;
    }
    if (e.a) n += operator_node_count(*e.a);
    if (e.b) n += operator_node_count(*e.b);
    if (e.c) n += operator_node_count(*e.c);
    for (const auto& arg : e.args) n += operator_node_count(*arg);
    return n;
}

namespace {

struct Scan {
    const SplitConfig& config;
    FeatureFlags flags;

    bool float_type(const TypePtr& t) const { return t && is_float(t->kind); }

    void expr(const Expr& e) {
        if (e.kind == ExprKind::FloatLit || float_type(e.type)) flags.numerical = true;
        if (e.kind == ExprKind::Cast && float_type(e.cast_type)) flags.numerical = true;
        if (operator_node_count(e) > config.expr_complexity_limit) flags.order = true;
        if (e.a) expr(*e.a);
        if (e.b) expr(*e.b);
        if (e.c) expr(*e.c);
        for (const auto& arg : e.args) expr(*arg);
    }

    void stmt(const Stmt& s) {
        if (s.kind == StmtKind::Goto) flags.has_goto = true;
        if (s.kind == StmtKind::Decl && float_type(s.decl_type)) flags.numerical = true;
        if (s.lhs) expr(*s.lhs);
        if (s.rhs) expr(*s.rhs);
        if (s.expr) expr(*s.expr);
        if (s.decl_init) expr(*s.decl_init);
        for (const auto& st : s.body) stmt(*st);
        if (s.then_branch) stmt(*s.then_branch);
        if (s.else_branch) stmt(*s.else_branch);
        if (s.loop_body) stmt(*s.loop_body);
        if (s.for_init) stmt(*s.for_init);
        if (s.for_incr) stmt(*s.for_incr);
        for (const auto& cs : s.cases)
            for (const auto& st : cs.body) stmt(*st);
    }
};

}  // namespace

FeatureFlags analyze_features(const FunctionDef& fn, const SplitConfig& config) {
    Scan scan{config, {}};
    if (fn.return_type && is_float(fn.return_type->kind)) scan.flags.numerical = true;
    for (const auto& p : fn.params)
        if (p.type && is_float(p.type->kind)) scan.flags.numerical = true;
    scan.stmt(*fn.body);
    scan.flags.token_estimate = token_estimate_of(print_function(fn));
    scan.flags.long_fn = scan.flags.token_estimate > config.split_threshold;
    return scan.flags;
}

}  // namespace blockcc
