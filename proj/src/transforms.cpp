#include "blockcc/transforms.hpp"

#include <map>

#include "blockcc/diag.hpp"
#include "blockcc/features.hpp"
#include "blockcc/printer.hpp"

namespace blockcc {

namespace {

struct Renamer {
    std::map<std::string, int> ordinals;
    std::vector<std::map<std::string, std::string>> scopes;
    std::vector<std::string> paths;
    int scope_counter = 0;
    RenameMap map;

    void enter() {
        std::string path =
            paths.empty() ? "0" : paths.back() + "/" + std::to_string(scope_counter);
        scope_counter++;
        paths.push_back(std::move(path));
        scopes.emplace_back();
    }
    void leave() {
        paths.pop_back();
        scopes.pop_back();
    }

    std::string declare(const std::string& name) {
        int n = ++ordinals[name];
        std::string fresh = name + "__" + std::to_string(n);
        scopes.back()[name] = fresh;
        map.entries.push_back({paths.back(), name, fresh});
        return fresh;
    }

    const std::string* resolve(const std::string& name) const {
        for (auto it = scopes.rbegin(); it != scopes.rend(); ++it) {
            auto f = it->find(name);
            if (f != it->end()) return &f->second;
        }
        return nullptr;
    }

    void walk_expr(Expr* e) {
        if (!e) return;
        if (e->kind == ExprKind::Ident) {
            if (const std::string* fresh = resolve(e->name)) e->name = *fresh;
            return;
        }
        walk_expr(e->a.get());
        walk_expr(e->b.get());
        walk_expr(e->c.get());
        for (auto& arg : e->args) walk_expr(arg.get());
    }

    void walk_stmts(std::vector<StmtPtr>& stmts) {
        for (auto& s : stmts) walk_stmt(s.get());
    }

    void walk_stmt(Stmt* s) {
        if (!s) return;
        switch (s->kind) {
            case StmtKind::Assign:
                walk_expr(s->lhs.get());
                walk_expr(s->rhs.get());
                break;
            case StmtKind::Expr:
            case StmtKind::Return:
                walk_expr(s->expr.get());
                break;
            case StmtKind::Decl:
                // The name is in scope within its own initializer.
                s->decl_name = declare(s->decl_name);
                walk_expr(s->decl_init.get());
                break;
            case StmtKind::Block:
                enter();
                walk_stmts(s->body);
                leave();
                break;
            case StmtKind::If:
                walk_expr(s->expr.get());
                walk_stmt(s->then_branch.get());
                walk_stmt(s->else_branch.get());
                break;
            case StmtKind::While:
            case StmtKind::DoWhile:
                walk_expr(s->expr.get());
                walk_stmt(s->loop_body.get());
                break;
            case StmtKind::For:
                enter();
                walk_stmt(s->for_init.get());
                walk_expr(s->expr.get());
                walk_stmt(s->for_incr.get());
                walk_stmt(s->loop_body.get());
                leave();
                break;
            case StmtKind::Switch:
                walk_expr(s->expr.get());
                for (auto& c : s->cases) {
                    enter();
                    walk_stmts(c.body);
                    leave();
                }
                break;
            default:
                break;
        }
    }
};

}  // namespace

std::pair<FunctionDef, RenameMap> rename_variables(const FunctionDef& fn) {
    FunctionDef out = clone_function(fn);
    Renamer r;
    // Parameters share a scope with the body's top level, as in C.
    r.enter();
    for (auto& p : out.params) p.name = r.declare(p.name);
    r.walk_stmts(out.body->body);
    r.leave();
    return {std::move(out), std::move(r.map)};
}

namespace {

struct Decomposer {
    int limit;
    int next_tmp = 0;
    std::vector<StmtPtr> pending;

    static bool is_literal(const Expr& e) {
        return e.kind == ExprKind::IntLit || e.kind == ExprKind::FloatLit;
    }

    ExprPtr make_ident(const std::string& name, const TypePtr& t) {
        auto id = std::make_unique<Expr>();
        id->kind = ExprKind::Ident;
        id->name = name;
        id->type = t;
        return id;
    }

    ExprPtr hoist(ExprPtr e) {
        if (!e->type) fail(ErrorKind::Internal, "decompose needs a sema-annotated function");
        std::string name = "__t" + std::to_string(++next_tmp);
        TypePtr t = e->type;
        auto d = std::make_unique<Stmt>();
        d->kind = StmtKind::Decl;
        d->decl_name = name;
        d->decl_type = t;
        d->decl_init = std::move(e);
        pending.push_back(std::move(d));
        return make_ident(name, t);
    }

    // Hoisting every non-literal operand of a node that must shrink keeps the
    // original left-to-right evaluation order; literals carry no state.
    ExprPtr maybe_hoist(ExprPtr e) {
        if (!e || is_literal(*e)) return e;
        return hoist(std::move(e));
    }

    ExprPtr reduce(ExprPtr e) {
        if (!e) return e;
        if (operator_node_count(*e) <= limit) return e;
        switch (e->kind) {
            case ExprKind::Binary:
                e->a = maybe_hoist(reduce(std::move(e->a)));
                // The right side of && and || is conditionally evaluated and
                // cannot be pulled out.
                if (e->bin_op != BinaryOp::LogAnd && e->bin_op != BinaryOp::LogOr)
                    e->b = maybe_hoist(reduce(std::move(e->b)));
                return e;
            case ExprKind::Cond:
                e->a = maybe_hoist(reduce(std::move(e->a)));
                return e;
            case ExprKind::Unary:
                switch (e->un_op) {
                    case UnaryOp::PreInc:
                    case UnaryOp::PreDec:
                    case UnaryOp::PostInc:
                    case UnaryOp::PostDec:
                    case UnaryOp::Addr:
                        e->a = reduce_lvalue(std::move(e->a));
                        return e;
                    default:
                        e->a = maybe_hoist(reduce(std::move(e->a)));
                        return e;
                }
            case ExprKind::Index:
                if (e->a->type && e->a->type->kind == TypeKind::Array)
                    e->a = reduce_lvalue(std::move(e->a));
                else
                    e->a = maybe_hoist(reduce(std::move(e->a)));
                e->b = maybe_hoist(reduce(std::move(e->b)));
                return e;
            case ExprKind::Member:
                if (e->member_arrow)
                    e->a = maybe_hoist(reduce(std::move(e->a)));
                else
                    e->a = reduce_lvalue(std::move(e->a));
                return e;
            case ExprKind::Cast:
                e->a = maybe_hoist(reduce(std::move(e->a)));
                return e;
            case ExprKind::Call:
                for (auto& arg : e->args) arg = maybe_hoist(reduce(std::move(arg)));
                return e;
            default:
                return e;
        }
    }

    // An lvalue operand stays in place; only rvalue parts inside it (array
    // subscripts, pointer bases) are reducible.
    ExprPtr reduce_lvalue(ExprPtr e) { return reduce(std::move(e)); }

    void walk_block(std::vector<StmtPtr>& stmts) {
        std::vector<StmtPtr> out;
        for (auto& sp : stmts) {
            pending.clear();
            Stmt* s = sp.get();
            switch (s->kind) {
                case StmtKind::Assign:
                    s->lhs = reduce_lvalue(std::move(s->lhs));
                    s->rhs = reduce(std::move(s->rhs));
                    break;
                case StmtKind::Expr:
                case StmtKind::Return:
                case StmtKind::If:
                case StmtKind::Switch:
                    s->expr = reduce(std::move(s->expr));
                    break;
                case StmtKind::Decl:
                    s->decl_init = reduce(std::move(s->decl_init));
                    break;
                default:
                    // Loop headers stay intact: hoisting out of them would
                    // change how often the pulled-out part runs.
                    break;
            }
            if (!pending.empty() && !s->labels.empty()) {
                // A goto must land on the temporaries, not skip them.
                pending.front()->labels = std::move(s->labels);
                s->labels.clear();
            }
            for (auto& d : pending) out.push_back(std::move(d));
            pending.clear();
            out.push_back(std::move(sp));
        }
        stmts = std::move(out);
        for (auto& sp : stmts) descend(sp.get());
    }

    void descend(Stmt* s) {
        switch (s->kind) {
            case StmtKind::Block:
                walk_block(s->body);
                break;
            case StmtKind::If:
                descend(s->then_branch.get());
                if (s->else_branch) descend(s->else_branch.get());
                break;
            case StmtKind::While:
            case StmtKind::DoWhile:
            case StmtKind::For:
                descend(s->loop_body.get());
                break;
            case StmtKind::Switch:
                for (auto& c : s->cases) walk_block(c.body);
                break;
            default:
                break;
        }
    }
};

}  // namespace

FunctionDef decompose_complex_expressions(const FunctionDef& fn, int limit) {
    if (limit < 1) fail(ErrorKind::Config, "decompose limit must be at least 1");
    FunctionDef out = clone_function(fn);
    Decomposer d{limit};
    d.walk_block(out.body->body);
    return out;
}

bool verify_rename_equivalence(const FunctionDef& original, const FunctionDef& renamed,
                               const std::vector<TestCase>& tests) {
    auto run_version = [&](const FunctionDef& fn) {
        DriverSpec spec;
        spec.fn_name = fn.name;
        spec.return_type = fn.return_type;
        if (fn.return_type->kind != TypeKind::Void && !is_arith(fn.return_type->kind))
            fail(ErrorKind::Harness, "equivalence driver: non-scalar return type");
        for (const auto& p : fn.params) {
            if (!p.type || !is_arith(p.type->kind))
                fail(ErrorKind::Harness, "equivalence driver: non-scalar parameter " + p.name);
            spec.param_types.push_back(p.type);
        }
        TempDir dir("blockcc-rename");
        auto exe = compile_c_sources(
            {{"fn.c", print_function(fn)}, {"driver.c", build_driver_source(spec, tests)}}, dir);
        ProcResult r = run_process({exe.string(), "all"}, std::chrono::milliseconds(30000));
        if (!r.ok()) fail(ErrorKind::Harness, "equivalence run failed: " + cap_tail(r.err, 500));
        return r.out;
    };
    return run_version(original) == run_version(renamed);
}

}  // namespace blockcc
