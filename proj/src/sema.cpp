#include "blockcc/sema.hpp"

#include <map>
#include <set>

#include "blockcc/parser.hpp"

namespace blockcc {

TypePtr integer_promote(const TypePtr& t) {
    if (!t) fail(ErrorKind::Internal, "promote on untyped expression");
    if (is_integer(t->kind) && integer_rank(t->kind) < integer_rank(TypeKind::Int))
        return make_scalar(TypeKind::Int);
    return t;
}

TypePtr usual_arith_conversion(const TypePtr& a, const TypePtr& b) {
    if (!is_arith(a->kind) || !is_arith(b->kind))
        fail(ErrorKind::Internal, "usual arithmetic conversion on non-arithmetic type");
    if (a->kind == TypeKind::Double || b->kind == TypeKind::Double)
        return make_scalar(TypeKind::Double);
    if (a->kind == TypeKind::Float || b->kind == TypeKind::Float)
        return make_scalar(TypeKind::Float);
    TypePtr pa = integer_promote(a);
    TypePtr pb = integer_promote(b);
    if (pa->kind == pb->kind) return pa;
    bool sa = is_signed_integer(pa->kind), sb = is_signed_integer(pb->kind);
    int ra = integer_rank(pa->kind), rb = integer_rank(pb->kind);
    if (sa == sb) return ra >= rb ? pa : pb;
    const TypePtr& s = sa ? pa : pb;
    const TypePtr& u = sa ? pb : pa;
    int rs = sa ? ra : rb, ru = sa ? rb : ra;
    if (ru >= rs) return u;
    // LP64: long covers unsigned int, so the signed type wins on higher rank.
    if (s->kind == TypeKind::Long && u->kind == TypeKind::UInt) return s;
    return make_scalar(s->kind == TypeKind::Long ? TypeKind::ULong : TypeKind::UInt);
}

bool implicitly_convertible(const TypePtr& from, const TypePtr& to) {
    if (!from || !to) return false;
    if (is_arith(from->kind) && is_arith(to->kind)) return true;
    if (from->kind == TypeKind::Pointer && to->kind == TypeKind::Pointer)
        return type_equal(from->pointee, to->pointee);
    return false;
}

namespace {

struct Scope {
    std::map<std::string, TypePtr> names;
};

struct Sema {
    Ast& ast;

    std::vector<Scope> scopes;
    const FunctionDef* current_fn = nullptr;
    int loop_depth = 0;
    int switch_depth = 0;
    std::set<std::string> labels_defined;
    std::vector<std::pair<std::string, SourceSpan>> labels_used;

    explicit Sema(Ast& a) : ast(a) {}

    void run() {
        check_globals();
        for (auto& fn : ast.functions) check_function(fn);
    }

    [[noreturn]] void err(const std::string& msg, SourceSpan span) const {
        fail(ErrorKind::Syntax, msg, span);
    }

    void check_globals() {
        std::set<std::string> seen;
        for (auto& g : ast.globals) {
            if (!seen.insert(g.name).second)
                fail(ErrorKind::DuplicateGlobal, g.name, g.span);
            if (g.init) {
                if (g.type->kind == TypeKind::Array || g.type->kind == TypeKind::Record)
                    fail(ErrorKind::UnsupportedFeature, "aggregate initializer", g.span);
                if (is_float(g.type->kind)) {
                    if (!const_eval_ok_float(*g.init))
                        err("global initializer must be a constant", g.init->span);
                } else if (!const_eval_ok_int(*g.init)) {
                    err("global initializer must be an integer constant", g.init->span);
                }
                annotate(*g.init);
            }
        }
    }

    static bool const_eval_ok_int(const Expr& e);
    static bool const_eval_ok_float(const Expr& e);

    TypePtr lookup(const std::string& name, SourceSpan span) const {
        for (size_t i = scopes.size(); i-- > 0;) {
            auto it = scopes[i].names.find(name);
            if (it != scopes[i].names.end()) return it->second;
        }
        for (const auto& g : ast.globals)
            if (g.name == name) return g.type;
        err("undeclared identifier '" + name + "'", span);
    }

    void declare(const std::string& name, TypePtr type, SourceSpan span) {
        auto& top = scopes.back().names;
        if (top.count(name)) err("redeclaration of '" + name + "'", span);
        top[name] = std::move(type);
    }

    void check_function(FunctionDef& fn) {
        current_fn = &fn;
        labels_defined.clear();
        labels_used.clear();
        if (fn.return_type->kind == TypeKind::Record)
            fail(ErrorKind::UnsupportedFeature, "record return type", fn.span);
        scopes.clear();
        scopes.emplace_back();
        for (const auto& p : fn.params) {
            if (p.type->kind == TypeKind::Record)
                fail(ErrorKind::UnsupportedFeature, "record parameter", fn.span);
            declare(p.name, p.type, fn.span);
        }
        collect_labels(*fn.body);
        check_block(*fn.body);
        for (const auto& [name, span] : labels_used)
            if (!labels_defined.count(name))
                fail(ErrorKind::UnresolvedLabel, name, span);
        current_fn = nullptr;
    }

    void collect_labels(const Stmt& s) {
        for (const auto& l : s.labels) {
            if (!labels_defined.insert(l).second)
                fail(ErrorKind::DuplicateLabel, l, s.span);
        }
        for (const auto& st : s.body) collect_labels(*st);
        if (s.then_branch) collect_labels(*s.then_branch);
        if (s.else_branch) collect_labels(*s.else_branch);
        if (s.loop_body) collect_labels(*s.loop_body);
        if (s.for_init) collect_labels(*s.for_init);
        if (s.for_incr) collect_labels(*s.for_incr);
        for (const auto& cs : s.cases)
            for (const auto& st : cs.body) collect_labels(*st);
    }

    void check_block(Stmt& block) {
        scopes.emplace_back();
        for (auto& st : block.body) check_stmt(*st);
        scopes.pop_back();
    }

    void check_stmt(Stmt& s) {
        switch (s.kind) {
            case StmtKind::Blank:
                return;
            case StmtKind::Decl: {
                if (s.decl_type->kind == TypeKind::Record) {
                    // Record locals are representable; just no initializer.
                } else if (s.decl_type->kind == TypeKind::Array) {
                    if (s.decl_init)
                        fail(ErrorKind::UnsupportedFeature, "array initializer", s.span);
                }
                if (s.decl_init) {
                    if (s.decl_type->kind == TypeKind::Record)
                        fail(ErrorKind::UnsupportedFeature, "record initializer", s.span);
                    annotate(*s.decl_init);
                    require_convertible(decayed(s.decl_init->type), s.decl_type,
                                        s.decl_init->span);
                }
                declare(s.decl_name, s.decl_type, s.span);
                return;
            }
            case StmtKind::Assign: {
                annotate(*s.lhs);
                require_lvalue(*s.lhs);
                annotate(*s.rhs);
                TypePtr lt = s.lhs->type;
                if (lt->kind == TypeKind::Array || lt->kind == TypeKind::Record)
                    fail(ErrorKind::UnsupportedFeature, "aggregate assignment", s.span);
                TypePtr rt = decayed(s.rhs->type);
                if (s.assign_op == AssignOp::Set) {
                    require_convertible(rt, lt, s.rhs->span);
                } else {
                    if (lt->kind == TypeKind::Pointer) {
                        if ((s.assign_op != AssignOp::Add && s.assign_op != AssignOp::Sub) ||
                            !is_integer(rt->kind))
                            err("invalid pointer compound assignment", s.span);
                    } else {
                        if (!is_arith(lt->kind) || !is_arith(rt->kind))
                            err("compound assignment needs arithmetic operands", s.span);
                        bool int_only = s.assign_op == AssignOp::Mod ||
                                        s.assign_op == AssignOp::Shl ||
                                        s.assign_op == AssignOp::Shr ||
                                        s.assign_op == AssignOp::And ||
                                        s.assign_op == AssignOp::Xor ||
                                        s.assign_op == AssignOp::Or;
                        if (int_only && (!is_integer(lt->kind) || !is_integer(rt->kind)))
                            err("integer operands required", s.span);
                    }
                }
                return;
            }
            case StmtKind::Expr:
                annotate(*s.expr);
                return;
            case StmtKind::Goto:
                labels_used.emplace_back(s.goto_target, s.span);
                return;
            case StmtKind::Block:
                check_block(s);
                return;
            case StmtKind::If:
                annotate(*s.expr);
                require_scalar(*s.expr);
                check_block(*s.then_branch);
                if (s.else_branch) check_block(*s.else_branch);
                return;
            case StmtKind::While:
            case StmtKind::DoWhile:
                annotate(*s.expr);
                require_scalar(*s.expr);
                ++loop_depth;
                check_block(*s.loop_body);
                --loop_depth;
                return;
            case StmtKind::For: {
                scopes.emplace_back();  // for-init declaration scope
                check_stmt(*s.for_init);
                annotate(*s.expr);
                require_scalar(*s.expr);
                check_stmt(*s.for_incr);
                ++loop_depth;
                check_block(*s.loop_body);
                --loop_depth;
                scopes.pop_back();
                return;
            }
            case StmtKind::Switch: {
                annotate(*s.expr);
                if (!s.expr->type || !is_integer(decayed(s.expr->type)->kind))
                    err("switch expression must be an integer", s.expr->span);
                ++switch_depth;
                for (auto& cs : s.cases) {
                    scopes.emplace_back();
                    for (auto& st : cs.body) check_stmt(*st);
                    scopes.pop_back();
                }
                --switch_depth;
                return;
            }
            case StmtKind::Break:
                if (loop_depth == 0 && switch_depth == 0)
                    err("break outside loop or switch", s.span);
                return;
            case StmtKind::Continue:
                if (loop_depth == 0) err("continue outside loop", s.span);
                return;
            case StmtKind::Return: {
                const TypePtr& want = current_fn->return_type;
                if (want->kind == TypeKind::Void) {
                    if (s.expr) err("void function returns a value", s.span);
                    return;
                }
                if (!s.expr) err("non-void function needs a return value", s.span);
                annotate(*s.expr);
                require_convertible(decayed(s.expr->type), want, s.expr->span);
                return;
            }
        }
    }

    // Array-to-pointer decay for value contexts.
    static TypePtr decayed(const TypePtr& t) {
        if (t && t->kind == TypeKind::Array) return make_pointer(t->element);
        return t;
    }

    void require_scalar(const Expr& e) const {
        TypePtr t = decayed(e.type);
        if (!t || !is_scalar_kind(t->kind))
            err("scalar value required", e.span);
    }

    void require_lvalue(const Expr& e) const {
        switch (e.kind) {
            case ExprKind::Ident:
            case ExprKind::Index:
            case ExprKind::Member:
                return;
            case ExprKind::Unary:
                if (e.un_op == UnaryOp::Deref) return;
                break;
            default:
                break;
        }
        err("lvalue required", e.span);
    }

    void require_convertible(const TypePtr& from, const TypePtr& to, SourceSpan span) const {
        if (!implicitly_convertible(from, to))
            err("cannot convert " + type_to_string(from) + " to " + type_to_string(to),
                span);
    }

    const FunctionDef* find_callee(const std::string& name) const {
        return find_function(ast, name);
    }

    void annotate(Expr& e) {
        switch (e.kind) {
            case ExprKind::IntLit: {
                // Literal typing per C: decimal prefers signed, hex may go unsigned.
                uint64_t v = e.int_value;
                bool u = e.lit_unsigned, l = e.lit_long;
                TypeKind k;
                if (u && l) k = TypeKind::ULong;
                else if (u) k = v <= 0xFFFFFFFFu ? TypeKind::UInt : TypeKind::ULong;
                else if (l) k = v <= 0x7FFFFFFFFFFFFFFFull ? TypeKind::Long : TypeKind::ULong;
                else if (v <= 0x7FFFFFFFu) k = TypeKind::Int;
                else if (e.is_hex && v <= 0xFFFFFFFFu) k = TypeKind::UInt;
                else if (v <= 0x7FFFFFFFFFFFFFFFull) k = TypeKind::Long;
                else k = TypeKind::ULong;
                e.type = make_scalar(k);
                return;
            }
            case ExprKind::FloatLit:
                e.type = make_scalar(e.lit_float32 ? TypeKind::Float : TypeKind::Double);
                return;
            case ExprKind::Ident:
                e.type = lookup(e.name, e.span);
                return;
            case ExprKind::Unary:
                annotate_unary(e);
                return;
            case ExprKind::Binary:
                annotate_binary(e);
                return;
            case ExprKind::Cond: {
                annotate(*e.a);
                require_scalar(*e.a);
                annotate(*e.b);
                annotate(*e.c);
                TypePtr bt = decayed(e.b->type), ct = decayed(e.c->type);
                if (is_arith(bt->kind) && is_arith(ct->kind)) {
                    e.type = usual_arith_conversion(bt, ct);
                } else if (type_equal(bt, ct)) {
                    e.type = bt;
                } else {
                    err("incompatible conditional branches", e.span);
                }
                return;
            }
            case ExprKind::Call: {
                const FunctionDef* callee = find_callee(e.name);
                if (!callee)
                    fail(ErrorKind::UnsupportedFeature,
                         "call to function not defined in this module: " + e.name,
                         e.span);
                if (callee->params.size() != e.args.size())
                    err("call to '" + e.name + "' with wrong argument count", e.span);
                for (size_t i = 0; i < e.args.size(); ++i) {
                    annotate(*e.args[i]);
                    require_convertible(decayed(e.args[i]->type), callee->params[i].type,
                                        e.args[i]->span);
                }
                e.type = callee->return_type;
                return;
            }
            case ExprKind::Index: {
                annotate(*e.a);
                annotate(*e.b);
                TypePtr base = decayed(e.a->type);
                if (base->kind != TypeKind::Pointer)
                    err("subscripted value is not an array or pointer", e.span);
                if (!is_integer(decayed(e.b->type)->kind))
                    err("array subscript must be an integer", e.b->span);
                e.type = base->pointee;
                return;
            }
            case ExprKind::Member: {
                annotate(*e.a);
                TypePtr base = e.a->type;
                if (e.member_arrow) {
                    base = decayed(base);
                    if (base->kind != TypeKind::Pointer ||
                        base->pointee->kind != TypeKind::Record)
                        err("'->' needs a pointer to struct or union", e.span);
                    base = base->pointee;
                } else if (base->kind != TypeKind::Record) {
                    err("'.' needs a struct or union", e.span);
                }
                for (const auto& m : base->members) {
                    if (m.name == e.name) {
                        e.type = m.type;
                        return;
                    }
                }
                err("no member named '" + e.name + "' in " + type_to_string(base), e.span);
            }
            case ExprKind::Cast: {
                annotate(*e.a);
                TypePtr from = decayed(e.a->type);
                TypePtr to = e.cast_type;
                bool ok = (is_arith(from->kind) && is_arith(to->kind)) ||
                          (from->kind == TypeKind::Pointer && to->kind == TypeKind::Pointer) ||
                          (from->kind == TypeKind::Pointer && is_integer(to->kind) &&
                           scalar_bit_width(to->kind) == 64) ||
                          (is_integer(from->kind) && to->kind == TypeKind::Pointer);
                if (!ok)
                    err("invalid cast from " + type_to_string(from) + " to " +
                            type_to_string(to),
                        e.span);
                e.type = to;
                return;
            }
        }
    }

    void annotate_unary(Expr& e) {
        annotate(*e.a);
        TypePtr at = e.a->type;
        switch (e.un_op) {
            case UnaryOp::Neg:
            case UnaryOp::Plus:
                if (!is_arith(decayed(at)->kind)) err("arithmetic operand required", e.span);
                e.type = is_float(at->kind) ? at : integer_promote(at);
                return;
            case UnaryOp::BitNot:
                if (!is_integer(decayed(at)->kind)) err("integer operand required", e.span);
                e.type = integer_promote(at);
                return;
            case UnaryOp::Not:
                require_scalar(*e.a);
                e.type = make_scalar(TypeKind::Int);
                return;
            case UnaryOp::Deref: {
                TypePtr t = decayed(at);
                if (t->kind != TypeKind::Pointer) err("cannot dereference non-pointer", e.span);
                e.type = t->pointee;
                return;
            }
            case UnaryOp::Addr:
                require_lvalue(*e.a);
                e.type = make_pointer(at);
                return;
            case UnaryOp::PreInc:
            case UnaryOp::PreDec:
            case UnaryOp::PostInc:
            case UnaryOp::PostDec: {
                require_lvalue(*e.a);
                TypePtr t = at;
                if (t->kind == TypeKind::Array) err("cannot modify an array", e.span);
                if (!is_scalar_kind(t->kind)) err("scalar operand required", e.span);
                e.type = t;
                return;
            }
        }
    }

    void annotate_binary(Expr& e) {
        annotate(*e.a);
        annotate(*e.b);
        TypePtr at = decayed(e.a->type), bt = decayed(e.b->type);
        switch (e.bin_op) {
            case BinaryOp::Add:
            case BinaryOp::Sub: {
                if (at->kind == TypeKind::Pointer && is_integer(bt->kind)) {
                    e.type = at;
                    return;
                }
                if (e.bin_op == BinaryOp::Add && is_integer(at->kind) &&
                    bt->kind == TypeKind::Pointer) {
                    e.type = bt;
                    return;
                }
                if (e.bin_op == BinaryOp::Sub && at->kind == TypeKind::Pointer &&
                    bt->kind == TypeKind::Pointer) {
                    if (!type_equal(at->pointee, bt->pointee))
                        err("pointer subtraction on distinct types", e.span);
                    e.type = make_scalar(TypeKind::Long);
                    return;
                }
                [[fallthrough]];
            }
            case BinaryOp::Mul:
            case BinaryOp::Div:
                if (!is_arith(at->kind) || !is_arith(bt->kind))
                    err("arithmetic operands required", e.span);
                e.type = usual_arith_conversion(at, bt);
                return;
            case BinaryOp::Mod:
            case BinaryOp::BitAnd:
            case BinaryOp::BitXor:
            case BinaryOp::BitOr:
                if (!is_integer(at->kind) || !is_integer(bt->kind))
                    err("integer operands required", e.span);
                e.type = usual_arith_conversion(at, bt);
                return;
            case BinaryOp::Shl:
            case BinaryOp::Shr:
                if (!is_integer(at->kind) || !is_integer(bt->kind))
                    err("integer operands required", e.span);
                e.type = integer_promote(at);
                return;
            case BinaryOp::Lt:
            case BinaryOp::Gt:
            case BinaryOp::Le:
            case BinaryOp::Ge:
            case BinaryOp::Eq:
            case BinaryOp::Ne:
                if (at->kind == TypeKind::Pointer && bt->kind == TypeKind::Pointer) {
                    if (!type_equal(at->pointee, bt->pointee))
                        err("comparison of distinct pointer types", e.span);
                } else if (!is_arith(at->kind) || !is_arith(bt->kind)) {
                    // allow pointer == integer-zero
                    bool null_cmp = (e.bin_op == BinaryOp::Eq || e.bin_op == BinaryOp::Ne) &&
                                    ((at->kind == TypeKind::Pointer && is_integer(bt->kind)) ||
                                     (bt->kind == TypeKind::Pointer && is_integer(at->kind)));
                    if (!null_cmp) err("invalid comparison operands", e.span);
                }
                e.type = make_scalar(TypeKind::Int);
                return;
            case BinaryOp::LogAnd:
            case BinaryOp::LogOr:
                require_scalar(*e.a);
                require_scalar(*e.b);
                e.type = make_scalar(TypeKind::Int);
                return;
        }
    }
};

bool Sema::const_eval_ok_int(const Expr& e) { return const_eval_int(e).has_value(); }
bool Sema::const_eval_ok_float(const Expr& e) {
    return const_eval_float(e).has_value() || const_eval_int(e).has_value();
}

}  // namespace

void analyze_module(Ast& ast) {
    Sema sema(ast);
    sema.run();
}

}  // namespace blockcc
