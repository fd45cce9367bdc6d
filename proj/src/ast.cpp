#include "blockcc/ast.hpp"

namespace blockcc {

TypePtr make_scalar(TypeKind k) {
    auto t = std::make_shared<Type>();
    t->kind = k;
    return t;
}

TypePtr make_pointer(TypePtr pointee) {
    auto t = std::make_shared<Type>();
    t->kind = TypeKind::Pointer;
    t->pointee = std::move(pointee);
    return t;
}

TypePtr make_array(TypePtr element, uint64_t len) {
    auto t = std::make_shared<Type>();
    t->kind = TypeKind::Array;
    t->element = std::move(element);
    t->array_len = len;
    return t;
}

TypePtr make_record(bool is_union, std::string tag, std::vector<RecordMember> members) {
    auto t = std::make_shared<Type>();
    t->kind = TypeKind::Record;
    t->is_union = is_union;
    t->tag = std::move(tag);
    t->members = std::move(members);
    return t;
}

bool type_equal(const TypePtr& a, const TypePtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case TypeKind::Pointer:
            return type_equal(a->pointee, b->pointee);
        case TypeKind::Array:
            return a->array_len == b->array_len && type_equal(a->element, b->element);
        case TypeKind::Record:
            return a->is_union == b->is_union && a->tag == b->tag;
        default:
            return true;
    }
}

bool is_integer(TypeKind k) {
    switch (k) {
        case TypeKind::Char:
        case TypeKind::UChar:
        case TypeKind::Short:
        case TypeKind::UShort:
        case TypeKind::Int:
        case TypeKind::UInt:
        case TypeKind::Long:
        case TypeKind::ULong:
            return true;
        default:
            return false;
    }
}

bool is_signed_integer(TypeKind k) {
    return k == TypeKind::Char || k == TypeKind::Short || k == TypeKind::Int ||
           k == TypeKind::Long;
}

bool is_float(TypeKind k) { return k == TypeKind::Float || k == TypeKind::Double; }

bool is_arith(TypeKind k) { return is_integer(k) || is_float(k); }

bool is_scalar_kind(TypeKind k) { return is_arith(k) || k == TypeKind::Pointer; }

int integer_rank(TypeKind k) {
    switch (k) {
        case TypeKind::Char:
        case TypeKind::UChar:
            return 1;
        case TypeKind::Short:
        case TypeKind::UShort:
            return 2;
        case TypeKind::Int:
        case TypeKind::UInt:
            return 3;
        case TypeKind::Long:
        case TypeKind::ULong:
            return 4;
        default:
            return 0;
    }
}

unsigned scalar_bit_width(TypeKind k) {
    switch (k) {
        case TypeKind::Char:
        case TypeKind::UChar:
            return 8;
        case TypeKind::Short:
        case TypeKind::UShort:
            return 16;
        case TypeKind::Int:
        case TypeKind::UInt:
        case TypeKind::Float:
            return 32;
        case TypeKind::Long:
        case TypeKind::ULong:
        case TypeKind::Double:
        case TypeKind::Pointer:
            return 64;
        default:
            return 0;
    }
}

int64_t canonical_int(TypeKind k, int64_t raw) {
    unsigned w = scalar_bit_width(k);
    if (w == 0 || w == 64) return raw;
    uint64_t mask = (uint64_t(1) << w) - 1;
    uint64_t v = uint64_t(raw) & mask;
    if (is_signed_integer(k) && (v & (uint64_t(1) << (w - 1)))) v |= ~mask;
    return int64_t(v);
}

std::string type_to_string(const TypePtr& t) {
    if (!t) return "<untyped>";
    switch (t->kind) {
        case TypeKind::Void: return "void";
        case TypeKind::Char: return "char";
        case TypeKind::UChar: return "unsigned char";
        case TypeKind::Short: return "short";
        case TypeKind::UShort: return "unsigned short";
        case TypeKind::Int: return "int";
        case TypeKind::UInt: return "unsigned int";
        case TypeKind::Long: return "long";
        case TypeKind::ULong: return "unsigned long";
        case TypeKind::Float: return "float";
        case TypeKind::Double: return "double";
        case TypeKind::Pointer: return type_to_string(t->pointee) + " *";
        case TypeKind::Array:
            return type_to_string(t->element) + " [" + std::to_string(t->array_len) + "]";
        case TypeKind::Record:
            return std::string(t->is_union ? "union " : "struct ") + t->tag;
    }
    return "<bad>";
}

ExprPtr make_int_lit(uint64_t v) {
    auto e = std::make_unique<Expr>();
    e->kind = ExprKind::IntLit;
    e->int_value = v;
    return e;
}

ExprPtr clone_expr(const Expr& e) {
    auto out = std::make_unique<Expr>();
    out->kind = e.kind;
    out->span = e.span;
    out->int_value = e.int_value;
    out->float_value = e.float_value;
    out->is_hex = e.is_hex;
    out->lit_unsigned = e.lit_unsigned;
    out->lit_long = e.lit_long;
    out->lit_float32 = e.lit_float32;
    out->name = e.name;
    out->un_op = e.un_op;
    out->bin_op = e.bin_op;
    out->member_arrow = e.member_arrow;
    if (e.a) out->a = clone_expr(*e.a);
    if (e.b) out->b = clone_expr(*e.b);
    if (e.c) out->c = clone_expr(*e.c);
    for (const auto& arg : e.args) out->args.push_back(clone_expr(*arg));
    out->cast_type = e.cast_type;
    out->type = e.type;
    return out;
}

bool is_basic_statement(StmtKind k) {
    switch (k) {
        case StmtKind::Assign:
        case StmtKind::Expr:
        case StmtKind::Goto:
        case StmtKind::Blank:
        case StmtKind::Break:
        case StmtKind::Continue:
        case StmtKind::Return:
            return true;
        default:
            return false;
    }
}

StmtPtr clone_stmt(const Stmt& s) {
    auto out = std::make_unique<Stmt>();
    out->kind = s.kind;
    out->span = s.span;
    out->labels = s.labels;
    if (s.lhs) out->lhs = clone_expr(*s.lhs);
    out->assign_op = s.assign_op;
    if (s.rhs) out->rhs = clone_expr(*s.rhs);
    if (s.expr) out->expr = clone_expr(*s.expr);
    out->goto_target = s.goto_target;
    for (const auto& st : s.body) out->body.push_back(clone_stmt(*st));
    if (s.then_branch) out->then_branch = clone_stmt(*s.then_branch);
    if (s.else_branch) out->else_branch = clone_stmt(*s.else_branch);
    if (s.loop_body) out->loop_body = clone_stmt(*s.loop_body);
    if (s.for_init) out->for_init = clone_stmt(*s.for_init);
    if (s.for_incr) out->for_incr = clone_stmt(*s.for_incr);
    for (const auto& cs : s.cases) {
        SwitchCase copy;
        copy.value = cs.value;
        copy.span = cs.span;
        for (const auto& st : cs.body) copy.body.push_back(clone_stmt(*st));
        out->cases.push_back(std::move(copy));
    }
    out->decl_name = s.decl_name;
    out->decl_type = s.decl_type;
    if (s.decl_init) out->decl_init = clone_expr(*s.decl_init);
    return out;
}

FunctionDef clone_function(const FunctionDef& fn) {
    FunctionDef out;
    out.name = fn.name;
    out.return_type = fn.return_type;
    out.params = fn.params;
    if (fn.body) out.body = clone_stmt(*fn.body);
    out.span = fn.span;
    return out;
}

Ast clone_ast(const Ast& ast) {
    Ast out;
    out.records = ast.records;
    for (const auto& g : ast.globals) {
        GlobalDecl copy;
        copy.name = g.name;
        copy.type = g.type;
        if (g.init) copy.init = clone_expr(*g.init);
        copy.span = g.span;
        out.globals.push_back(std::move(copy));
    }
    for (const auto& fn : ast.functions) out.functions.push_back(clone_function(fn));
    return out;
}

const FunctionDef* find_function(const Ast& ast, const std::string& name) {
    for (const auto& fn : ast.functions)
        if (fn.name == name) return &fn;
    return nullptr;
}

const char* unary_op_spelling(UnaryOp op) {
    switch (op) {
        case UnaryOp::Neg: return "-";
        case UnaryOp::Not: return "!";
        case UnaryOp::BitNot: return "~";
        case UnaryOp::Deref: return "*";
        case UnaryOp::Addr: return "&";
        case UnaryOp::PreInc: return "++";
        case UnaryOp::PreDec: return "--";
        case UnaryOp::PostInc: return "++";
        case UnaryOp::PostDec: return "--";
        case UnaryOp::Plus: return "+";
    }
    return "?";
}

const char* binary_op_spelling(BinaryOp op) {
    switch (op) {
        case BinaryOp::Add: return "+";
        case BinaryOp::Sub: return "-";
        case BinaryOp::Mul: return "*";
        case BinaryOp::Div: return "/";
        case BinaryOp::Mod: return "%";
        case BinaryOp::Shl: return "<<";
        case BinaryOp::Shr: return ">>";
        case BinaryOp::Lt: return "<";
        case BinaryOp::Gt: return ">";
        case BinaryOp::Le: return "<=";
        case BinaryOp::Ge: return ">=";
        case BinaryOp::Eq: return "==";
        case BinaryOp::Ne: return "!=";
        case BinaryOp::BitAnd: return "&";
        case BinaryOp::BitXor: return "^";
        case BinaryOp::BitOr: return "|";
        case BinaryOp::LogAnd: return "&&";
        case BinaryOp::LogOr: return "||";
    }
    return "?";
}

const char* assign_op_spelling(AssignOp op) {
    switch (op) {
        case AssignOp::Set: return "=";
        case AssignOp::Add: return "+=";
        case AssignOp::Sub: return "-=";
        case AssignOp::Mul: return "*=";
        case AssignOp::Div: return "/=";
        case AssignOp::Mod: return "%=";
        case AssignOp::Shl: return "<<=";
        case AssignOp::Shr: return ">>=";
        case AssignOp::And: return "&=";
        case AssignOp::Xor: return "^=";
        case AssignOp::Or: return "|=";
    }
    return "?";
}

const char* stmt_kind_name(StmtKind k) {
    switch (k) {
        case StmtKind::Assign: return "Assign";
        case StmtKind::Expr: return "Expr";
        case StmtKind::Goto: return "Goto";
        case StmtKind::Blank: return "Blank";
        case StmtKind::Block: return "Block";
        case StmtKind::If: return "If";
        case StmtKind::While: return "While";
        case StmtKind::For: return "For";
        case StmtKind::DoWhile: return "DoWhile";
        case StmtKind::Switch: return "Switch";
        case StmtKind::Break: return "Break";
        case StmtKind::Continue: return "Continue";
        case StmtKind::Return: return "Return";
        case StmtKind::Decl: return "Decl";
    }
    return "?";
}

}  // namespace blockcc
