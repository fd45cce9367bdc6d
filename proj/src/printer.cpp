#include "blockcc/printer.hpp"

#include <cinttypes>
#include <cstdio>

namespace blockcc {

namespace {

constexpr int kIndentWidth = 4;

std::string indent_of(int level) {
    return std::string(static_cast<size_t>(level) * kIndentWidth, ' ');
}

// C precedence levels used for minimal parenthesization.
int binary_prec(BinaryOp op) {
    switch (op) {
        case BinaryOp::Mul:
        case BinaryOp::Div:
        case BinaryOp::Mod: return 13;
        case BinaryOp::Add:
        case BinaryOp::Sub: return 12;
        case BinaryOp::Shl:
        case BinaryOp::Shr: return 11;
        case BinaryOp::Lt:
        case BinaryOp::Gt:
        case BinaryOp::Le:
        case BinaryOp::Ge: return 10;
        case BinaryOp::Eq:
        case BinaryOp::Ne: return 9;
        case BinaryOp::BitAnd: return 8;
        case BinaryOp::BitXor: return 7;
        case BinaryOp::BitOr: return 6;
        case BinaryOp::LogAnd: return 5;
        case BinaryOp::LogOr: return 4;
    }
    return 0;
}

int expr_prec(const Expr& e) {
    switch (e.kind) {
        case ExprKind::IntLit:
        case ExprKind::FloatLit:
        case ExprKind::Ident:
            return 17;
        case ExprKind::Call:
        case ExprKind::Index:
        case ExprKind::Member:
            return 16;
        case ExprKind::Unary:
            if (e.un_op == UnaryOp::PostInc || e.un_op == UnaryOp::PostDec) return 16;
            return 15;
        case ExprKind::Cast:
            return 15;
        case ExprKind::Binary:
            return binary_prec(e.bin_op);
        case ExprKind::Cond:
            return 3;
    }
    return 0;
}

void print_expr_rec(const Expr& e, int min_prec, std::string& out);

void print_child(const Expr& e, int min_prec, std::string& out) {
    if (expr_prec(e) < min_prec) {
        out += '(';
        print_expr_rec(e, 0, out);
        out += ')';
    } else {
        print_expr_rec(e, 0, out);
    }
}

std::string format_float(double v, bool float32) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    std::string s = buf;
    if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
        s.find("inf") == std::string::npos && s.find("nan") == std::string::npos)
        s += ".0";
    if (float32) s += 'f';
    return s;
}

std::string format_int(const Expr& e) {
    char buf[64];
    if (e.is_hex)
        std::snprintf(buf, sizeof buf, "0x%" PRIx64, e.int_value);
    else
        std::snprintf(buf, sizeof buf, "%" PRIu64, e.int_value);
    std::string s = buf;
    if (e.lit_unsigned) s += 'U';
    if (e.lit_long) s += 'L';
    return s;
}

void print_expr_rec(const Expr& e, int min_prec, std::string& out) {
    (void)min_prec;
    switch (e.kind) {
        case ExprKind::IntLit:
            out += format_int(e);
            return;
        case ExprKind::FloatLit:
            out += format_float(e.float_value, e.lit_float32);
            return;
        case ExprKind::Ident:
            out += e.name;
            return;
        case ExprKind::Unary: {
            if (e.un_op == UnaryOp::PostInc || e.un_op == UnaryOp::PostDec) {
                print_child(*e.a, 16, out);
                out += unary_op_spelling(e.un_op);
                return;
            }
            out += unary_op_spelling(e.un_op);
            // Avoid gluing "- -x" into "--x".
            const Expr& operand = *e.a;
            bool needs_space =
                operand.kind == ExprKind::Unary &&
                ((e.un_op == UnaryOp::Neg &&
                  (operand.un_op == UnaryOp::Neg || operand.un_op == UnaryOp::PreDec)) ||
                 (e.un_op == UnaryOp::Plus &&
                  (operand.un_op == UnaryOp::Plus || operand.un_op == UnaryOp::PreInc)));
            if (needs_space) out += ' ';
            print_child(operand, 15, out);
            return;
        }
        case ExprKind::Binary: {
            int prec = binary_prec(e.bin_op);
            print_child(*e.a, prec, out);
            out += ' ';
            out += binary_op_spelling(e.bin_op);
            out += ' ';
            print_child(*e.b, prec + 1, out);
            return;
        }
        case ExprKind::Cond:
            print_child(*e.a, 4, out);
            out += " ? ";
            print_child(*e.b, 3, out);
            out += " : ";
            print_child(*e.c, 3, out);
            return;
        case ExprKind::Call: {
            out += e.name;
            out += '(';
            for (size_t i = 0; i < e.args.size(); ++i) {
                if (i) out += ", ";
                print_expr_rec(*e.args[i], 0, out);
            }
            out += ')';
            return;
        }
        case ExprKind::Index:
            print_child(*e.a, 16, out);
            out += '[';
            print_expr_rec(*e.b, 0, out);
            out += ']';
            return;
        case ExprKind::Member:
            print_child(*e.a, 16, out);
            out += e.member_arrow ? "->" : ".";
            out += e.name;
            return;
        case ExprKind::Cast:
            out += '(';
            out += print_declarator(e.cast_type, "");
            out += ')';
            print_child(*e.a, 15, out);
            return;
    }
}

}  // namespace

std::string print_declarator(const TypePtr& type, const std::string& name) {
    // Walk down pointer/array structure accumulating the declarator string.
    std::string inner = name;
    TypePtr t = type;
    for (;;) {
        if (t->kind == TypeKind::Pointer) {
            inner = "*" + inner;
            t = t->pointee;
        } else if (t->kind == TypeKind::Array) {
            if (!inner.empty() && inner[0] == '*') inner = "(" + inner + ")";
            inner += "[" + std::to_string(t->array_len) + "]";
            t = t->element;
        } else {
            break;
        }
    }
    std::string base = type_to_string(t);
    if (inner.empty()) return base;
    return base + " " + inner;
}

std::string print_expr(const Expr& e) {
    std::string out;
    print_expr_rec(e, 0, out);
    return out;
}

namespace {

void print_stmt_rec(const Stmt& s, int indent, std::string& out);

void print_block_items(const std::vector<StmtPtr>& items, int indent, std::string& out) {
    for (const auto& st : items) print_stmt_rec(*st, indent, out);
}

// Statement text without indentation or trailing newline, for for-headers.
std::string inline_simple_stmt(const Stmt& s, bool with_semicolon) {
    std::string out;
    switch (s.kind) {
        case StmtKind::Blank:
            break;
        case StmtKind::Expr:
            out = print_expr(*s.expr);
            break;
        case StmtKind::Assign:
            out = print_expr(*s.lhs);
            out += ' ';
            out += assign_op_spelling(s.assign_op);
            out += ' ';
            out += print_expr(*s.rhs);
            break;
        case StmtKind::Decl:
            out = print_declarator(s.decl_type, s.decl_name);
            if (s.decl_init) {
                out += " = ";
                out += print_expr(*s.decl_init);
            }
            break;
        default:
            fail(ErrorKind::Internal, "statement not valid in for-header");
    }
    if (with_semicolon) out += ';';
    return out;
}

void open_block(const Stmt& body, int indent, std::string& out) {
    out += "{\n";
    print_block_items(body.body, indent + 1, out);
    out += indent_of(indent);
    out += "}";
}

void print_stmt_rec(const Stmt& s, int indent, std::string& out) {
    for (const auto& label : s.labels) {
        out += indent_of(indent);
        out += label;
        out += ":\n";
    }
    out += indent_of(indent);
    switch (s.kind) {
        case StmtKind::Blank:
            out += ";\n";
            return;
        case StmtKind::Expr:
            out += print_expr(*s.expr);
            out += ";\n";
            return;
        case StmtKind::Assign:
            out += inline_simple_stmt(s, true);
            out += '\n';
            return;
        case StmtKind::Decl:
            out += inline_simple_stmt(s, true);
            out += '\n';
            return;
        case StmtKind::Goto:
            out += "goto ";
            out += s.goto_target;
            out += ";\n";
            return;
        case StmtKind::Break:
            out += "break;\n";
            return;
        case StmtKind::Continue:
            out += "continue;\n";
            return;
        case StmtKind::Return:
            out += "return";
            if (s.expr) {
                out += ' ';
                out += print_expr(*s.expr);
            }
            out += ";\n";
            return;
        case StmtKind::Block:
            out += "{\n";
            print_block_items(s.body, indent + 1, out);
            out += indent_of(indent);
            out += "}\n";
            return;
        case StmtKind::If:
            out += "if (";
            out += print_expr(*s.expr);
            out += ") ";
            open_block(*s.then_branch, indent, out);
            if (s.else_branch) {
                out += " else ";
                open_block(*s.else_branch, indent, out);
            }
            out += '\n';
            return;
        case StmtKind::While:
            out += "while (";
            out += print_expr(*s.expr);
            out += ") ";
            open_block(*s.loop_body, indent, out);
            out += '\n';
            return;
        case StmtKind::DoWhile:
            out += "do ";
            open_block(*s.loop_body, indent, out);
            out += " while (";
            out += print_expr(*s.expr);
            out += ");\n";
            return;
        case StmtKind::For:
            out += "for (";
            out += inline_simple_stmt(*s.for_init, true);
            out += ' ';
            out += print_expr(*s.expr);
            out += "; ";
            out += inline_simple_stmt(*s.for_incr, false);
            out += ") ";
            open_block(*s.loop_body, indent, out);
            out += '\n';
            return;
        case StmtKind::Switch:
            out += "switch (";
            out += print_expr(*s.expr);
            out += ") {\n";
            for (const auto& cs : s.cases) {
                out += indent_of(indent);
                if (cs.value) {
                    out += "case ";
                    if (*cs.value < 0) {
                        out += '-';
                        out += std::to_string(-(*cs.value));
                    } else {
                        out += std::to_string(*cs.value);
                    }
                    out += ":\n";
                } else {
                    out += "default:\n";
                }
                print_block_items(cs.body, indent + 1, out);
            }
            out += indent_of(indent);
            out += "}\n";
            return;
    }
}

}  // namespace

std::string print_stmt(const Stmt& s, int indent) {
    std::string out;
    print_stmt_rec(s, indent, out);
    return out;
}

std::string print_function(const FunctionDef& fn) {
    std::string out = type_to_string(fn.return_type);
    out += ' ';
    out += fn.name;
    out += '(';
    for (size_t i = 0; i < fn.params.size(); ++i) {
        if (i) out += ", ";
        out += print_declarator(fn.params[i].type, fn.params[i].name);
    }
    out += ") {\n";
    print_block_items(fn.body->body, 1, out);
    out += "}\n";
    return out;
}

std::string print_module(const Ast& ast) {
    std::string out;
    bool first = true;
    auto sep = [&] {
        if (!first) out += '\n';
        first = false;
    };
    for (const auto& rec : ast.records) {
        sep();
        out += rec.type->is_union ? "union " : "struct ";
        out += rec.type->tag;
        out += " {\n";
        for (const auto& m : rec.type->members) {
            out += indent_of(1);
            out += print_declarator(m.type, m.name);
            out += ";\n";
        }
        out += "};\n";
    }
    for (const auto& g : ast.globals) {
        sep();
        out += print_declarator(g.type, g.name);
        if (g.init) {
            out += " = ";
            out += print_expr(*g.init);
        }
        out += ";\n";
    }
    for (const auto& fn : ast.functions) {
        sep();
        out += print_function(fn);
    }
    return out;
}

}  // namespace blockcc
