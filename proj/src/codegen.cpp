#include <bit>
#include <cstdio>
#include <optional>

#include "blockcc/layout.hpp"
#include "blockcc/rebuild.hpp"
#include "blockcc/sema.hpp"
#include "blockcc/translation.hpp"

namespace blockcc {

namespace {

const char* INT_ARG_REGS64[6] = {"%rdi", "%rsi", "%rdx", "%rcx", "%r8", "%r9"};

bool fits_imm32(int64_t v) { return v >= INT32_MIN && v <= INT32_MAX; }

std::string hex_u64(uint64_t v) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "0x%llx", static_cast<unsigned long long>(v));
    return buf;
}

TypePtr decay(const TypePtr& t) {
    return t->kind == TypeKind::Array ? make_pointer(t->element) : t;
}

struct Codegen {
    const FunctionDef& fn;
    const SymbolTable& table;
    const Ast* module;
    std::string scope;
    std::vector<std::string> lines;
    int next_tmp = 0;
    int next_lit = 0;
    std::vector<std::string> break_labels;
    std::vector<std::string> continue_labels;

    Codegen(const FunctionDef& f, const SymbolTable& t, const Ast* m, std::string sc)
        : fn(f), table(t), module(m), scope(std::move(sc)) {}

    void ins(const std::string& text) { lines.push_back("\t" + text); }
    void put_label(const std::string& l) { lines.push_back(l + ":"); }
    std::string fresh() {
        return ".L_" + fn.name + "__t" + scope + "_" + std::to_string(next_tmp++);
    }

    std::string text() const {
        std::string out;
        for (const auto& l : lines) {
            out += l;
            out += '\n';
        }
        return out;
    }

    TypePtr type_of(const Expr& e) {
        if (!e.type)
            fail(ErrorKind::Internal, "expression lacks a type; run sema before codegen",
                 e.span);
        return e.type;
    }

    // ---- memory operands ---------------------------------------------------

    std::optional<std::string> scalar_operand(const Expr& e) {
        if (e.kind != ExprKind::Ident) return std::nullopt;
        TypePtr t = type_of(e);
        if (!is_arith(t->kind) && t->kind != TypeKind::Pointer) return std::nullopt;
        if (const Slot* s = table.find(e.name))
            return std::to_string(s->offset) + "(%rbp)";
        if (const GlobalPlan* g = table.find_global(e.name)) return g->label + "(%rip)";
        fail(ErrorKind::Internal, "no storage mapped for '" + e.name + "'", e.span);
    }

    void load_from(const std::string& m, const TypePtr& t) {
        switch (t->kind) {
            case TypeKind::Char: ins("movsbq " + m + ", %rax"); return;
            case TypeKind::UChar: ins("movzbq " + m + ", %rax"); return;
            case TypeKind::Short: ins("movswq " + m + ", %rax"); return;
            case TypeKind::UShort: ins("movzwq " + m + ", %rax"); return;
            case TypeKind::Int: ins("movslq " + m + ", %rax"); return;
            case TypeKind::UInt: ins("movl " + m + ", %eax"); return;
            case TypeKind::Long:
            case TypeKind::ULong:
            case TypeKind::Pointer: ins("movq " + m + ", %rax"); return;
            case TypeKind::Float: ins("movss " + m + ", %xmm0"); return;
            case TypeKind::Double: ins("movsd " + m + ", %xmm0"); return;
            default:
                fail(ErrorKind::UnsupportedFeature,
                     "cannot load aggregate value of type " + type_to_string(t));
        }
    }

    void store_to(const std::string& m, const TypePtr& t) {
        switch (t->kind) {
            case TypeKind::Char:
            case TypeKind::UChar: ins("movb %al, " + m); return;
            case TypeKind::Short:
            case TypeKind::UShort: ins("movw %ax, " + m); return;
            case TypeKind::Int:
            case TypeKind::UInt: ins("movl %eax, " + m); return;
            case TypeKind::Long:
            case TypeKind::ULong:
            case TypeKind::Pointer: ins("movq %rax, " + m); return;
            case TypeKind::Float: ins("movss %xmm0, " + m); return;
            case TypeKind::Double: ins("movsd %xmm0, " + m); return;
            default:
                fail(ErrorKind::UnsupportedFeature,
                     "cannot store aggregate value of type " + type_to_string(t));
        }
    }

    // Re-extend %rax so it holds the canonical 64-bit form of a value of
    // kind k (truncated to k's width, then sign- or zero-extended).
    void canon(TypeKind k) {
        if (k == TypeKind::Pointer) return;
        bool sgn = is_signed_integer(k);
        switch (scalar_bit_width(k)) {
            case 8: ins(sgn ? "movsbq %al, %rax" : "movzbq %al, %rax"); return;
            case 16: ins(sgn ? "movswq %ax, %rax" : "movzwq %ax, %rax"); return;
            case 32:
                if (sgn)
                    ins("cltq");
                else
                    ins("movl %eax, %eax");
                return;
            case 64: return;
        }
        fail(ErrorKind::Internal, "unexpected scalar width");
    }

    // ---- stack spills ------------------------------------------------------

    void push_int() { ins("pushq %rax"); }
    void pop_rcx() { ins("popq %rcx"); }
    void push_f() {
        ins("subq $8, %rsp");
        ins("movsd %xmm0, (%rsp)");
    }
    void pop_f0() {
        ins("movsd (%rsp), %xmm0");
        ins("addq $8, %rsp");
    }

    // ---- constants ----------------------------------------------------------

    void float_const_to(const char* xmm, double v, bool f32) {
        std::string l = ".LC_" + fn.name + "__" + scope + "_" + std::to_string(next_lit++);
        ins(".section .rodata");
        ins(std::string(".align ") + (f32 ? "4" : "8"));
        put_label(l);
        if (f32)
            ins(".long " + hex_u64(std::bit_cast<uint32_t>(static_cast<float>(v))));
        else
            ins(".quad " + hex_u64(std::bit_cast<uint64_t>(v)));
        ins(".text");
        ins(std::string(f32 ? "movss " : "movsd ") + l + "(%rip), " + xmm);
    }

    void int_const_to_rax(int64_t v) {
        if (fits_imm32(v))
            ins("movq $" + std::to_string(v) + ", %rax");
        else if (v > 0 && static_cast<uint64_t>(v) <= UINT32_MAX)
            ins("movl $" + std::to_string(v) + ", %eax");
        else
            ins("movabsq $" + std::to_string(v) + ", %rax");
    }

    // ---- conversions ---------------------------------------------------------

    void convert(const TypePtr& from_raw, const TypePtr& to) {
        TypePtr from = decay(from_raw);
        if (from->kind == to->kind) {
            return;
        }
        bool ff = is_float(from->kind);
        bool tf = is_float(to->kind);
        if (!ff && !tf) {
            if (to->kind == TypeKind::Pointer)
                return;
            canon(to->kind);
            return;
        }
        if (!ff) {
            bool f32 = to->kind == TypeKind::Float;
            if (from->kind == TypeKind::ULong) {
                ins("testq %rax, %rax");
                ins("js 1f");
                ins("pxor %xmm0, %xmm0");
                ins("cvtsi2sdq %rax, %xmm0");
                ins("jmp 2f");
                put_label("1");
                ins("movq %rax, %rcx");
                ins("shrq $1, %rcx");
                ins("andl $1, %eax");
                ins("orq %rax, %rcx");
                ins("pxor %xmm0, %xmm0");
                ins("cvtsi2sdq %rcx, %xmm0");
                ins("addsd %xmm0, %xmm0");
                put_label("2");
                if (f32) ins("cvtsd2ss %xmm0, %xmm0");
            } else {
                ins("pxor %xmm0, %xmm0");
                ins(std::string(f32 ? "cvtsi2ssq" : "cvtsi2sdq") + " %rax, %xmm0");
            }
            return;
        }
        if (!tf) {
            bool f32 = from->kind == TypeKind::Float;
            if (to->kind == TypeKind::ULong) {
                if (f32) ins("cvtss2sd %xmm0, %xmm0");
                ins("movabsq $0x43e0000000000000, %rcx");
                ins("movq %rcx, %xmm1");
                ins("ucomisd %xmm1, %xmm0");
                ins("jae 1f");
                ins("cvttsd2siq %xmm0, %rax");
                ins("jmp 2f");
                put_label("1");
                ins("subsd %xmm1, %xmm0");
                ins("cvttsd2siq %xmm0, %rax");
                ins("movabsq $0x8000000000000000, %rcx");
                ins("xorq %rcx, %rax");
                put_label("2");
                return;
            }
            ins(std::string(f32 ? "cvttss2siq" : "cvttsd2siq") + " %xmm0, %rax");
            canon(to->kind);
            return;
        }
        if (from->kind == TypeKind::Float && to->kind == TypeKind::Double)
            ins("cvtss2sd %xmm0, %xmm0");
        else if (from->kind == TypeKind::Double && to->kind == TypeKind::Float)
            ins("cvtsd2ss %xmm0, %xmm0");
    }

    // ---- addresses -----------------------------------------------------------

    void emit_addr(const Expr& e) {
        switch (e.kind) {
            case ExprKind::Ident: {
                if (const Slot* s = table.find(e.name)) {
                    ins("leaq " + std::to_string(s->offset) + "(%rbp), %rax");
                    return;
                }
                if (const GlobalPlan* g = table.find_global(e.name)) {
                    ins("leaq " + g->label + "(%rip), %rax");
                    return;
                }
                fail(ErrorKind::Internal, "no storage mapped for '" + e.name + "'", e.span);
            }
            case ExprKind::Unary:
                if (e.un_op == UnaryOp::Deref) {
                    emit_expr(*e.a);
                    return;
                }
                break;
            case ExprKind::Index: {
                TypePtr bt = type_of(*e.a);
                if (bt->kind == TypeKind::Array)
                    emit_addr(*e.a);
                else
                    emit_expr(*e.a);
                push_int();
                emit_expr(*e.b);
                convert(type_of(*e.b), make_scalar(TypeKind::Long));
                scale_rax(compute_layout(type_of(e)).size);
                ins("movq %rax, %rcx");
                ins("popq %rax");
                ins("addq %rcx, %rax");
                return;
            }
            case ExprKind::Member: {
                TypePtr bt = type_of(*e.a);
                TypePtr rec;
                if (e.member_arrow) {
                    emit_expr(*e.a);
                    rec = decay(bt)->pointee;
                } else {
                    emit_addr(*e.a);
                    rec = bt;
                }
                TypeLayout rl = compute_layout(rec);
                for (const auto& m : rl.members) {
                    if (m.name == e.name) {
                        if (m.offset) ins("addq $" + std::to_string(m.offset) + ", %rax");
                        return;
                    }
                }
                fail(ErrorKind::Internal, "member '" + e.name + "' not in layout", e.span);
            }
            default:
                break;
        }
        fail(ErrorKind::Internal, "expression is not an lvalue", e.span);
    }

    void scale_rax(uint64_t size) {
        if (size == 1) return;
        if (size <= INT32_MAX) {
            ins("imulq $" + std::to_string(size) + ", %rax, %rax");
        } else {
            ins("movabsq $" + std::to_string(size) + ", %rcx");
            ins("imulq %rcx, %rax");
        }
    }

    // ---- expressions ---------------------------------------------------------

    void emit_expr(const Expr& e) {
        switch (e.kind) {
            case ExprKind::IntLit: {
                TypePtr t = type_of(e);
                int_const_to_rax(canonical_int(t->kind, static_cast<int64_t>(e.int_value)));
                return;
            }
            case ExprKind::FloatLit: {
                TypePtr t = type_of(e);
                float_const_to("%xmm0", e.float_value, t->kind == TypeKind::Float);
                return;
            }
            case ExprKind::Ident: {
                TypePtr t = type_of(e);
                if (t->kind == TypeKind::Array) {
                    emit_addr(e);
                    return;
                }
                auto m = scalar_operand(e);
                if (!m)
                    fail(ErrorKind::UnsupportedFeature,
                         "cannot load aggregate value of type " + type_to_string(t),
                         e.span);
                load_from(*m, t);
                return;
            }
            case ExprKind::Unary: emit_unary(e); return;
            case ExprKind::Binary: emit_binary(e); return;
            case ExprKind::Cond: {
                std::string els = fresh(), end = fresh();
                branch_false(*e.a, els);
                emit_expr(*e.b);
                convert(type_of(*e.b), type_of(e));
                ins("jmp " + end);
                put_label(els);
                emit_expr(*e.c);
                convert(type_of(*e.c), type_of(e));
                put_label(end);
                return;
            }
            case ExprKind::Call: emit_call(e); return;
            case ExprKind::Index:
            case ExprKind::Member: {
                emit_addr(e);
                TypePtr t = type_of(e);
                if (t->kind != TypeKind::Array) load_from("(%rax)", t);
                return;
            }
            case ExprKind::Cast: {
                emit_expr(*e.a);
                if (e.cast_type->kind != TypeKind::Void)
                    convert(type_of(*e.a), e.cast_type);
                return;
            }
        }
        fail(ErrorKind::Internal, "unhandled expression kind", e.span);
    }

    void emit_unary(const Expr& e) {
        TypePtr t = type_of(e);
        switch (e.un_op) {
            case UnaryOp::Plus:
                emit_expr(*e.a);
                convert(type_of(*e.a), t);
                return;
            case UnaryOp::Neg:
                emit_expr(*e.a);
                convert(type_of(*e.a), t);
                if (t->kind == TypeKind::Float) {
                    ins("movl $0x80000000, %ecx");
                    ins("movd %ecx, %xmm1");
                    ins("xorps %xmm1, %xmm0");
                } else if (t->kind == TypeKind::Double) {
                    ins("movabsq $0x8000000000000000, %rcx");
                    ins("movq %rcx, %xmm1");
                    ins("xorpd %xmm1, %xmm0");
                } else {
                    ins("negq %rax");
                    canon(t->kind);
                }
                return;
            case UnaryOp::Not:
                truth_value(*e.a);
                ins("testq %rax, %rax");
                ins("sete %al");
                ins("movzbq %al, %rax");
                return;
            case UnaryOp::BitNot:
                emit_expr(*e.a);
                convert(type_of(*e.a), t);
                ins("notq %rax");
                canon(t->kind);
                return;
            case UnaryOp::Deref:
                emit_expr(*e.a);
                if (t->kind != TypeKind::Array) load_from("(%rax)", t);
                return;
            case UnaryOp::Addr:
                emit_addr(*e.a);
                return;
            case UnaryOp::PreInc: emit_incdec(e, true, false); return;
            case UnaryOp::PreDec: emit_incdec(e, false, false); return;
            case UnaryOp::PostInc: emit_incdec(e, true, true); return;
            case UnaryOp::PostDec: emit_incdec(e, false, true); return;
        }
        fail(ErrorKind::Internal, "unhandled unary operator", e.span);
    }

    void emit_incdec(const Expr& e, bool inc, bool post) {
        const Expr& target = *e.a;
        TypePtr t = type_of(target);
        std::string mem;
        if (auto m = scalar_operand(target)) {
            mem = *m;
        } else {
            emit_addr(target);
            ins("movq %rax, %rcx");
            mem = "(%rcx)";
        }
        if (is_float(t->kind)) {
            bool f32 = t->kind == TypeKind::Float;
            load_from(mem, t);
            if (post) push_f();
            float_const_to("%xmm1", 1.0, f32);
            ins(std::string(inc ? "add" : "sub") + (f32 ? "ss" : "sd") + " %xmm1, %xmm0");
            store_to(mem, t);
            if (post) pop_f0();
        } else {
            uint64_t delta =
                t->kind == TypeKind::Pointer ? compute_layout(t->pointee).size : 1;
            load_from(mem, t);
            if (post) push_int();
            ins(std::string(inc ? "addq" : "subq") + " $" + std::to_string(delta) +
                ", %rax");
            canon(t->kind);
            store_to(mem, t);
            if (post) ins("popq %rax");
        }
    }

    // Evaluates e and leaves a canonical 0/1 truth value in %rax for float
    // operands; integer and pointer values stay as-is (test against zero).
    void truth_value(const Expr& e) {
        emit_expr(e);
        TypePtr t = decay(type_of(e));
        if (!is_float(t->kind)) return;
        bool f32 = t->kind == TypeKind::Float;
        ins("pxor %xmm1, %xmm1");
        ins(std::string(f32 ? "ucomiss" : "ucomisd") + " %xmm1, %xmm0");
        ins("setne %al");
        ins("setp %cl");
        ins("orb %cl, %al");
        ins("movzbq %al, %rax");
    }

    void branch_false(const Expr& e, const std::string& target) {
        truth_value(e);
        ins("testq %rax, %rax");
        ins("jz " + target);
    }

    void emit_fcmp(BinaryOp op, bool f32) {
        std::string cmp = f32 ? "ucomiss" : "ucomisd";
        switch (op) {
            case BinaryOp::Gt:
                ins(cmp + " %xmm1, %xmm0");
                ins("seta %al");
                break;
            case BinaryOp::Ge:
                ins(cmp + " %xmm1, %xmm0");
                ins("setae %al");
                break;
            case BinaryOp::Lt:
                ins(cmp + " %xmm0, %xmm1");
                ins("seta %al");
                break;
            case BinaryOp::Le:
                ins(cmp + " %xmm0, %xmm1");
                ins("setae %al");
                break;
            case BinaryOp::Eq:
                ins(cmp + " %xmm1, %xmm0");
                ins("setnp %al");
                ins("sete %cl");
                ins("andb %cl, %al");
                break;
            case BinaryOp::Ne:
                ins(cmp + " %xmm1, %xmm0");
                ins("setp %al");
                ins("setne %cl");
                ins("orb %cl, %al");
                break;
            default:
                fail(ErrorKind::Internal, "not a float comparison");
        }
        ins("movzbq %al, %rax");
    }

    static bool is_compare(BinaryOp op) {
        switch (op) {
            case BinaryOp::Lt:
            case BinaryOp::Gt:
            case BinaryOp::Le:
            case BinaryOp::Ge:
            case BinaryOp::Eq:
            case BinaryOp::Ne: return true;
            default: return false;
        }
    }

    // Operates on a spilled left operand (top of stack) and the right operand
    // in %rax / %xmm0, both already converted to `common`. Leaves the result
    // in %rax (canonical at `result`, or 0/1 for comparisons) or %xmm0.
    void binary_core(BinaryOp op, const TypePtr& common, const TypePtr& result) {
        if (is_float(common->kind)) {
            bool f32 = common->kind == TypeKind::Float;
            std::string sf = f32 ? "ss" : "sd";
            ins("movaps %xmm0, %xmm1");
            pop_f0();
            switch (op) {
                case BinaryOp::Add: ins("add" + sf + " %xmm1, %xmm0"); return;
                case BinaryOp::Sub: ins("sub" + sf + " %xmm1, %xmm0"); return;
                case BinaryOp::Mul: ins("mul" + sf + " %xmm1, %xmm0"); return;
                case BinaryOp::Div: ins("div" + sf + " %xmm1, %xmm0"); return;
                default:
                    if (is_compare(op)) {
                        emit_fcmp(op, f32);
                        return;
                    }
                    fail(ErrorKind::UnsupportedFeature,
                         "operator not defined for floating-point operands");
            }
        }
        ins("movq %rax, %rcx");
        ins("popq %rax");
        bool sgn = common->kind != TypeKind::Pointer && is_signed_integer(common->kind);
        bool wide = common->kind == TypeKind::Pointer ||
                    scalar_bit_width(common->kind) == 64;
        switch (op) {
            case BinaryOp::Add: ins("addq %rcx, %rax"); break;
            case BinaryOp::Sub: ins("subq %rcx, %rax"); break;
            case BinaryOp::Mul: ins("imulq %rcx, %rax"); break;
            case BinaryOp::BitAnd: ins("andq %rcx, %rax"); break;
            case BinaryOp::BitOr: ins("orq %rcx, %rax"); break;
            case BinaryOp::BitXor: ins("xorq %rcx, %rax"); break;
            case BinaryOp::Div:
            case BinaryOp::Mod:
                if (wide) {
                    if (sgn) {
                        ins("cqto");
                        ins("idivq %rcx");
                    } else {
                        ins("xorl %edx, %edx");
                        ins("divq %rcx");
                    }
                    if (op == BinaryOp::Mod) ins("movq %rdx, %rax");
                } else {
                    if (sgn) {
                        ins("cltd");
                        ins("idivl %ecx");
                    } else {
                        ins("xorl %edx, %edx");
                        ins("divl %ecx");
                    }
                    if (op == BinaryOp::Mod) ins("movl %edx, %eax");
                }
                break;
            case BinaryOp::Shl:
                ins(wide ? "salq %cl, %rax" : "sall %cl, %eax");
                break;
            case BinaryOp::Shr:
                if (wide)
                    ins(sgn ? "sarq %cl, %rax" : "shrq %cl, %rax");
                else
                    ins(sgn ? "sarl %cl, %eax" : "shrl %cl, %eax");
                break;
            default: {
                if (!is_compare(op))
                    fail(ErrorKind::Internal, "unhandled binary operator");
                ins("cmpq %rcx, %rax");
                const char* cc = nullptr;
                switch (op) {
                    case BinaryOp::Lt: cc = sgn ? "setl" : "setb"; break;
                    case BinaryOp::Le: cc = sgn ? "setle" : "setbe"; break;
                    case BinaryOp::Gt: cc = sgn ? "setg" : "seta"; break;
                    case BinaryOp::Ge: cc = sgn ? "setge" : "setae"; break;
                    case BinaryOp::Eq: cc = "sete"; break;
                    case BinaryOp::Ne: cc = "setne"; break;
                    default: break;
                }
                ins(std::string(cc) + " %al");
                ins("movzbq %al, %rax");
                return;
            }
        }
        canon(result->kind);
    }

    void emit_binary(const Expr& e) {
        TypePtr at = decay(type_of(*e.a));
        TypePtr bt = decay(type_of(*e.b));

        if (e.bin_op == BinaryOp::LogAnd || e.bin_op == BinaryOp::LogOr) {
            bool is_and = e.bin_op == BinaryOp::LogAnd;
            std::string shortcut = fresh(), end = fresh();
            truth_value(*e.a);
            ins("testq %rax, %rax");
            ins((is_and ? "jz " : "jnz ") + shortcut);
            truth_value(*e.b);
            ins("testq %rax, %rax");
            ins("setne %al");
            ins("movzbq %al, %rax");
            ins("jmp " + end);
            put_label(shortcut);
            ins(is_and ? "movl $0, %eax" : "movl $1, %eax");
            put_label(end);
            return;
        }

        bool ap = at->kind == TypeKind::Pointer;
        bool bp = bt->kind == TypeKind::Pointer;

        if ((e.bin_op == BinaryOp::Add || e.bin_op == BinaryOp::Sub) && ap && bp) {
            emit_expr(*e.a);
            push_int();
            emit_expr(*e.b);
            ins("movq %rax, %rcx");
            ins("popq %rax");
            ins("subq %rcx, %rax");
            uint64_t size = compute_layout(at->pointee).size;
            if (size > 1) {
                ins("movq $" + std::to_string(size) + ", %rcx");
                ins("cqto");
                ins("idivq %rcx");
            }
            return;
        }
        if ((e.bin_op == BinaryOp::Add || e.bin_op == BinaryOp::Sub) && (ap || bp)) {
            TypePtr ptr_t = ap ? at : bt;
            uint64_t size = compute_layout(ptr_t->pointee).size;
            emit_expr(*e.a);
            if (!ap) {
                convert(type_of(*e.a), make_scalar(TypeKind::Long));
                scale_rax(size);
            }
            push_int();
            emit_expr(*e.b);
            if (!bp) {
                convert(type_of(*e.b), make_scalar(TypeKind::Long));
                scale_rax(size);
            }
            ins("movq %rax, %rcx");
            ins("popq %rax");
            ins(e.bin_op == BinaryOp::Add ? "addq %rcx, %rax" : "subq %rcx, %rax");
            return;
        }
        if (is_compare(e.bin_op) && (ap || bp)) {
            TypePtr common = ap ? at : bt;
            emit_expr(*e.a);
            push_int();
            emit_expr(*e.b);
            binary_core(e.bin_op, common, make_scalar(TypeKind::Int));
            return;
        }

        TypePtr common;
        if (e.bin_op == BinaryOp::Shl || e.bin_op == BinaryOp::Shr)
            common = type_of(e);  // promoted left operand type
        else
            common = usual_arith_conversion(at, bt);

        emit_expr(*e.a);
        convert(at, common);
        if (is_float(common->kind))
            push_f();
        else
            push_int();
        emit_expr(*e.b);
        if (e.bin_op == BinaryOp::Shl || e.bin_op == BinaryOp::Shr)
            convert(bt, make_scalar(TypeKind::Int));
        else
            convert(bt, common);
        binary_core(e.bin_op, common, type_of(e));
    }

    void emit_call(const Expr& e) {
        const FunctionDef* callee = nullptr;
        if (module) callee = find_function(*module, e.name);
        if (!callee && e.name == fn.name) callee = &fn;
        if (!callee)
            fail(ErrorKind::Internal,
                 "call to '" + e.name + "' needs module context for its signature",
                 e.span);
        size_t n = e.args.size();
        std::vector<int> class_ix(n);
        std::vector<bool> sse(n);
        int ints = 0, sses = 0;
        for (size_t i = 0; i < n; ++i) {
            sse[i] = is_float(callee->params[i].type->kind);
            class_ix[i] = sse[i] ? sses++ : ints++;
        }
        for (size_t i = 0; i < n; ++i) {
            emit_expr(*e.args[i]);
            convert(type_of(*e.args[i]), callee->params[i].type);
            if (sse[i])
                push_f();
            else
                push_int();
        }
        for (size_t i = n; i-- > 0;) {
            if (sse[i]) {
                ins("movsd (%rsp), %xmm" + std::to_string(class_ix[i]));
                ins("addq $8, %rsp");
            } else {
                ins(std::string("popq ") + INT_ARG_REGS64[class_ix[i]]);
            }
        }
        ins("movq %rsp, %rbx");
        ins("andq $-16, %rsp");
        ins("call " + e.name);
        ins("movq %rbx, %rsp");
    }

    // ---- statements ----------------------------------------------------------

    void store_with_conversion(const std::string& mem, const TypePtr& lhs_t,
                               const Expr& rhs) {
        if (rhs.kind == ExprKind::IntLit && is_integer(lhs_t->kind)) {
            TypePtr rt = type_of(rhs);
            int64_t v = canonical_int(rt->kind, static_cast<int64_t>(rhs.int_value));
            unsigned w = scalar_bit_width(lhs_t->kind);
            if (w < 64) {
                int64_t lo = -(int64_t(1) << (w - 1));
                int64_t hi = (int64_t(1) << w) - 1;
                if (v < lo || v > hi) {
                    std::string shown = rhs.is_hex ? hex_u64(rhs.int_value)
                                                   : std::to_string(v);
                    fail(ErrorKind::ImmediateOverflow,
                         "immediate " + shown + " overflows " + std::to_string(w) +
                             "-bit destination",
                         rhs.span);
                }
            }
            switch (w) {
                case 8: ins("movb $" + std::to_string(v) + ", " + mem); return;
                case 16: ins("movw $" + std::to_string(v) + ", " + mem); return;
                case 32: ins("movl $" + std::to_string(v) + ", " + mem); return;
                default:
                    if (fits_imm32(v)) {
                        ins("movq $" + std::to_string(v) + ", " + mem);
                    } else {
                        ins("movabsq $" + std::to_string(v) + ", %rax");
                        ins("movq %rax, " + mem);
                    }
                    return;
            }
        }
        emit_expr(rhs);
        convert(type_of(rhs), lhs_t);
        store_to(mem, lhs_t);
    }

    static BinaryOp compound_op(AssignOp op) {
        switch (op) {
            case AssignOp::Add: return BinaryOp::Add;
            case AssignOp::Sub: return BinaryOp::Sub;
            case AssignOp::Mul: return BinaryOp::Mul;
            case AssignOp::Div: return BinaryOp::Div;
            case AssignOp::Mod: return BinaryOp::Mod;
            case AssignOp::Shl: return BinaryOp::Shl;
            case AssignOp::Shr: return BinaryOp::Shr;
            case AssignOp::And: return BinaryOp::BitAnd;
            case AssignOp::Xor: return BinaryOp::BitXor;
            case AssignOp::Or: return BinaryOp::BitOr;
            default: fail(ErrorKind::Internal, "not a compound assignment");
        }
    }

    void emit_assign(const Stmt& s) {
        TypePtr lhs_t = type_of(*s.lhs);
        auto mem = scalar_operand(*s.lhs);

        if (s.assign_op == AssignOp::Set) {
            if (mem) {
                store_with_conversion(*mem, lhs_t, *s.rhs);
                return;
            }
            emit_addr(*s.lhs);
            push_int();
            emit_expr(*s.rhs);
            convert(type_of(*s.rhs), lhs_t);
            pop_rcx();
            store_to("(%rcx)", lhs_t);
            return;
        }

        BinaryOp op = compound_op(s.assign_op);
        TypePtr rhs_t = decay(type_of(*s.rhs));

        if (lhs_t->kind == TypeKind::Pointer) {
            if (op != BinaryOp::Add && op != BinaryOp::Sub)
                fail(ErrorKind::UnsupportedFeature, "operator not defined for pointers",
                     s.span);
            uint64_t size = compute_layout(lhs_t->pointee).size;
            bool direct = mem.has_value();
            if (!direct) {
                emit_addr(*s.lhs);
                push_int();
            }
            std::string m = direct ? *mem : "(%rcx)";
            if (direct) {
                load_from(m, lhs_t);
                push_int();
            } else {
                ins("movq (%rsp), %rax");
                ins("movq (%rax), %rax");
                push_int();
            }
            emit_expr(*s.rhs);
            convert(type_of(*s.rhs), make_scalar(TypeKind::Long));
            scale_rax(size);
            ins("movq %rax, %rcx");
            ins("popq %rax");
            ins(op == BinaryOp::Add ? "addq %rcx, %rax" : "subq %rcx, %rax");
            if (direct) {
                store_to(m, lhs_t);
            } else {
                pop_rcx();
                store_to("(%rcx)", lhs_t);
            }
            return;
        }

        TypePtr common = (op == BinaryOp::Shl || op == BinaryOp::Shr)
                             ? integer_promote(lhs_t)
                             : usual_arith_conversion(lhs_t, rhs_t);
        bool fcommon = is_float(common->kind);

        if (mem) {
            load_from(*mem, lhs_t);
            convert(lhs_t, common);
            if (fcommon)
                push_f();
            else
                push_int();
            emit_expr(*s.rhs);
            if (op == BinaryOp::Shl || op == BinaryOp::Shr)
                convert(rhs_t, make_scalar(TypeKind::Int));
            else
                convert(rhs_t, common);
            binary_core(op, common, common);
            convert(common, lhs_t);
            store_to(*mem, lhs_t);
            return;
        }

        emit_addr(*s.lhs);
        push_int();
        load_from("(%rax)", lhs_t);
        convert(lhs_t, common);
        if (fcommon)
            push_f();
        else
            push_int();
        emit_expr(*s.rhs);
        if (op == BinaryOp::Shl || op == BinaryOp::Shr)
            convert(rhs_t, make_scalar(TypeKind::Int));
        else
            convert(rhs_t, common);
        binary_core(op, common, common);
        convert(common, lhs_t);
        pop_rcx();
        store_to("(%rcx)", lhs_t);
    }

    std::string user_label(const std::string& name) const {
        return ".L_" + fn.name + "__user_" + name;
    }

    void emit_stmts(const std::vector<const Stmt*>& stmts) {
        for (const Stmt* s : stmts) emit_stmt(*s);
    }

    void emit_block(const std::vector<StmtPtr>& stmts) {
        for (const auto& s : stmts) emit_stmt(*s);
    }

    void emit_stmt(const Stmt& s) {
        for (const auto& l : s.labels) put_label(user_label(l));
        switch (s.kind) {
            case StmtKind::Blank: return;
            case StmtKind::Decl: {
                if (!s.decl_init) return;
                const Slot* slot = table.find(s.decl_name);
                if (!slot) fail(ErrorKind::LayoutMissing, s.decl_name, s.span);
                store_with_conversion(std::to_string(slot->offset) + "(%rbp)",
                                      s.decl_type, *s.decl_init);
                return;
            }
            case StmtKind::Assign: emit_assign(s); return;
            case StmtKind::Expr: emit_expr(*s.expr); return;
            case StmtKind::Return:
                if (s.expr) {
                    emit_expr(*s.expr);
                    convert(type_of(*s.expr), fn.return_type);
                }
                ins("jmp " + epilogue_label(fn.name));
                return;
            case StmtKind::Block: emit_block(s.body); return;
            case StmtKind::Goto: ins("jmp " + user_label(s.goto_target)); return;
            case StmtKind::Break:
                if (break_labels.empty())
                    fail(ErrorKind::Internal, "break without an enclosing target", s.span);
                ins("jmp " + break_labels.back());
                return;
            case StmtKind::Continue:
                if (continue_labels.empty())
                    fail(ErrorKind::Internal, "continue without an enclosing target",
                         s.span);
                ins("jmp " + continue_labels.back());
                return;
            case StmtKind::If: {
                std::string els = fresh();
                branch_false(*s.expr, els);
                emit_stmt(*s.then_branch);
                if (s.else_branch) {
                    std::string end = fresh();
                    ins("jmp " + end);
                    put_label(els);
                    emit_stmt(*s.else_branch);
                    put_label(end);
                } else {
                    put_label(els);
                }
                return;
            }
            case StmtKind::While: {
                std::string head = fresh(), end = fresh();
                put_label(head);
                branch_false(*s.expr, end);
                break_labels.push_back(end);
                continue_labels.push_back(head);
                emit_stmt(*s.loop_body);
                break_labels.pop_back();
                continue_labels.pop_back();
                ins("jmp " + head);
                put_label(end);
                return;
            }
            case StmtKind::DoWhile: {
                std::string top = fresh(), cont = fresh(), end = fresh();
                put_label(top);
                break_labels.push_back(end);
                continue_labels.push_back(cont);
                emit_stmt(*s.loop_body);
                break_labels.pop_back();
                continue_labels.pop_back();
                put_label(cont);
                truth_value(*s.expr);
                ins("testq %rax, %rax");
                ins("jnz " + top);
                put_label(end);
                return;
            }
            case StmtKind::For: {
                if (s.for_init) emit_stmt(*s.for_init);
                std::string head = fresh(), cont = fresh(), end = fresh();
                put_label(head);
                if (s.expr) branch_false(*s.expr, end);
                break_labels.push_back(end);
                continue_labels.push_back(cont);
                emit_stmt(*s.loop_body);
                break_labels.pop_back();
                continue_labels.pop_back();
                put_label(cont);
                if (s.for_incr) emit_stmt(*s.for_incr);
                ins("jmp " + head);
                put_label(end);
                return;
            }
            case StmtKind::Switch: {
                TypePtr prom = integer_promote(type_of(*s.expr));
                emit_expr(*s.expr);
                convert(type_of(*s.expr), prom);
                std::string end = fresh();
                std::string default_l;
                std::vector<std::string> case_ls(s.cases.size());
                for (size_t i = 0; i < s.cases.size(); ++i) {
                    case_ls[i] = fresh();
                    if (!s.cases[i].value) default_l = case_ls[i];
                }
                for (size_t i = 0; i < s.cases.size(); ++i) {
                    if (!s.cases[i].value) continue;
                    int64_t v = canonical_int(prom->kind, *s.cases[i].value);
                    if (fits_imm32(v)) {
                        ins("cmpq $" + std::to_string(v) + ", %rax");
                    } else {
                        ins("movabsq $" + std::to_string(v) + ", %rcx");
                        ins("cmpq %rcx, %rax");
                    }
                    ins("je " + case_ls[i]);
                }
                ins("jmp " + (default_l.empty() ? end : default_l));
                break_labels.push_back(end);
                for (size_t i = 0; i < s.cases.size(); ++i) {
                    put_label(case_ls[i]);
                    emit_block(s.cases[i].body);
                }
                break_labels.pop_back();
                put_label(end);
                return;
            }
        }
        fail(ErrorKind::Internal, "unhandled statement kind", s.span);
    }
};

}  // namespace

AssemblyFragment structural_fragment(const ControlPart& part) {
    std::string text;
    switch (part.kind) {
        case PartKind::Label:
            text = part.payload + ":\n";
            break;
        case PartKind::UncondJump:
            text = "\tjmp " + part.payload + "\n";
            break;
        case PartKind::CondJump:
            if (part.case_value) {
                int64_t v = *part.case_value;
                if (part.cond && part.cond->type)
                    v = canonical_int(integer_promote(part.cond->type)->kind, v);
                if (fits_imm32(v)) {
                    text = "\tcmpq $" + std::to_string(v) + ", %rax\n";
                } else {
                    text = "\tmovabsq $" + std::to_string(v) + ", %rcx\n\tcmpq %rcx, %rax\n";
                }
                text += "\tje " + part.payload + "\n";
            } else {
                text = "\ttestq %rax, %rax\n";
                text += std::string(part.jump_if_true ? "\tjnz " : "\tjz ") + part.payload +
                        "\n";
            }
            break;
        case PartKind::SourceBlock:
            fail(ErrorKind::Internal, "source blocks need a translation backend");
    }
    return make_fragment(std::move(text));
}

AssemblyFragment ref_translate_part(const ControlPart& part, const FunctionDef& fn,
                                    const SymbolTable& table, const Ast* module) {
    if (part.kind != PartKind::SourceBlock) return structural_fragment(part);
    Codegen g(fn, table, module, "p" + std::to_string(part.id));
    g.break_labels = part.break_stack;
    g.continue_labels = part.continue_stack;
    if (part.role == "cmp") {
        if (!part.cond) fail(ErrorKind::Internal, "cmp part without a condition");
        g.truth_value(*part.cond);
    } else if (part.role == "expr") {
        if (!part.cond) fail(ErrorKind::Internal, "expr part without an expression");
        g.emit_expr(*part.cond);
        g.convert(g.type_of(*part.cond), integer_promote(g.type_of(*part.cond)));
    } else {
        g.emit_stmts(part.stmts);
    }
    return make_fragment(g.text());
}

AssemblyFragment ref_translate_function(const FunctionDef& fn, const SymbolTable& table,
                                        const Ast* module) {
    Codegen g(fn, table, module, "d");
    g.emit_block(fn.body->body);
    std::string text = prologue_text(table) + g.text() + epilogue_text(table);
    return make_fragment(std::move(text));
}

}  // namespace blockcc
