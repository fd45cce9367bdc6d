#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "blockcc/diag.hpp"

namespace blockcc {

// ---------------------------------------------------------------------------
// Types

enum class TypeKind {
    Void,
    Char,
    UChar,
    Short,
    UShort,
    Int,
    UInt,
    Long,
    ULong,
    Float,
    Double,
    Pointer,
    Array,
    Record,
};

struct Type;
using TypePtr = std::shared_ptr<const Type>;

struct RecordMember {
    std::string name;
    TypePtr type;
};

struct Type {
    TypeKind kind = TypeKind::Int;
    TypePtr pointee;                   // Pointer
    TypePtr element;                   // Array
    uint64_t array_len = 0;            // Array
    bool is_union = false;             // Record
    std::string tag;                   // Record
    std::vector<RecordMember> members; // Record
};

TypePtr make_scalar(TypeKind k);
TypePtr make_pointer(TypePtr pointee);
TypePtr make_array(TypePtr element, uint64_t len);
TypePtr make_record(bool is_union, std::string tag, std::vector<RecordMember> members);

bool type_equal(const TypePtr& a, const TypePtr& b);
bool is_integer(TypeKind k);
bool is_signed_integer(TypeKind k);
bool is_float(TypeKind k);
bool is_arith(TypeKind k);
bool is_scalar_kind(TypeKind k);
int integer_rank(TypeKind k);
unsigned scalar_bit_width(TypeKind k);

/// Truncate `raw` to the width of `k`, then sign- or zero-extend back to 64
/// bits according to the type's signedness.
int64_t canonical_int(TypeKind k, int64_t raw);
std::string type_to_string(const TypePtr& t);  // without declarator name

// ---------------------------------------------------------------------------
// Expressions

enum class ExprKind {
    IntLit,
    FloatLit,
    Ident,
    Unary,
    Binary,
    Cond,   // ?: ternary
    Call,
    Index,
    Member,
    Cast,
};

enum class UnaryOp {
    Neg,
    Not,     // !
    BitNot,  // ~
    Deref,
    Addr,
    PreInc,
    PreDec,
    PostInc,
    PostDec,
    Plus,    // unary +
};

enum class BinaryOp {
    Add, Sub, Mul, Div, Mod,
    Shl, Shr,
    Lt, Gt, Le, Ge, Eq, Ne,
    BitAnd, BitXor, BitOr,
    LogAnd, LogOr,
};

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

struct Expr {
    ExprKind kind = ExprKind::IntLit;
    SourceSpan span;

    // literals
    uint64_t int_value = 0;
    double float_value = 0.0;
    bool is_hex = false;
    bool lit_unsigned = false;
    bool lit_long = false;
    bool lit_float32 = false;

    std::string name;  // Ident, Call callee, Member field
    UnaryOp un_op = UnaryOp::Neg;
    BinaryOp bin_op = BinaryOp::Add;
    bool member_arrow = false;

    ExprPtr a;  // unary operand / binary lhs / cond / call unused / index base / member base / cast operand
    ExprPtr b;  // binary rhs / cond-then / index subscript
    ExprPtr c;  // cond-else
    std::vector<ExprPtr> args;  // Call
    TypePtr cast_type;          // Cast

    TypePtr type;  // filled by sema; null before
};

ExprPtr make_int_lit(uint64_t v);
ExprPtr clone_expr(const Expr& e);

// ---------------------------------------------------------------------------
// Statements

enum class StmtKind {
    Assign,
    Expr,
    Goto,
    Blank,
    Block,
    If,
    While,
    For,
    DoWhile,
    Switch,
    Break,
    Continue,
    Return,
    Decl,
};

// Basic statements per the composability definitions.
bool is_basic_statement(StmtKind k);

enum class AssignOp {
    Set, Add, Sub, Mul, Div, Mod, Shl, Shr, And, Xor, Or,
};

struct Stmt;
using StmtPtr = std::unique_ptr<Stmt>;

struct SwitchCase {
    std::optional<int64_t> value;  // nullopt = default
    std::vector<StmtPtr> body;
    SourceSpan span;
};

struct Stmt {
    StmtKind kind = StmtKind::Blank;
    SourceSpan span;
    std::vector<std::string> labels;  // statement labels (goto targets)

    // Assign
    ExprPtr lhs;
    AssignOp assign_op = AssignOp::Set;
    ExprPtr rhs;

    ExprPtr expr;  // Expr stmt / If-While-DoWhile-Switch cond / Return value / For cond

    std::string goto_target;

    std::vector<StmtPtr> body;  // Block

    StmtPtr then_branch;  // If (always Block)
    StmtPtr else_branch;  // If (Block or null)

    StmtPtr loop_body;  // While/For/DoWhile (always Block)
    StmtPtr for_init;   // For: Decl/Assign/Expr/Blank
    StmtPtr for_incr;   // For: Assign/Expr/Blank

    std::vector<SwitchCase> cases;  // Switch

    // Decl
    std::string decl_name;
    TypePtr decl_type;
    ExprPtr decl_init;  // may be null
};

StmtPtr clone_stmt(const Stmt& s);

// ---------------------------------------------------------------------------
// Module

struct Param {
    std::string name;
    TypePtr type;
};

struct FunctionDef {
    std::string name;
    TypePtr return_type;
    std::vector<Param> params;
    StmtPtr body;  // Block
    SourceSpan span;
};

struct GlobalDecl {
    std::string name;
    TypePtr type;
    ExprPtr init;  // may be null
    SourceSpan span;
};

struct RecordDef {
    TypePtr type;  // Record type carrying tag + members
    SourceSpan span;
};

struct Ast {
    std::vector<RecordDef> records;
    std::vector<GlobalDecl> globals;
    std::vector<FunctionDef> functions;
};

FunctionDef clone_function(const FunctionDef& fn);
Ast clone_ast(const Ast& ast);

const FunctionDef* find_function(const Ast& ast, const std::string& name);

const char* unary_op_spelling(UnaryOp op);
const char* binary_op_spelling(BinaryOp op);
const char* assign_op_spelling(AssignOp op);
const char* stmt_kind_name(StmtKind k);

}  // namespace blockcc
