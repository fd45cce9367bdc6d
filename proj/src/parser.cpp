#include "blockcc/parser.hpp"

#include <map>

#include "blockcc/lexer.hpp"
#include "blockcc/printer.hpp"

namespace blockcc {

namespace {

struct Parser {
    const std::string& text;
    std::vector<Token> toks;
    size_t pos = 0;
    std::map<std::string, TypePtr> records;

    explicit Parser(const std::string& src) : text(src), toks(lex(src)) {}

    const Token& peek(size_t ahead = 0) const {
        size_t i = pos + ahead;
        if (i >= toks.size()) i = toks.size() - 1;
        return toks[i];
    }
    const Token& cur() const { return peek(0); }
    Token take() {
        Token t = cur();
        if (pos + 1 < toks.size()) ++pos;
        return t;
    }

    bool at_punct(const char* p) const {
        return cur().kind == TokenKind::Punct && cur().text == p;
    }
    bool at_keyword(const char* k) const {
        return cur().kind == TokenKind::Keyword && cur().text == k;
    }
    bool eat_punct(const char* p) {
        if (!at_punct(p)) return false;
        ++pos;
        return true;
    }
    bool eat_keyword(const char* k) {
        if (!at_keyword(k)) return false;
        ++pos;
        return true;
    }
    void expect_punct(const char* p) {
        if (!eat_punct(p))
            fail(ErrorKind::Syntax,
                 std::string("expected '") + p + "', got '" + describe(cur()) + "'",
                 cur().span);
    }
    void expect_keyword(const char* k) {
        if (!eat_keyword(k))
            fail(ErrorKind::Syntax,
                 std::string("expected '") + k + "', got '" + describe(cur()) + "'",
                 cur().span);
    }
    static std::string describe(const Token& t) {
        switch (t.kind) {
            case TokenKind::End: return "<eof>";
            case TokenKind::IntLit: return "integer literal";
            case TokenKind::FloatLit: return "float literal";
            default: return t.text;
        }
    }
    [[noreturn]] void unsupported(const std::string& what) const {
        fail(ErrorKind::UnsupportedFeature, what, cur().span);
    }

    SourceSpan span_from(size_t begin_tok) const {
        SourceSpan s;
        s.begin = toks[begin_tok].span.begin;
        size_t last = pos == 0 ? 0 : pos - 1;
        s.end = toks[last].span.end;
        return s;
    }

    // ---- types ----------------------------------------------------------

    bool at_type_start() const {
        if (cur().kind != TokenKind::Keyword) return false;
        const std::string& k = cur().text;
        return k == "void" || k == "char" || k == "short" || k == "int" || k == "long" ||
               k == "float" || k == "double" || k == "signed" || k == "unsigned" ||
               k == "const" || k == "struct" || k == "union" ||
               (k.size() > 2 && (k.substr(0, 3) == "int" || k.substr(0, 4) == "uint") &&
                k.back() == 't') ||
               k == "size_t";
    }

    TypePtr parse_type_specifier() {
        while (eat_keyword("const")) {
        }
        for (const char* bad : {"static", "extern", "typedef", "enum", "volatile",
                                "register", "auto", "inline", "sizeof"}) {
            if (at_keyword(bad)) unsupported(std::string("'") + bad + "'");
        }
        if (at_keyword("struct") || at_keyword("union")) {
            bool is_union = cur().text == "union";
            ++pos;
            if (cur().kind != TokenKind::Ident)
                fail(ErrorKind::Syntax, "expected record tag", cur().span);
            std::string tag = take().text;
            auto it = records.find(tag);
            if (at_punct("{")) {
                // Inline definitions are only accepted at top level; callers
                // handle registration. Reject here to keep statements simple.
                fail(ErrorKind::UnsupportedFeature,
                     "record definition inside declaration", cur().span);
            }
            if (it == records.end())
                fail(ErrorKind::UnknownType, (is_union ? "union " : "struct ") + tag,
                     cur().span);
            if (it->second->is_union != is_union)
                fail(ErrorKind::UnknownType,
                     "tag '" + tag + "' names a " +
                         (it->second->is_union ? "union" : "struct"),
                     cur().span);
            TypePtr t = it->second;
            while (eat_keyword("const")) {
            }
            return t;
        }

        // typedef-style fixed-width names
        static const std::map<std::string, TypeKind> fixed = {
            {"int8_t", TypeKind::Char},    {"uint8_t", TypeKind::UChar},
            {"int16_t", TypeKind::Short},  {"uint16_t", TypeKind::UShort},
            {"int32_t", TypeKind::Int},    {"uint32_t", TypeKind::UInt},
            {"int64_t", TypeKind::Long},   {"uint64_t", TypeKind::ULong},
            {"size_t", TypeKind::ULong},
        };
        if (cur().kind == TokenKind::Keyword) {
            auto it = fixed.find(cur().text);
            if (it != fixed.end()) {
                ++pos;
                while (eat_keyword("const")) {
                }
                return make_scalar(it->second);
            }
        }

        bool saw_unsigned = false, saw_signed = false;
        bool saw_char = false, saw_short = false, saw_int = false, saw_long = false;
        bool saw_void = false, saw_float = false, saw_double = false;
        bool any = false;
        for (;;) {
            if (eat_keyword("unsigned")) { saw_unsigned = true; any = true; }
            else if (eat_keyword("signed")) { saw_signed = true; any = true; }
            else if (eat_keyword("char")) { saw_char = true; any = true; }
            else if (eat_keyword("short")) { saw_short = true; any = true; }
            else if (eat_keyword("int")) { saw_int = true; any = true; }
            else if (eat_keyword("long")) { saw_long = true; any = true; }
            else if (eat_keyword("void")) { saw_void = true; any = true; }
            else if (eat_keyword("float")) { saw_float = true; any = true; }
            else if (eat_keyword("double")) { saw_double = true; any = true; }
            else if (eat_keyword("const")) { any = true; }
            else break;
        }
        if (!any) fail(ErrorKind::Syntax, "expected type specifier", cur().span);
        if (saw_void) return make_scalar(TypeKind::Void);
        if (saw_float) return make_scalar(TypeKind::Float);
        if (saw_double) return make_scalar(TypeKind::Double);
        if (saw_char) return make_scalar(saw_unsigned ? TypeKind::UChar : TypeKind::Char);
        if (saw_short) return make_scalar(saw_unsigned ? TypeKind::UShort : TypeKind::Short);
        if (saw_long) return make_scalar(saw_unsigned ? TypeKind::ULong : TypeKind::Long);
        if (saw_int || saw_signed || saw_unsigned)
            return make_scalar(saw_unsigned ? TypeKind::UInt : TypeKind::Int);
        fail(ErrorKind::Syntax, "bad type specifier", cur().span);
    }

    // Declarator suffix: pointer stars before the name, array brackets after.
    struct Declarator {
        std::string name;
        TypePtr type;
    };

    Declarator parse_declarator(TypePtr base) {
        int stars = 0;
        while (eat_punct("*")) {
            ++stars;
            while (eat_keyword("const")) {
            }
        }
        if (at_punct("("))
            unsupported("parenthesized declarator");
        if (cur().kind != TokenKind::Ident)
            fail(ErrorKind::Syntax, "expected declarator name", cur().span);
        Declarator d;
        d.name = take().text;
        TypePtr t = base;
        for (int i = 0; i < stars; ++i) t = make_pointer(t);
        std::vector<uint64_t> dims;
        while (eat_punct("[")) {
            ExprPtr len = parse_expr();
            auto v = const_eval_int(*len);
            if (!v || *v <= 0)
                fail(ErrorKind::Syntax, "array length must be a positive constant",
                     len->span);
            dims.push_back(static_cast<uint64_t>(*v));
            expect_punct("]");
        }
        for (size_t i = dims.size(); i-- > 0;) t = make_array(t, dims[i]);
        d.type = t;
        return d;
    }

    // ---- expressions -----------------------------------------------------

    ExprPtr parse_expr() { return parse_conditional(); }

    ExprPtr parse_conditional() {
        size_t begin = pos;
        ExprPtr cond = parse_binary(0);
        if (!eat_punct("?")) return cond;
        auto e = std::make_unique<Expr>();
        e->kind = ExprKind::Cond;
        e->a = std::move(cond);
        e->b = parse_expr();
        expect_punct(":");
        e->c = parse_conditional();
        e->span = span_from(begin);
        return e;
    }

    static int punct_binary_prec(const std::string& p) {
        if (p == "*" || p == "/" || p == "%") return 13;
        if (p == "+" || p == "-") return 12;
        if (p == "<<" || p == ">>") return 11;
        if (p == "<" || p == ">" || p == "<=" || p == ">=") return 10;
        if (p == "==" || p == "!=") return 9;
        if (p == "&") return 8;
        if (p == "^") return 7;
        if (p == "|") return 6;
        if (p == "&&") return 5;
        if (p == "||") return 4;
        return -1;
    }

    static BinaryOp punct_binary_op(const std::string& p) {
        if (p == "*") return BinaryOp::Mul;
        if (p == "/") return BinaryOp::Div;
        if (p == "%") return BinaryOp::Mod;
        if (p == "+") return BinaryOp::Add;
        if (p == "-") return BinaryOp::Sub;
        if (p == "<<") return BinaryOp::Shl;
        if (p == ">>") return BinaryOp::Shr;
        if (p == "<") return BinaryOp::Lt;
        if (p == ">") return BinaryOp::Gt;
        if (p == "<=") return BinaryOp::Le;
        if (p == ">=") return BinaryOp::Ge;
        if (p == "==") return BinaryOp::Eq;
        if (p == "!=") return BinaryOp::Ne;
        if (p == "&") return BinaryOp::BitAnd;
        if (p == "^") return BinaryOp::BitXor;
        if (p == "|") return BinaryOp::BitOr;
        if (p == "&&") return BinaryOp::LogAnd;
        return BinaryOp::LogOr;
    }

    ExprPtr parse_binary(int min_prec) {
        size_t begin = pos;
        ExprPtr lhs = parse_unary();
        for (;;) {
            if (cur().kind != TokenKind::Punct) break;
            int prec = punct_binary_prec(cur().text);
            if (prec < 0 || prec < min_prec) break;
            BinaryOp op = punct_binary_op(take().text);
            ExprPtr rhs = parse_binary(prec + 1);
            auto e = std::make_unique<Expr>();
            e->kind = ExprKind::Binary;
            e->bin_op = op;
            e->a = std::move(lhs);
            e->b = std::move(rhs);
            e->span = span_from(begin);
            lhs = std::move(e);
        }
        return lhs;
    }

    ExprPtr parse_unary() {
        size_t begin = pos;
        auto mk = [&](UnaryOp op, ExprPtr operand) {
            auto e = std::make_unique<Expr>();
            e->kind = ExprKind::Unary;
            e->un_op = op;
            e->a = std::move(operand);
            e->span = span_from(begin);
            return e;
        };
        if (at_keyword("sizeof")) unsupported("'sizeof'");
        if (eat_punct("-")) return mk(UnaryOp::Neg, parse_unary());
        if (eat_punct("+")) return mk(UnaryOp::Plus, parse_unary());
        if (eat_punct("!")) return mk(UnaryOp::Not, parse_unary());
        if (eat_punct("~")) return mk(UnaryOp::BitNot, parse_unary());
        if (eat_punct("*")) return mk(UnaryOp::Deref, parse_unary());
        if (eat_punct("&")) return mk(UnaryOp::Addr, parse_unary());
        if (eat_punct("++")) return mk(UnaryOp::PreInc, parse_unary());
        if (eat_punct("--")) return mk(UnaryOp::PreDec, parse_unary());
        if (at_punct("(") && peek(1).kind == TokenKind::Keyword &&
            is_type_keyword(peek(1).text)) {
            expect_punct("(");
            TypePtr base = parse_type_specifier();
            int stars = 0;
            while (eat_punct("*")) ++stars;
            for (int i = 0; i < stars; ++i) base = make_pointer(base);
            expect_punct(")");
            auto e = std::make_unique<Expr>();
            e->kind = ExprKind::Cast;
            e->cast_type = base;
            e->a = parse_unary();
            e->span = span_from(begin);
            return e;
        }
        return parse_postfix();
    }

    static bool is_type_keyword(const std::string& k) {
        return k == "void" || k == "char" || k == "short" || k == "int" || k == "long" ||
               k == "float" || k == "double" || k == "signed" || k == "unsigned" ||
               k == "const" || k == "struct" || k == "union" || k == "size_t" ||
               k == "int8_t" || k == "int16_t" || k == "int32_t" || k == "int64_t" ||
               k == "uint8_t" || k == "uint16_t" || k == "uint32_t" || k == "uint64_t";
    }

    ExprPtr parse_postfix() {
        size_t begin = pos;
        ExprPtr e = parse_primary();
        for (;;) {
            if (eat_punct("[")) {
                auto idx = std::make_unique<Expr>();
                idx->kind = ExprKind::Index;
                idx->a = std::move(e);
                idx->b = parse_expr();
                expect_punct("]");
                idx->span = span_from(begin);
                e = std::move(idx);
            } else if (at_punct(".") || at_punct("->")) {
                bool arrow = take().text == "->";
                if (cur().kind != TokenKind::Ident)
                    fail(ErrorKind::Syntax, "expected member name", cur().span);
                auto m = std::make_unique<Expr>();
                m->kind = ExprKind::Member;
                m->member_arrow = arrow;
                m->a = std::move(e);
                m->name = take().text;
                m->span = span_from(begin);
                e = std::move(m);
            } else if (at_punct("++") || at_punct("--")) {
                bool inc = take().text == "++";
                auto u = std::make_unique<Expr>();
                u->kind = ExprKind::Unary;
                u->un_op = inc ? UnaryOp::PostInc : UnaryOp::PostDec;
                u->a = std::move(e);
                u->span = span_from(begin);
                e = std::move(u);
            } else {
                break;
            }
        }
        return e;
    }

    ExprPtr parse_primary() {
        size_t begin = pos;
        if (eat_punct("(")) {
            ExprPtr e = parse_expr();
            expect_punct(")");
            return e;
        }
        if (cur().kind == TokenKind::IntLit) {
            Token t = take();
            auto e = std::make_unique<Expr>();
            e->kind = ExprKind::IntLit;
            e->int_value = t.int_value;
            e->is_hex = t.is_hex;
            e->lit_unsigned = t.is_unsigned;
            e->lit_long = t.is_long;
            e->span = t.span;
            return e;
        }
        if (cur().kind == TokenKind::FloatLit) {
            Token t = take();
            auto e = std::make_unique<Expr>();
            e->kind = ExprKind::FloatLit;
            e->float_value = t.float_value;
            e->lit_float32 = t.is_float32;
            e->span = t.span;
            return e;
        }
        if (cur().kind == TokenKind::Ident) {
            std::string name = take().text;
            if (eat_punct("(")) {
                auto call = std::make_unique<Expr>();
                call->kind = ExprKind::Call;
                call->name = name;
                if (!at_punct(")")) {
                    do {
                        call->args.push_back(parse_expr());
                    } while (eat_punct(","));
                }
                expect_punct(")");
                call->span = span_from(begin);
                return call;
            }
            auto e = std::make_unique<Expr>();
            e->kind = ExprKind::Ident;
            e->name = name;
            e->span = toks[begin].span;
            return e;
        }
        fail(ErrorKind::Syntax,
             "expected expression, got '" + describe(cur()) + "'", cur().span);
    }

    // ---- statements ------------------------------------------------------

    static bool is_assign_punct(const std::string& p) {
        return p == "=" || p == "+=" || p == "-=" || p == "*=" || p == "/=" ||
               p == "%=" || p == "<<=" || p == ">>=" || p == "&=" || p == "^=" ||
               p == "|=";
    }

    static AssignOp assign_op_of(const std::string& p) {
        if (p == "=") return AssignOp::Set;
        if (p == "+=") return AssignOp::Add;
        if (p == "-=") return AssignOp::Sub;
        if (p == "*=") return AssignOp::Mul;
        if (p == "/=") return AssignOp::Div;
        if (p == "%=") return AssignOp::Mod;
        if (p == "<<=") return AssignOp::Shl;
        if (p == ">>=") return AssignOp::Shr;
        if (p == "&=") return AssignOp::And;
        if (p == "^=") return AssignOp::Xor;
        return AssignOp::Or;
    }

    static bool is_lvalue_expr(const Expr& e) {
        if (e.kind == ExprKind::Ident || e.kind == ExprKind::Index ||
            e.kind == ExprKind::Member)
            return true;
        return e.kind == ExprKind::Unary && e.un_op == UnaryOp::Deref;
    }

    StmtPtr parse_block() {
        size_t begin = pos;
        expect_punct("{");
        auto block = std::make_unique<Stmt>();
        block->kind = StmtKind::Block;
        while (!at_punct("}")) {
            if (cur().kind == TokenKind::End)
                fail(ErrorKind::Syntax, "unterminated block", cur().span);
            parse_block_item(block->body);
        }
        expect_punct("}");
        block->span = span_from(begin);
        return block;
    }

    void parse_block_item(std::vector<StmtPtr>& out) {
        if (at_type_start()) {
            parse_local_decl(out);
            return;
        }
        out.push_back(parse_statement());
    }

    void parse_local_decl(std::vector<StmtPtr>& out) {
        size_t begin = pos;
        TypePtr base = parse_type_specifier();
        if (base->kind == TypeKind::Void)
            fail(ErrorKind::Syntax, "void is not a valid object type", cur().span);
        bool first = true;
        do {
            size_t item_begin = first ? begin : pos;
            first = false;
            Declarator d = parse_declarator(base);
            auto st = std::make_unique<Stmt>();
            st->kind = StmtKind::Decl;
            st->decl_name = d.name;
            st->decl_type = d.type;
            if (eat_punct("=")) st->decl_init = parse_expr();
            st->span = span_from(item_begin);
            out.push_back(std::move(st));
        } while (eat_punct(","));
        expect_punct(";");
    }

    StmtPtr wrap_block(StmtPtr s) {
        if (s->kind == StmtKind::Block) return s;
        auto block = std::make_unique<Stmt>();
        block->kind = StmtKind::Block;
        block->span = s->span;
        block->body.push_back(std::move(s));
        return block;
    }

    // Body of if/while/for/do: single statement normalized to a Block.
    StmtPtr parse_controlled_body() {
        if (at_punct("{")) return parse_block();
        if (at_type_start())
            fail(ErrorKind::Syntax, "declaration requires a block", cur().span);
        return wrap_block(parse_statement());
    }

    StmtPtr parse_for_init() {
        auto st = std::make_unique<Stmt>();
        if (at_punct(";")) {
            st->kind = StmtKind::Blank;
            st->span = cur().span;
            ++pos;
            return st;
        }
        if (at_type_start()) {
            size_t begin = pos;
            TypePtr base = parse_type_specifier();
            Declarator d = parse_declarator(base);
            st->kind = StmtKind::Decl;
            st->decl_name = d.name;
            st->decl_type = d.type;
            if (eat_punct("=")) st->decl_init = parse_expr();
            if (at_punct(","))
                unsupported("multiple declarators in for-init");
            st->span = span_from(begin);
            expect_punct(";");
            return st;
        }
        StmtPtr s = parse_simple_stmt_no_semi();
        expect_punct(";");
        return s;
    }

    // Assignment or expression statement, semicolon not consumed.
    StmtPtr parse_simple_stmt_no_semi() {
        size_t begin = pos;
        ExprPtr e = parse_expr();
        if (cur().kind == TokenKind::Punct && is_assign_punct(cur().text)) {
            if (!is_lvalue_expr(*e))
                fail(ErrorKind::Syntax, "assignment target is not an lvalue", e->span);
            AssignOp op = assign_op_of(take().text);
            auto st = std::make_unique<Stmt>();
            st->kind = StmtKind::Assign;
            st->lhs = std::move(e);
            st->assign_op = op;
            st->rhs = parse_expr();
            if (cur().kind == TokenKind::Punct && is_assign_punct(cur().text))
                unsupported("chained assignment");
            st->span = span_from(begin);
            return st;
        }
        auto st = std::make_unique<Stmt>();
        st->kind = StmtKind::Expr;
        st->expr = std::move(e);
        st->span = span_from(begin);
        return st;
    }

    StmtPtr parse_statement() {
        size_t begin = pos;

        std::vector<std::string> labels;
        while (cur().kind == TokenKind::Ident && peek(1).kind == TokenKind::Punct &&
               peek(1).text == ":") {
            labels.push_back(take().text);
            expect_punct(":");
        }
        StmtPtr st = parse_unlabeled_statement();
        if (!labels.empty()) {
            st->labels = std::move(labels);
            st->span.begin = toks[begin].span.begin;
        }
        return st;
    }

    StmtPtr parse_unlabeled_statement() {
        size_t begin = pos;
        if (at_punct(";")) {
            auto st = std::make_unique<Stmt>();
            st->kind = StmtKind::Blank;
            st->span = cur().span;
            ++pos;
            return st;
        }
        if (at_punct("{")) return parse_block();

        if (eat_keyword("if")) {
            expect_punct("(");
            auto st = std::make_unique<Stmt>();
            st->kind = StmtKind::If;
            st->expr = parse_expr();
            expect_punct(")");
            st->then_branch = parse_controlled_body();
            if (eat_keyword("else")) st->else_branch = parse_controlled_body();
            st->span = span_from(begin);
            return st;
        }
        if (eat_keyword("while")) {
            expect_punct("(");
            auto st = std::make_unique<Stmt>();
            st->kind = StmtKind::While;
            st->expr = parse_expr();
            expect_punct(")");
            st->loop_body = parse_controlled_body();
            st->span = span_from(begin);
            return st;
        }
        if (eat_keyword("do")) {
            auto st = std::make_unique<Stmt>();
            st->kind = StmtKind::DoWhile;
            st->loop_body = parse_controlled_body();
            expect_keyword("while");
            expect_punct("(");
            st->expr = parse_expr();
            expect_punct(")");
            expect_punct(";");
            st->span = span_from(begin);
            return st;
        }
        if (eat_keyword("for")) {
            expect_punct("(");
            auto st = std::make_unique<Stmt>();
            st->kind = StmtKind::For;
            st->for_init = parse_for_init();
            if (at_punct(";")) {
                st->expr = make_int_lit(1);
                st->expr->span = cur().span;
            } else {
                st->expr = parse_expr();
            }
            expect_punct(";");
            if (at_punct(")")) {
                st->for_incr = std::make_unique<Stmt>();
                st->for_incr->kind = StmtKind::Blank;
                st->for_incr->span = cur().span;
            } else {
                st->for_incr = parse_simple_stmt_no_semi();
            }
            expect_punct(")");
            st->loop_body = parse_controlled_body();
            st->span = span_from(begin);
            return st;
        }
        if (eat_keyword("switch")) {
            expect_punct("(");
            auto st = std::make_unique<Stmt>();
            st->kind = StmtKind::Switch;
            st->expr = parse_expr();
            expect_punct(")");
            expect_punct("{");
            bool seen_default = false;
            while (!at_punct("}")) {
                size_t case_begin = pos;
                SwitchCase cs;
                if (eat_keyword("case")) {
                    ExprPtr v = parse_expr();
                    auto cv = const_eval_int(*v);
                    if (!cv)
                        fail(ErrorKind::Syntax, "case label must be an integer constant",
                             v->span);
                    cs.value = *cv;
                } else if (eat_keyword("default")) {
                    if (seen_default)
                        fail(ErrorKind::Syntax, "duplicate default label", cur().span);
                    seen_default = true;
                    cs.value = std::nullopt;
                } else {
                    fail(ErrorKind::Syntax, "expected 'case' or 'default' in switch body",
                         cur().span);
                }
                expect_punct(":");
                while (!at_punct("}") && !at_keyword("case") && !at_keyword("default")) {
                    if (cur().kind == TokenKind::End)
                        fail(ErrorKind::Syntax, "unterminated switch", cur().span);
                    parse_block_item(cs.body);
                }
                cs.span = span_from(case_begin);
                st->cases.push_back(std::move(cs));
            }
            expect_punct("}");
            for (size_t i = 0; i < st->cases.size(); ++i)
                for (size_t j = i + 1; j < st->cases.size(); ++j)
                    if (st->cases[i].value && st->cases[j].value &&
                        *st->cases[i].value == *st->cases[j].value)
                        fail(ErrorKind::Syntax,
                             "duplicate case value " + std::to_string(*st->cases[i].value),
                             st->cases[j].span);
            st->span = span_from(begin);
            return st;
        }
        if (eat_keyword("break")) {
            expect_punct(";");
            auto st = std::make_unique<Stmt>();
            st->kind = StmtKind::Break;
            st->span = span_from(begin);
            return st;
        }
        if (eat_keyword("continue")) {
            expect_punct(";");
            auto st = std::make_unique<Stmt>();
            st->kind = StmtKind::Continue;
            st->span = span_from(begin);
            return st;
        }
        if (eat_keyword("return")) {
            auto st = std::make_unique<Stmt>();
            st->kind = StmtKind::Return;
            if (!at_punct(";")) st->expr = parse_expr();
            expect_punct(";");
            st->span = span_from(begin);
            return st;
        }
        if (eat_keyword("goto")) {
            if (cur().kind != TokenKind::Ident)
                fail(ErrorKind::Syntax, "expected label after goto", cur().span);
            auto st = std::make_unique<Stmt>();
            st->kind = StmtKind::Goto;
            st->goto_target = take().text;
            expect_punct(";");
            st->span = span_from(begin);
            return st;
        }
        if (cur().kind == TokenKind::Keyword &&
            (cur().text == "case" || cur().text == "default"))
            fail(ErrorKind::Syntax, "'case' label outside switch", cur().span);

        StmtPtr st = parse_simple_stmt_no_semi();
        expect_punct(";");
        st->span = span_from(begin);
        return st;
    }

    // ---- top level -------------------------------------------------------

    void parse_record_def(Ast& ast) {
        size_t begin = pos;
        bool is_union = take().text == "union";
        if (cur().kind != TokenKind::Ident)
            fail(ErrorKind::Syntax, "expected record tag", cur().span);
        std::string tag = take().text;
        if (records.count(tag))
            fail(ErrorKind::Syntax, "redefinition of tag '" + tag + "'", span_from(begin));
        // Register the incomplete type first so members may point at it.
        auto rec = std::make_shared<Type>();
        rec->kind = TypeKind::Record;
        rec->is_union = is_union;
        rec->tag = tag;
        records[tag] = rec;
        expect_punct("{");
        std::vector<RecordMember> members;
        while (!at_punct("}")) {
            TypePtr base = parse_type_specifier();
            do {
                Declarator d = parse_declarator(base);
                for (const auto& m : members)
                    if (m.name == d.name)
                        fail(ErrorKind::Syntax, "duplicate member '" + d.name + "'",
                             cur().span);
                members.push_back({d.name, d.type});
            } while (eat_punct(","));
            expect_punct(";");
        }
        expect_punct("}");
        expect_punct(";");
        if (members.empty())
            fail(ErrorKind::Syntax, "empty record", span_from(begin));
        rec->members = std::move(members);
        RecordDef def;
        def.type = rec;
        def.span = span_from(begin);
        ast.records.push_back(std::move(def));
    }

    Ast parse_unit() {
        Ast ast;
        while (cur().kind != TokenKind::End) {
            if ((at_keyword("struct") || at_keyword("union")) &&
                peek(1).kind == TokenKind::Ident && peek(2).kind == TokenKind::Punct &&
                peek(2).text == "{") {
                parse_record_def(ast);
                continue;
            }
            size_t begin = pos;
            TypePtr base = parse_type_specifier();
            Declarator d = parse_declarator(base);
            if (at_punct("(")) {
                parse_function(ast, d, begin);
                continue;
            }
            // global declaration, possibly multiple declarators
            for (;;) {
                if (d.type->kind == TypeKind::Void)
                    fail(ErrorKind::Syntax, "void is not a valid object type",
                         span_from(begin));
                GlobalDecl g;
                g.name = d.name;
                g.type = d.type;
                if (eat_punct("=")) g.init = parse_expr();
                g.span = span_from(begin);
                ast.globals.push_back(std::move(g));
                if (eat_punct(",")) {
                    d = parse_declarator(base);
                    continue;
                }
                break;
            }
            expect_punct(";");
        }
        return ast;
    }

    void parse_function(Ast& ast, const Declarator& d, size_t begin) {
        if (d.type->kind == TypeKind::Array)
            fail(ErrorKind::Syntax, "function cannot return an array", span_from(begin));
        FunctionDef fn;
        fn.name = d.name;
        fn.return_type = d.type;
        expect_punct("(");
        if (!at_punct(")")) {
            if (at_keyword("void") && peek(1).kind == TokenKind::Punct &&
                peek(1).text == ")") {
                ++pos;
            } else {
                do {
                    if (at_punct("...")) unsupported("variadic parameters");
                    TypePtr base = parse_type_specifier();
                    Declarator p = parse_declarator(base);
                    if (p.type->kind == TypeKind::Array)
                        p.type = make_pointer(p.type->element);  // parameter decay
                    if (p.type->kind == TypeKind::Void)
                        fail(ErrorKind::Syntax, "void parameter", span_from(begin));
                    for (const auto& prev : fn.params)
                        if (prev.name == p.name)
                            fail(ErrorKind::Syntax,
                                 "duplicate parameter '" + p.name + "'", cur().span);
                    fn.params.push_back({p.name, p.type});
                } while (eat_punct(","));
            }
        }
        expect_punct(")");
        if (at_punct(";"))
            unsupported("function declaration without body");
        fn.body = parse_block();
        fn.span = span_from(begin);
        for (const auto& other : ast.functions)
            if (other.name == fn.name)
                fail(ErrorKind::Syntax, "redefinition of function '" + fn.name + "'",
                     fn.span);
        ast.functions.push_back(std::move(fn));
    }
};

}  // namespace

Ast parse_source(const std::string& text) {
    Parser p(text);
    return p.parse_unit();
}

Ast canonicalize(const Ast& ast) { return parse_source(print_module(ast)); }

std::optional<int64_t> const_eval_int(const Expr& e) {
    switch (e.kind) {
        case ExprKind::IntLit:
            return static_cast<int64_t>(e.int_value);
        case ExprKind::Unary: {
            auto v = const_eval_int(*e.a);
            if (!v) return std::nullopt;
            switch (e.un_op) {
                case UnaryOp::Neg:
                    return static_cast<int64_t>(0 - static_cast<uint64_t>(*v));
                case UnaryOp::Plus: return *v;
                case UnaryOp::Not: return *v == 0 ? 1 : 0;
                case UnaryOp::BitNot: return ~*v;
                default: return std::nullopt;
            }
        }
        case ExprKind::Binary: {
            auto a = const_eval_int(*e.a);
            auto b = const_eval_int(*e.b);
            if (!a || !b) return std::nullopt;
            uint64_t ua = static_cast<uint64_t>(*a), ub = static_cast<uint64_t>(*b);
            switch (e.bin_op) {
                case BinaryOp::Add: return static_cast<int64_t>(ua + ub);
                case BinaryOp::Sub: return static_cast<int64_t>(ua - ub);
                case BinaryOp::Mul: return static_cast<int64_t>(ua * ub);
                case BinaryOp::Div:
                    if (*b == 0 || (*a == INT64_MIN && *b == -1)) return std::nullopt;
                    return *a / *b;
                case BinaryOp::Mod:
                    if (*b == 0 || (*a == INT64_MIN && *b == -1)) return std::nullopt;
                    return *a % *b;
                case BinaryOp::Shl:
                    if (*b < 0 || *b > 63) return std::nullopt;
                    return static_cast<int64_t>(ua << ub);
                case BinaryOp::Shr:
                    if (*b < 0 || *b > 63) return std::nullopt;
                    return *a >> *b;
                case BinaryOp::Lt: return *a < *b;
                case BinaryOp::Gt: return *a > *b;
                case BinaryOp::Le: return *a <= *b;
                case BinaryOp::Ge: return *a >= *b;
                case BinaryOp::Eq: return *a == *b;
                case BinaryOp::Ne: return *a != *b;
                case BinaryOp::BitAnd: return *a & *b;
                case BinaryOp::BitXor: return *a ^ *b;
                case BinaryOp::BitOr: return *a | *b;
                case BinaryOp::LogAnd: return (*a != 0 && *b != 0) ? 1 : 0;
                case BinaryOp::LogOr: return (*a != 0 || *b != 0) ? 1 : 0;
            }
            return std::nullopt;
        }
        case ExprKind::Cond: {
            auto c = const_eval_int(*e.a);
            if (!c) return std::nullopt;
            return const_eval_int(*c != 0 ? *e.b : *e.c);
        }
        case ExprKind::Cast: {
            if (!e.cast_type || !is_integer(e.cast_type->kind)) return std::nullopt;
            auto v = const_eval_int(*e.a);
            if (!v) return std::nullopt;
            unsigned w = scalar_bit_width(e.cast_type->kind);
            uint64_t uv = static_cast<uint64_t>(*v);
            if (w < 64) uv &= (uint64_t(1) << w) - 1;
            if (is_signed_integer(e.cast_type->kind) && w < 64 &&
                (uv & (uint64_t(1) << (w - 1))))
                uv |= ~((uint64_t(1) << w) - 1);
            return static_cast<int64_t>(uv);
        }
        default:
            return std::nullopt;
    }
}

std::optional<double> const_eval_float(const Expr& e) {
    switch (e.kind) {
        case ExprKind::FloatLit:
            return e.lit_float32 ? static_cast<double>(static_cast<float>(e.float_value))
                                 : e.float_value;
        case ExprKind::IntLit: {
            auto v = const_eval_int(e);
            return v ? std::optional<double>(static_cast<double>(*v)) : std::nullopt;
        }
        case ExprKind::Unary: {
            auto v = const_eval_float(*e.a);
            if (!v) return std::nullopt;
            if (e.un_op == UnaryOp::Neg) return -*v;
            if (e.un_op == UnaryOp::Plus) return *v;
            return std::nullopt;
        }
        case ExprKind::Binary: {
            auto a = const_eval_float(*e.a);
            auto b = const_eval_float(*e.b);
            if (!a || !b) return std::nullopt;
            switch (e.bin_op) {
                case BinaryOp::Add: return *a + *b;
                case BinaryOp::Sub: return *a - *b;
                case BinaryOp::Mul: return *a * *b;
                case BinaryOp::Div:
                    if (*b == 0.0) return std::nullopt;
                    return *a / *b;
                default: return std::nullopt;
            }
        }
        case ExprKind::Cast:
            if (e.cast_type && is_float(e.cast_type->kind)) {
                auto v = const_eval_float(*e.a);
                if (!v) return std::nullopt;
                if (e.cast_type->kind == TypeKind::Float)
                    return static_cast<double>(static_cast<float>(*v));
                return *v;
            }
            return std::nullopt;
        default:
            return std::nullopt;
    }
}

}  // namespace blockcc
