#include "blockcc/symtab.hpp"

#include <cstdio>
#include <cstring>
#include <set>
#include <sstream>

#include "blockcc/parser.hpp"

namespace blockcc {

namespace {

int64_t align_down(int64_t v, int64_t a) {
    int64_t r = v % a;
    if (r == 0) return v;
    return r > 0 ? v - r : v - (a + r);
}

bool fn_contains_call(const Stmt& s);

bool expr_contains_call(const Expr& e) {
    if (e.kind == ExprKind::Call) return true;
    if (e.a && expr_contains_call(*e.a)) return true;
    if (e.b && expr_contains_call(*e.b)) return true;
    if (e.c && expr_contains_call(*e.c)) return true;
    for (const auto& arg : e.args)
        if (expr_contains_call(*arg)) return true;
    return false;
}

bool fn_contains_call(const Stmt& s) {
    if (s.lhs && expr_contains_call(*s.lhs)) return true;
    if (s.rhs && expr_contains_call(*s.rhs)) return true;
    if (s.expr && expr_contains_call(*s.expr)) return true;
    if (s.decl_init && expr_contains_call(*s.decl_init)) return true;
    for (const auto& st : s.body)
        if (fn_contains_call(*st)) return true;
    if (s.then_branch && fn_contains_call(*s.then_branch)) return true;
    if (s.else_branch && fn_contains_call(*s.else_branch)) return true;
    if (s.loop_body && fn_contains_call(*s.loop_body)) return true;
    if (s.for_init && fn_contains_call(*s.for_init)) return true;
    if (s.for_incr && fn_contains_call(*s.for_incr)) return true;
    for (const auto& cs : s.cases)
        for (const auto& st : cs.body)
            if (fn_contains_call(*st)) return true;
    return false;
}

void collect_decls(const Stmt& s, std::vector<std::pair<std::string, TypePtr>>& out) {
    if (s.kind == StmtKind::Decl) out.emplace_back(s.decl_name, s.decl_type);
    if (s.for_init) collect_decls(*s.for_init, out);
    for (const auto& st : s.body) collect_decls(*st, out);
    if (s.then_branch) collect_decls(*s.then_branch, out);
    if (s.else_branch) collect_decls(*s.else_branch, out);
    if (s.loop_body) collect_decls(*s.loop_body, out);
    if (s.for_incr) collect_decls(*s.for_incr, out);
    for (const auto& cs : s.cases)
        for (const auto& st : cs.body) collect_decls(*st, out);
}

std::string scalar_init_directive(const TypePtr& t, const Expr& init) {
    char buf[64];
    if (is_float(t->kind)) {
        auto v = const_eval_float(init);
        if (!v) {
            auto iv = const_eval_int(init);
            if (!iv) fail(ErrorKind::Internal, "non-constant global initializer");
            v = static_cast<double>(*iv);
        }
        if (t->kind == TypeKind::Float) {
            float f = static_cast<float>(*v);
            uint32_t bits;
            std::memcpy(&bits, &f, sizeof bits);
            std::snprintf(buf, sizeof buf, ".long 0x%08x", bits);
        } else {
            double d = *v;
            uint64_t bits;
            std::memcpy(&bits, &d, sizeof bits);
            std::snprintf(buf, sizeof buf, ".quad 0x%016llx",
                          static_cast<unsigned long long>(bits));
        }
        return buf;
    }
    auto v = const_eval_int(init);
    if (!v) fail(ErrorKind::Internal, "non-constant global initializer");
    uint64_t uv = static_cast<uint64_t>(*v);
    switch (scalar_bit_width(t->kind)) {
        case 8:
            std::snprintf(buf, sizeof buf, ".byte %u",
                          static_cast<unsigned>(uv & 0xFF));
            return buf;
        case 16:
            std::snprintf(buf, sizeof buf, ".word %u",
                          static_cast<unsigned>(uv & 0xFFFF));
            return buf;
        case 32:
            std::snprintf(buf, sizeof buf, ".long %u",
                          static_cast<unsigned>(uv & 0xFFFFFFFF));
            return buf;
        default:
            std::snprintf(buf, sizeof buf, ".quad %llu",
                          static_cast<unsigned long long>(uv));
            return buf;
    }
}

}  // namespace

const Slot* SymbolTable::find(const std::string& name) const {
    for (const auto& s : locals)
        if (s.name == name) return &s;
    return nullptr;
}

const GlobalPlan* SymbolTable::find_global(const std::string& name) const {
    for (const auto& g : globals)
        if (g.name == name) return &g;
    return nullptr;
}

std::string SymbolTable::serialize() const {
    std::ostringstream out;
    out << "function " << fn_name << " frame " << frame_size << "\n";
    for (const auto& s : locals)
        out << s.name << " " << s.offset << " " << s.layout.size << " "
            << s.layout.align << "\n";
    for (const auto& g : globals)
        out << "global " << g.name << " " << g.label << " " << g.layout.size << " "
            << g.align << " " << g.section << "\n";
    if (!saved_regs_note.empty()) {
        out << "saved";
        for (const auto& r : saved_regs_note) out << " " << r;
        out << "\n";
    }
    return out.str();
}

LayoutMap collect_local_layouts(const FunctionDef& fn) {
    LayoutMap out;
    for (const auto& p : fn.params) out[p.name] = compute_layout(p.type);
    std::vector<std::pair<std::string, TypePtr>> decls;
    collect_decls(*fn.body, decls);
    for (const auto& [name, type] : decls) out[name] = compute_layout(type);
    return out;
}

SymbolTable allocate_frame(const FunctionDef& fn, const LayoutMap& layouts) {
    SymbolTable table;
    table.fn_name = fn.name;

    int int_regs = 0, sse_regs = 0;
    for (const auto& p : fn.params) {
        ParamSpill spill;
        spill.name = p.name;
        if (is_float(p.type->kind)) {
            if (sse_regs >= 8)
                fail(ErrorKind::UnsupportedFeature,
                     "more than 8 floating-point parameters", fn.span);
            spill.is_sse = true;
            spill.reg_index = sse_regs++;
        } else {
            if (int_regs >= 6)
                fail(ErrorKind::UnsupportedFeature, "more than 6 integer parameters",
                     fn.span);
            spill.is_sse = false;
            spill.reg_index = int_regs++;
        }
        table.params.push_back(spill);
    }

    std::vector<std::pair<std::string, TypePtr>> decls;
    for (const auto& p : fn.params) decls.emplace_back(p.name, p.type);
    collect_decls(*fn.body, decls);

    int64_t cursor = 0;
    std::set<std::string> seen;
    for (const auto& [name, type] : decls) {
        (void)type;
        if (!seen.insert(name).second)
            fail(ErrorKind::Internal, "duplicate local '" + name + "' (run rename first)");
        auto it = layouts.find(name);
        if (it == layouts.end()) fail(ErrorKind::LayoutMissing, name);
        const TypeLayout& layout = it->second;
        cursor -= static_cast<int64_t>(layout.size);
        cursor = align_down(cursor, static_cast<int64_t>(layout.align));
        Slot slot;
        slot.name = name;
        slot.offset = cursor;
        slot.layout = layout;
        table.locals.push_back(std::move(slot));
    }

    if (fn_contains_call(*fn.body)) {
        cursor -= 8;
        cursor = align_down(cursor, 8);
        table.scratch_save_slot = cursor;
        table.saved_regs_note.push_back("rbx");
    }

    table.frame_size = static_cast<uint64_t>((-cursor + 15) / 16 * 16);
    return table;
}

std::vector<GlobalPlan> map_globals(const std::vector<GlobalDecl>& globals) {
    std::vector<GlobalPlan> out;
    std::set<std::string> seen;
    for (const auto& g : globals) {
        if (!seen.insert(g.name).second)
            fail(ErrorKind::DuplicateGlobal, g.name, g.span);
        GlobalPlan plan;
        plan.name = g.name;
        plan.label = g.name;
        plan.layout = compute_layout(g.type);
        plan.align = plan.layout.align;
        if (g.init) {
            plan.section = ".data";
            plan.init_directive = scalar_init_directive(g.type, *g.init);
        } else {
            plan.section = ".bss";
        }
        out.push_back(std::move(plan));
    }
    return out;
}

std::vector<Violation> check_no_overlap(const SymbolTable& table) {
    std::vector<Violation> out;
    for (const auto& s : table.locals) {
        if (s.layout.align != 0 && (s.offset % static_cast<int64_t>(s.layout.align)) != 0)
            out.push_back({Violation::Kind::Misaligned, s.name, "",
                           "offset " + std::to_string(s.offset) + " vs align " +
                               std::to_string(s.layout.align)});
        int64_t lo = s.offset;
        int64_t hi = s.offset + static_cast<int64_t>(s.layout.size);
        if (lo < -static_cast<int64_t>(table.frame_size) || hi > 0)
            out.push_back({Violation::Kind::OutOfBounds, s.name, "",
                           "[" + std::to_string(lo) + ", " + std::to_string(hi) +
                               ") outside [-" + std::to_string(table.frame_size) + ", 0)"});
    }
    for (size_t i = 0; i < table.locals.size(); ++i) {
        for (size_t j = i + 1; j < table.locals.size(); ++j) {
            const Slot& a = table.locals[i];
            const Slot& b = table.locals[j];
            int64_t a_lo = a.offset, a_hi = a.offset + static_cast<int64_t>(a.layout.size);
            int64_t b_lo = b.offset, b_hi = b.offset + static_cast<int64_t>(b.layout.size);
            if (a_lo < b_hi && b_lo < a_hi)
                out.push_back({Violation::Kind::Overlap, a.name, b.name,
                               "[" + std::to_string(a_lo) + "," + std::to_string(a_hi) +
                                   ") overlaps [" + std::to_string(b_lo) + "," +
                                   std::to_string(b_hi) + ")"});
        }
    }
    return out;
}

}  // namespace blockcc
