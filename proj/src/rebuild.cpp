#include "blockcc/rebuild.hpp"

#include "blockcc/layout.hpp"

namespace blockcc {

namespace {

const char* INT_ARG_REGS[4][6] = {
    {"%rdi", "%rsi", "%rdx", "%rcx", "%r8", "%r9"},
    {"%edi", "%esi", "%edx", "%ecx", "%r8d", "%r9d"},
    {"%di", "%si", "%dx", "%cx", "%r8w", "%r9w"},
    {"%dil", "%sil", "%dl", "%cl", "%r8b", "%r9b"},
};

const char* MOV_BY_SIZE(uint64_t size) {
    switch (size) {
        case 8: return "movq";
        case 4: return "movl";
        case 2: return "movw";
        case 1: return "movb";
    }
    fail(ErrorKind::Internal, "no move of size " + std::to_string(size));
}

int width_row(uint64_t size) {
    switch (size) {
        case 8: return 0;
        case 4: return 1;
        case 2: return 2;
        case 1: return 3;
    }
    fail(ErrorKind::Internal, "no register of size " + std::to_string(size));
}

void check_labels(const std::string& text) {
    LabelScan scan = scan_labels(text);
    if (!scan.duplicates.empty())
        fail(ErrorKind::DuplicateLabel, *scan.duplicates.begin());
    for (const auto& l : scan.required)
        if (!scan.defined.count(l)) fail(ErrorKind::UndefinedLabel, l);
}

void append_fragment(std::string& out, const std::string& text) {
    out += text;
    if (!text.empty() && text.back() != '\n') out += '\n';
}

}  // namespace

std::string epilogue_label(const std::string& fn_name) {
    return ".L_" + fn_name + "__epilogue";
}

std::string prologue_text(const SymbolTable& table) {
    std::string s;
    s += "\tpushq %rbp\n";
    s += "\tmovq %rsp, %rbp\n";
    if (table.frame_size)
        s += "\tsubq $" + std::to_string(table.frame_size) + ", %rsp\n";
    if (table.scratch_save_slot)
        s += "\tmovq %rbx, " + std::to_string(table.scratch_save_slot) + "(%rbp)\n";
    for (const auto& p : table.params) {
        const Slot* slot = table.find(p.name);
        if (!slot) fail(ErrorKind::LayoutMissing, p.name);
        std::string mem = std::to_string(slot->offset) + "(%rbp)";
        if (p.is_sse) {
            s += std::string("\t") + (slot->layout.size == 4 ? "movss" : "movsd") +
                 " %xmm" + std::to_string(p.reg_index) + ", " + mem + "\n";
        } else {
            int row = width_row(slot->layout.size);
            s += std::string("\t") + MOV_BY_SIZE(slot->layout.size) + " " +
                 INT_ARG_REGS[row][p.reg_index] + ", " + mem + "\n";
        }
    }
    return s;
}

std::string epilogue_text(const SymbolTable& table) {
    std::string s = epilogue_label(table.fn_name) + ":\n";
    if (table.scratch_save_slot)
        s += "\tmovq " + std::to_string(table.scratch_save_slot) + "(%rbp), %rbx\n";
    s += "\tleave\n";
    s += "\tret\n";
    return s;
}

std::string rebuild_function(const std::vector<TranslatedPart>& parts,
                             const SymbolTable& table) {
    std::string out = prologue_text(table);
    for (const auto& tp : parts) {
        if (!tp.part) fail(ErrorKind::Internal, "translated part without its source part");
        const ControlPart& p = *tp.part;
        if (p.kind == PartKind::Label) {
            out += p.payload + ":\n";
            continue;
        }
        for (const auto& hl : p.head_labels) out += hl + ":\n";
        append_fragment(out, tp.fragment.text);
    }
    out += epilogue_text(table);
    check_labels(out);
    return out;
}

std::string rebuild_direct(const AssemblyFragment& fragment, const SymbolTable& table) {
    (void)table;
    std::string out;
    append_fragment(out, fragment.text);
    check_labels(out);
    return out;
}

std::string emit_module(const std::vector<FunctionAsm>& functions,
                        const std::vector<GlobalPlan>& globals) {
    std::string out;
    for (const char* section : {".data", ".bss", ".rodata"}) {
        bool opened = false;
        for (const auto& g : globals) {
            if (g.section != section) continue;
            if (!opened) {
                out += std::string("\t") + section + "\n";
                opened = true;
            }
            out += "\t.globl " + g.label + "\n";
            if (g.align > 1) out += "\t.align " + std::to_string(g.align) + "\n";
            out += g.label + ":\n";
            if (!g.init_directive.empty())
                out += "\t" + g.init_directive + "\n";
            else
                out += "\t.zero " + std::to_string(g.layout.size) + "\n";
        }
    }
    out += "\t.text\n";
    for (const auto& f : functions) {
        out += "\t.globl " + f.name + "\n";
        out += "\t.type " + f.name + ", @function\n";
        out += f.name + ":\n";
        append_fragment(out, f.text);
        out += "\t.size " + f.name + ", .-" + f.name + "\n";
    }
    return out;
}

}  // namespace blockcc
