#pragma once

#include <string>
#include <vector>

#include "blockcc/splitter.hpp"
#include "blockcc/symtab.hpp"
#include "blockcc/translation.hpp"

namespace blockcc {

/// Classic rbp frame: push the frame base, reserve the (16-byte aligned)
/// frame, save %rbx when the frame plan reserved a slot for it, spill
/// parameters to their slots.
std::string prologue_text(const SymbolTable& table);

/// `.L_<fn>__epilogue:` followed by %rbx restore, leave, ret.
std::string epilogue_text(const SymbolTable& table);

std::string epilogue_label(const std::string& fn_name);

struct TranslatedPart {
    const ControlPart* part = nullptr;
    AssemblyFragment fragment;
};

/// prologue ++ fragments in part order (Label parts emitted as `name:`,
/// head_labels prepended to their source blocks) ++ epilogue. Verifies that
/// every jump target is defined exactly once in the final text; throws
/// UndefinedLabel / DuplicateLabel.
std::string rebuild_function(const std::vector<TranslatedPart>& parts,
                             const SymbolTable& table);

/// Direct/workflow mode: the fragment already carries prologue and epilogue;
/// only the label sanity checks run.
std::string rebuild_direct(const AssemblyFragment& fragment, const SymbolTable& table);

struct FunctionAsm {
    std::string name;
    std::string text;
};

/// One GNU-as module: .data/.bss/.rodata entries from the plans, then .text
/// with .globl/.type per function, functions in input order.
std::string emit_module(const std::vector<FunctionAsm>& functions,
                        const std::vector<GlobalPlan>& globals);

}  // namespace blockcc
