#pragma once

#include <map>
#include <string>
#include <vector>

#include "blockcc/ast.hpp"
#include "blockcc/layout.hpp"

namespace blockcc {

struct Slot {
    std::string name;
    int64_t offset = 0;  // negative, relative to the frame base register
    TypeLayout layout;
};

struct GlobalPlan {
    std::string name;
    std::string label;
    TypeLayout layout;
    std::string section;  // ".data" or ".bss"
    uint64_t align = 1;
    std::string init_directive;  // e.g. ".long 7"; empty in .bss
};

struct ParamSpill {
    std::string name;
    int reg_index = 0;  // index into the integer or sse argument register sequence
    bool is_sse = false;
};

struct SymbolTable {
    std::string fn_name;
    std::vector<GlobalPlan> globals;
    std::vector<Slot> locals;  // parameters first, then declarations in preorder
    uint64_t frame_size = 0;
    std::vector<std::string> saved_regs_note;
    std::vector<ParamSpill> params;
    int64_t scratch_save_slot = 0;  // offset for saving rbx; 0 when unused

    const Slot* find(const std::string& name) const;
    const GlobalPlan* find_global(const std::string& name) const;
    std::string serialize() const;
};

using LayoutMap = std::map<std::string, TypeLayout>;

// Layouts for every parameter and local declaration, keyed by name.
// Names must be unique (run after renaming).
LayoutMap collect_local_layouts(const FunctionDef& fn);

// Deterministic slot assignment in declaration order; 16-byte frame.
// Throws LayoutMissing / UnsupportedFeature (>6 int or >8 sse parameters).
SymbolTable allocate_frame(const FunctionDef& fn, const LayoutMap& layouts);

std::vector<GlobalPlan> map_globals(const std::vector<GlobalDecl>& globals);

struct Violation {
    enum class Kind { Overlap, Misaligned, OutOfBounds };
    Kind kind;
    std::string slot_a;
    std::string slot_b;  // Overlap only
    std::string detail;
};

std::vector<Violation> check_no_overlap(const SymbolTable& table);

}  // namespace blockcc
