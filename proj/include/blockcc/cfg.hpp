#pragma once

#include <string>
#include <vector>

#include "blockcc/ast.hpp"

namespace blockcc {

enum class EdgeKind {
    Fallthrough,
    BranchTrue,
    BranchFalse,
    SwitchCase,
    Back,
};

const char* edge_kind_name(EdgeKind kind);

/// Basic block: ordered statements plus an optional controlling expression
/// (loop/if condition or switch discriminant) evaluated at the tail.
/// `stmts` and `term` point into the FunctionDef the graph was built from.
struct CfgNode {
    int id = 0;
    std::vector<const Stmt*> stmts;
    const Expr* term = nullptr;
    std::string note;
    bool dead = false;
};

struct CfgEdge {
    int src = 0;
    int dst = 0;
    EdgeKind kind = EdgeKind::Fallthrough;
};

struct Cfg {
    std::vector<CfgNode> nodes;
    std::vector<CfgEdge> edges;
    int entry = 0;
    int exit = -1;  // -1 until a return materializes it

    std::vector<const CfgEdge*> out_edges(int id) const;
    std::vector<const CfgEdge*> in_edges(int id) const;
};

/// Statement-level CFG construction. Blocks break at jump targets and
/// branch points only; loops contribute exactly one back edge each.
/// Shapes, with `after` being where control resumes:
///   if/else   cond -BT-> then, cond -BF-> else (or join), branches -F-> join
///   while     head -BT-> body, head -BF-> after, body tail -Back-> head
///   for       init stays in the preceding block; head/body/incr/after
///             nodes with incr -Back-> head (continue targets incr)
///   do-while  body head, separate cond node, cond -Back-> body, -BF-> after
///   switch    the current block becomes the dispatch node: one SwitchCase
///             edge per case label, Fallthrough to the default body (or to
///             after when no default); consecutive case bodies fall through
/// Returns edge to a lazily created exit node. Code after an unconditional
/// transfer starts a new node that ends up flagged dead unless labeled.
/// Throws UnresolvedLabel for a goto with no matching label.
Cfg build_cfg(const FunctionDef& fn);

/// Merge chains A -Fallthrough-> B where A has no other successor and B no
/// other predecessor. Normalizes block-boundary choices away so two graphs
/// of different granularity can be compared structurally.
Cfg contract_fallthrough_chains(const Cfg& g);

/// Structural isomorphism over the reachable subgraphs: same edge kinds,
/// same shape, exit maps to exit. Out-edges pair up by kind in insertion
/// order, so same-kind siblings (switch cases) must be emitted in source
/// order by both builders.
bool cfg_isomorphic(const Cfg& a, const Cfg& b);

std::string dump_cfg(const Cfg& g);

}  // namespace blockcc
