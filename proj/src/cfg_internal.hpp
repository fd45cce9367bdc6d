#pragma once

// Shared statement-walking CFG construction. build_cfg drives it over a
// function body; the splitter's integrity check drives it over part payloads,
// seeding break/continue targets from part metadata and adding explicit
// label/jump edges between parts.

#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "blockcc/cfg.hpp"

namespace blockcc::detail {

struct CfgBuilder {
    Cfg g;
    int cur = -1;  // open block, -1 after an unconditional transfer
    std::vector<int> break_targets;
    std::vector<int> continue_targets;
    std::map<std::string, int> label_blocks;
    std::set<int> begun;  // label blocks already positioned (back-edge test)
    std::vector<std::pair<int, const Stmt*>> pending_gotos;
    // branch fallthrough waiting for the next block to open
    std::optional<std::pair<int, EdgeKind>> pending_in;

    int new_block(const std::string& note) {
        int id = int(g.nodes.size());
        g.nodes.push_back(CfgNode{id, {}, nullptr, note, false});
        return id;
    }

    CfgNode& node(int id) { return g.nodes[size_t(id)]; }

    void edge(int src, int dst, EdgeKind kind) { g.edges.push_back(CfgEdge{src, dst, kind}); }

    void attach_pending(int block) {
        if (pending_in) {
            edge(pending_in->first, block, pending_in->second);
            pending_in.reset();
        }
    }

    int here() {
        if (cur < 0) {
            cur = new_block("unreachable");
            attach_pending(cur);
        }
        return cur;
    }

    int exit_block() {
        if (g.exit < 0) g.exit = new_block("exit");
        return g.exit;
    }

    int ensure_label_block(const std::string& name) {
        auto it = label_blocks.find(name);
        if (it != label_blocks.end()) return it->second;
        int b = new_block("label " + name);
        label_blocks[name] = b;
        return b;
    }

    /// Close the open block (implicit fallthrough) and continue in the named
    /// block.
    void begin_block_at_label(const std::string& name) {
        int b = ensure_label_block(name);
        if (cur >= 0) {
            if (cur != b) edge(cur, b, EdgeKind::Fallthrough);
        } else {
            attach_pending(b);
        }
        cur = b;
        begun.insert(b);
    }

    void bind_labels(const Stmt& s) {
        if (s.labels.empty()) return;
        // A labeled statement is a jump target, so it heads its own block.
        if (cur < 0 || !node(cur).stmts.empty() || node(cur).term) {
            int next = new_block("label " + s.labels.front());
            if (cur >= 0)
                edge(cur, next, EdgeKind::Fallthrough);
            else
                attach_pending(next);
            cur = next;
        } else if (node(cur).note == "unreachable") {
            node(cur).note = "label " + s.labels.front();
        }
        for (const auto& l : s.labels) {
            if (label_blocks.count(l))
                fail(ErrorKind::DuplicateLabel, "duplicate label '" + l + "'", s.span);
            label_blocks[l] = cur;
            begun.insert(cur);
        }
    }

    void walk_block(const std::vector<StmtPtr>& stmts) {
        for (const auto& s : stmts) walk_stmt(*s);
    }

    void walk_stmts(const std::vector<const Stmt*>& stmts) {
        for (const Stmt* s : stmts) walk_stmt(*s);
    }

    void walk_stmt(const Stmt& s) {
        bind_labels(s);
        switch (s.kind) {
            case StmtKind::Assign:
            case StmtKind::Expr:
            case StmtKind::Decl:
            case StmtKind::Blank:
                node(here()).stmts.push_back(&s);
                return;
            case StmtKind::Block:
                walk_block(s.body);
                return;
            case StmtKind::Return: {
                node(here()).stmts.push_back(&s);
                edge(cur, exit_block(), EdgeKind::Fallthrough);
                cur = -1;
                return;
            }
            case StmtKind::Goto: {
                node(here()).stmts.push_back(&s);
                auto it = label_blocks.find(s.goto_target);
                if (it != label_blocks.end())
                    edge(cur, it->second, EdgeKind::Fallthrough);
                else
                    pending_gotos.emplace_back(cur, &s);
                cur = -1;
                return;
            }
            case StmtKind::Break: {
                node(here()).stmts.push_back(&s);
                if (break_targets.empty())
                    fail(ErrorKind::Semantic, "break outside loop or switch", s.span);
                edge(cur, break_targets.back(), EdgeKind::Fallthrough);
                cur = -1;
                return;
            }
            case StmtKind::Continue: {
                node(here()).stmts.push_back(&s);
                if (continue_targets.empty())
                    fail(ErrorKind::Semantic, "continue outside loop", s.span);
                edge(cur, continue_targets.back(), EdgeKind::Fallthrough);
                cur = -1;
                return;
            }
            case StmtKind::If: walk_if(s); return;
            case StmtKind::While: walk_while(s); return;
            case StmtKind::DoWhile: walk_do_while(s); return;
            case StmtKind::For: walk_for(s); return;
            case StmtKind::Switch: walk_switch(s); return;
        }
    }

    /// The open block becomes the branch point; reuses it only while it has
    /// no terminator yet.
    int branch_point(const Expr* term, const char* note) {
        int b = here();
        if (node(b).term) {
            int next = new_block(note);
            edge(b, next, EdgeKind::Fallthrough);
            b = cur = next;
        }
        node(b).term = term;
        if (node(b).note == "unreachable") node(b).note = note;
        return b;
    }

    void walk_if(const Stmt& s) {
        int cond = branch_point(s.expr.get(), "if.cond");
        int then_head = new_block("if.then");
        edge(cond, then_head, EdgeKind::BranchTrue);
        cur = then_head;
        walk_stmt(*s.then_branch);
        int then_tail = cur;

        int else_tail = -1;
        if (s.else_branch) {
            int else_head = new_block("if.else");
            edge(cond, else_head, EdgeKind::BranchFalse);
            cur = else_head;
            walk_stmt(*s.else_branch);
            else_tail = cur;
        }

        int join = new_block("if.join");
        if (!s.else_branch) edge(cond, join, EdgeKind::BranchFalse);
        if (then_tail >= 0) edge(then_tail, join, EdgeKind::Fallthrough);
        if (else_tail >= 0) edge(else_tail, join, EdgeKind::Fallthrough);
        cur = join;
    }

    void walk_while(const Stmt& s) {
        int head = new_block("while.head");
        if (cur >= 0) edge(cur, head, EdgeKind::Fallthrough);
        node(head).term = s.expr.get();
        int body = new_block("while.body");
        int after = new_block("while.after");
        edge(head, body, EdgeKind::BranchTrue);
        edge(head, after, EdgeKind::BranchFalse);

        break_targets.push_back(after);
        continue_targets.push_back(head);
        cur = body;
        walk_stmt(*s.loop_body);
        if (cur >= 0) edge(cur, head, EdgeKind::Back);
        break_targets.pop_back();
        continue_targets.pop_back();
        cur = after;
    }

    void walk_do_while(const Stmt& s) {
        int body = new_block("do.body");
        if (cur >= 0) edge(cur, body, EdgeKind::Fallthrough);
        int cond = new_block("do.cond");
        node(cond).term = s.expr.get();
        int after = new_block("do.after");
        edge(cond, body, EdgeKind::Back);
        edge(cond, after, EdgeKind::BranchFalse);

        break_targets.push_back(after);
        continue_targets.push_back(cond);
        cur = body;
        walk_stmt(*s.loop_body);
        if (cur >= 0) edge(cur, cond, EdgeKind::Fallthrough);
        break_targets.pop_back();
        continue_targets.pop_back();
        cur = after;
    }

    void walk_for(const Stmt& s) {
        if (s.for_init && s.for_init->kind != StmtKind::Blank) walk_stmt(*s.for_init);
        int head = new_block("for.head");
        if (cur >= 0) edge(cur, head, EdgeKind::Fallthrough);
        node(head).term = s.expr.get();
        int body = new_block("for.body");
        int incr = new_block("for.incr");
        int after = new_block("for.after");
        if (s.expr) {
            edge(head, body, EdgeKind::BranchTrue);
            edge(head, after, EdgeKind::BranchFalse);
        } else {
            edge(head, body, EdgeKind::Fallthrough);
        }
        if (s.for_incr && s.for_incr->kind != StmtKind::Blank)
            node(incr).stmts.push_back(s.for_incr.get());
        edge(incr, head, EdgeKind::Back);

        break_targets.push_back(after);
        continue_targets.push_back(incr);
        cur = body;
        walk_stmt(*s.loop_body);
        if (cur >= 0) edge(cur, incr, EdgeKind::Fallthrough);
        break_targets.pop_back();
        continue_targets.pop_back();
        cur = after;
    }

    void walk_switch(const Stmt& s) {
        int dispatch = branch_point(s.expr.get(), "switch.dispatch");
        int after = new_block("switch.after");
        break_targets.push_back(after);
        cur = -1;
        bool has_default = false;
        for (const auto& c : s.cases) {
            int head = new_block(c.value ? "switch.case" : "switch.default");
            if (cur >= 0) edge(cur, head, EdgeKind::Fallthrough);
            if (c.value) {
                edge(dispatch, head, EdgeKind::SwitchCase);
            } else {
                edge(dispatch, head, EdgeKind::Fallthrough);
                has_default = true;
            }
            cur = head;
            walk_block(c.body);
        }
        if (!has_default) edge(dispatch, after, EdgeKind::Fallthrough);
        if (cur >= 0) edge(cur, after, EdgeKind::Fallthrough);
        break_targets.pop_back();
        cur = after;
    }

    Cfg finish() {
        for (const auto& [src, stmt] : pending_gotos) {
            auto it = label_blocks.find(stmt->goto_target);
            if (it == label_blocks.end())
                fail(ErrorKind::UnresolvedLabel,
                     "goto targets missing label '" + stmt->goto_target + "'", stmt->span);
            edge(src, it->second, EdgeKind::Fallthrough);
        }
        std::vector<char> seen(g.nodes.size(), 0);
        std::vector<int> queue{g.entry};
        seen[size_t(g.entry)] = 1;
        while (!queue.empty()) {
            int n = queue.back();
            queue.pop_back();
            for (const auto& e : g.edges) {
                if (e.src == n && !seen[size_t(e.dst)]) {
                    seen[size_t(e.dst)] = 1;
                    queue.push_back(e.dst);
                }
            }
        }
        for (auto& n : g.nodes) n.dead = !seen[size_t(n.id)];
        return std::move(g);
    }
};

}  // namespace blockcc::detail
