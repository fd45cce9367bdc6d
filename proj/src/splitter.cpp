#include "blockcc/splitter.hpp"

#include <deque>
#include <map>
#include <sstream>

#include "blockcc/lexer.hpp"
#include "blockcc/printer.hpp"
#include "cfg_internal.hpp"

namespace blockcc {

const char* part_kind_name(PartKind kind) {
    switch (kind) {
        case PartKind::SourceBlock: return "SourceBlock";
        case PartKind::Label: return "Label";
        case PartKind::CondJump: return "CondJump";
        case PartKind::UncondJump: return "UncondJump";
    }
    return "?";
}

ComposabilityVerdict check_composability(const FunctionDef& fn) {
    ComposabilityVerdict v;
    std::deque<const Stmt*> q;
    for (const auto& s : fn.body->body) q.push_back(s.get());
    auto push_front_block = [&](const std::vector<StmtPtr>& stmts) {
        for (auto it = stmts.rbegin(); it != stmts.rend(); ++it) q.push_front(it->get());
    };
    while (!q.empty()) {
        const Stmt* s = q.front();
        q.pop_front();
        switch (s->kind) {
            case StmtKind::Goto:
                v.blocking_constructs.emplace_back(s->span, "goto breaks structured control flow");
                break;
            case StmtKind::Block:
                push_front_block(s->body);
                break;
            case StmtKind::If:
                if (s->else_branch) q.push_front(s->else_branch.get());
                q.push_front(s->then_branch.get());
                break;
            case StmtKind::While:
            case StmtKind::DoWhile:
            case StmtKind::For:
                q.push_front(s->loop_body.get());
                break;
            case StmtKind::Switch:
                for (auto it = s->cases.rbegin(); it != s->cases.rend(); ++it)
                    push_front_block(it->body);
                break;
            default:
                break;  // basic statements compose
        }
    }
    v.composable = v.blocking_constructs.empty();
    return v;
}

SplitDecision heuristic_decide(const SplitCandidate& block, const SplitConfig& config) {
    if (!block.is_control) return SplitDecision::Keep;
    return block.token_estimate > config.split_threshold ? SplitDecision::Split
                                                         : SplitDecision::Keep;
}

SplitPolicy heuristic_policy(SplitConfig config) {
    return [config](const SplitCandidate& c) { return heuristic_decide(c, config); };
}

SplitPolicy always_split_policy() {
    return [](const SplitCandidate& c) {
        return c.is_control ? SplitDecision::Split : SplitDecision::Keep;
    };
}

SplitPolicy never_split_policy() {
    return [](const SplitCandidate&) { return SplitDecision::Keep; };
}

namespace {

struct Ctx {
    int loop_depth = 0;
    std::vector<std::string> break_stack;
    std::vector<std::string> continue_stack;
};

struct Work {
    bool ready = false;
    ControlPart part;               // when ready
    std::vector<const Stmt*> stmts; // otherwise a run to segment
    Ctx ctx;
};

struct Splitter {
    const FunctionDef& fn;
    const SplitPolicy& decide;
    std::deque<Work> work;
    std::vector<ControlPart> parts;
    std::map<const Stmt*, int> construct_ids;
    int next_id = 0;

    Splitter(const FunctionDef& f, const SplitPolicy& d) : fn(f), decide(d) {
        number_block(f.body->body);
    }

    // Construct ids come from a preorder walk so label names do not depend
    // on the policy's decisions.
    void number_block(const std::vector<StmtPtr>& stmts) {
        for (const auto& s : stmts) number_stmt(*s);
    }
    void number_stmt(const Stmt& s) {
        switch (s.kind) {
            case StmtKind::If:
                construct_ids[&s] = next_id++;
                number_stmt(*s.then_branch);
                if (s.else_branch) number_stmt(*s.else_branch);
                break;
            case StmtKind::While:
            case StmtKind::DoWhile:
            case StmtKind::For:
                construct_ids[&s] = next_id++;
                number_stmt(*s.loop_body);
                break;
            case StmtKind::Switch:
                construct_ids[&s] = next_id++;
                for (const auto& c : s.cases) number_block(c.body);
                break;
            case StmtKind::Block:
                number_block(s.body);
                break;
            default:
                break;
        }
    }

    std::string label(int cid, const std::string& kind) const {
        return ".L_" + fn.name + "__" + std::to_string(cid) + "_" + kind;
    }

    static bool splittable(const Stmt& s) {
        if (!s.labels.empty()) return false;  // keep C labels in source text
        switch (s.kind) {
            case StmtKind::If:
            case StmtKind::While:
            case StmtKind::DoWhile:
            case StmtKind::Switch:
                return true;
            case StmtKind::For:
                return s.expr != nullptr && s.for_init != nullptr && s.for_incr != nullptr;
            default:
                return false;
        }
    }

    ControlPart make(PartKind kind, std::string payload, const Ctx& ctx, std::string role,
                     StmtKind ck, int cid) {
        ControlPart p;
        p.kind = kind;
        p.payload = std::move(payload);
        p.loop_depth = ctx.loop_depth;
        p.role = std::move(role);
        p.construct_kind = ck;
        p.construct_id = cid;
        p.break_stack = ctx.break_stack;
        p.continue_stack = ctx.continue_stack;
        return p;
    }

    Work ready(ControlPart p) {
        Work w;
        w.ready = true;
        w.part = std::move(p);
        return w;
    }

    Work block_work(const std::vector<StmtPtr>& stmts, const Ctx& ctx) {
        Work w;
        w.ctx = ctx;
        for (const auto& s : stmts) w.stmts.push_back(s.get());
        return w;
    }

    void flush_run(std::vector<const Stmt*>& run, const Ctx& ctx) {
        if (run.empty()) return;
        std::string text;
        for (const Stmt* s : run) text += print_stmt(*s);
        ControlPart p = make(PartKind::SourceBlock, std::move(text), ctx, "keep",
                             StmtKind::Blank, -1);
        p.stmts = run;
        parts.push_back(std::move(p));
        run.clear();
    }

    void enqueue_front(std::vector<Work> ws) {
        for (auto it = ws.rbegin(); it != ws.rend(); ++it) work.push_front(std::move(*it));
    }

    void process(Work w) {
        std::vector<const Stmt*> run;
        for (size_t i = 0; i < w.stmts.size(); ++i) {
            const Stmt* s = w.stmts[i];
            if (splittable(*s)) {
                SplitCandidate cand{s, token_estimate_of(print_stmt(*s)), true,
                                    w.ctx.loop_depth};
                if (decide(cand) == SplitDecision::Split) {
                    flush_run(run, w.ctx);
                    std::vector<Work> shape = expand(*s, w.ctx);
                    if (i + 1 < w.stmts.size()) {
                        Work rest;
                        rest.ctx = w.ctx;
                        rest.stmts.assign(w.stmts.begin() + ptrdiff_t(i) + 1, w.stmts.end());
                        shape.push_back(std::move(rest));
                    }
                    enqueue_front(std::move(shape));
                    return;
                }
            }
            run.push_back(s);
        }
        flush_run(run, w.ctx);
    }

    std::vector<Work> expand(const Stmt& s, const Ctx& octx) {
        int cid = construct_ids.at(&s);
        switch (s.kind) {
            case StmtKind::For: return expand_for(s, octx, cid);
            case StmtKind::While: return expand_while(s, octx, cid);
            case StmtKind::DoWhile: return expand_do_while(s, octx, cid);
            case StmtKind::If: return expand_if(s, octx, cid);
            case StmtKind::Switch: return expand_switch(s, octx, cid);
            default: fail(ErrorKind::Internal, "expand on non-control statement");
        }
    }

    std::vector<Work> expand_for(const Stmt& s, const Ctx& octx, int cid) {
        std::string body_l = label(cid, "body");
        std::string end_l = label(cid, "end");
        std::string cont_l = label(cid, "cont");
        Ctx shape = octx;
        shape.loop_depth += 1;
        Ctx inner = shape;
        inner.break_stack.push_back(end_l);
        inner.continue_stack.push_back(cont_l);

        std::vector<Work> out;
        ControlPart init = make(PartKind::SourceBlock, print_stmt(*s.for_init), shape, "init",
                                StmtKind::For, cid);
        init.stmts = {s.for_init.get()};
        out.push_back(ready(std::move(init)));
        out.push_back(ready(make(PartKind::Label, body_l, shape, "head", StmtKind::For, cid)));
        ControlPart cmp = make(PartKind::SourceBlock, print_expr(*s.expr), shape, "cmp",
                               StmtKind::For, cid);
        cmp.cond = s.expr.get();
        out.push_back(ready(std::move(cmp)));
        out.push_back(ready(make(PartKind::CondJump, end_l, shape, "exit", StmtKind::For, cid)));
        out.push_back(block_work(s.loop_body->body, inner));
        ControlPart incr = make(PartKind::SourceBlock, print_stmt(*s.for_incr), shape, "incr",
                                StmtKind::For, cid);
        incr.stmts = {s.for_incr.get()};
        incr.head_labels = {cont_l};
        out.push_back(ready(std::move(incr)));
        out.push_back(ready(make(PartKind::UncondJump, body_l, shape, "loop", StmtKind::For, cid)));
        out.push_back(ready(make(PartKind::Label, end_l, shape, "end", StmtKind::For, cid)));
        return out;
    }

    std::vector<Work> expand_while(const Stmt& s, const Ctx& octx, int cid) {
        std::string body_l = label(cid, "body");
        std::string end_l = label(cid, "end");
        Ctx shape = octx;
        shape.loop_depth += 1;
        Ctx inner = shape;
        inner.break_stack.push_back(end_l);
        inner.continue_stack.push_back(body_l);

        std::vector<Work> out;
        out.push_back(ready(make(PartKind::Label, body_l, shape, "head", StmtKind::While, cid)));
        ControlPart cmp = make(PartKind::SourceBlock, print_expr(*s.expr), shape, "cmp",
                               StmtKind::While, cid);
        cmp.cond = s.expr.get();
        out.push_back(ready(std::move(cmp)));
        out.push_back(ready(make(PartKind::CondJump, end_l, shape, "exit", StmtKind::While, cid)));
        out.push_back(block_work(s.loop_body->body, inner));
        out.push_back(
            ready(make(PartKind::UncondJump, body_l, shape, "loop", StmtKind::While, cid)));
        out.push_back(ready(make(PartKind::Label, end_l, shape, "end", StmtKind::While, cid)));
        return out;
    }

    std::vector<Work> expand_do_while(const Stmt& s, const Ctx& octx, int cid) {
        std::string body_l = label(cid, "body");
        std::string end_l = label(cid, "end");
        std::string cont_l = label(cid, "cont");
        Ctx shape = octx;
        shape.loop_depth += 1;
        Ctx inner = shape;
        inner.break_stack.push_back(end_l);
        inner.continue_stack.push_back(cont_l);

        std::vector<Work> out;
        out.push_back(ready(make(PartKind::Label, body_l, shape, "head", StmtKind::DoWhile, cid)));
        out.push_back(block_work(s.loop_body->body, inner));
        ControlPart cmp = make(PartKind::SourceBlock, print_expr(*s.expr), shape, "cmp",
                               StmtKind::DoWhile, cid);
        cmp.cond = s.expr.get();
        cmp.head_labels = {cont_l};
        out.push_back(ready(std::move(cmp)));
        ControlPart cj = make(PartKind::CondJump, body_l, shape, "loop", StmtKind::DoWhile, cid);
        cj.jump_if_true = true;
        out.push_back(ready(std::move(cj)));
        out.push_back(ready(make(PartKind::Label, end_l, shape, "end", StmtKind::DoWhile, cid)));
        return out;
    }

    std::vector<Work> expand_if(const Stmt& s, const Ctx& octx, int cid) {
        std::vector<Work> out;
        ControlPart cmp = make(PartKind::SourceBlock, print_expr(*s.expr), octx, "cmp",
                               StmtKind::If, cid);
        cmp.cond = s.expr.get();
        out.push_back(ready(std::move(cmp)));
        std::string endif_l = label(cid, "endif");
        if (s.else_branch) {
            std::string else_l = label(cid, "else");
            out.push_back(
                ready(make(PartKind::CondJump, else_l, octx, "else", StmtKind::If, cid)));
            out.push_back(block_work(s.then_branch->body, octx));
            out.push_back(
                ready(make(PartKind::UncondJump, endif_l, octx, "endif", StmtKind::If, cid)));
            out.push_back(ready(make(PartKind::Label, else_l, octx, "else", StmtKind::If, cid)));
            out.push_back(block_work(s.else_branch->body, octx));
            out.push_back(ready(make(PartKind::Label, endif_l, octx, "endif", StmtKind::If, cid)));
        } else {
            out.push_back(
                ready(make(PartKind::CondJump, endif_l, octx, "endif", StmtKind::If, cid)));
            out.push_back(block_work(s.then_branch->body, octx));
            out.push_back(ready(make(PartKind::Label, endif_l, octx, "endif", StmtKind::If, cid)));
        }
        return out;
    }

    std::vector<Work> expand_switch(const Stmt& s, const Ctx& octx, int cid) {
        std::string end_l = label(cid, "end");
        Ctx inner = octx;
        inner.break_stack.push_back(end_l);

        std::vector<Work> out;
        ControlPart expr = make(PartKind::SourceBlock, print_expr(*s.expr), octx, "expr",
                                StmtKind::Switch, cid);
        expr.cond = s.expr.get();
        out.push_back(ready(std::move(expr)));

        std::string default_l;
        std::vector<std::string> case_labels;
        int case_ix = 0;
        for (const auto& c : s.cases) {
            if (c.value) {
                case_labels.push_back(label(cid, "case" + std::to_string(case_ix++)));
            } else {
                default_l = label(cid, "default");
                case_labels.push_back(default_l);
            }
        }
        size_t li = 0;
        for (const auto& c : s.cases) {
            const std::string& l = case_labels[li++];
            if (!c.value) continue;
            ControlPart cj = make(PartKind::CondJump, l, octx, "case", StmtKind::Switch, cid);
            cj.case_value = c.value;
            cj.cond = s.expr.get();
            out.push_back(ready(std::move(cj)));
        }
        out.push_back(ready(make(PartKind::UncondJump, default_l.empty() ? end_l : default_l,
                                 octx, "dispatch", StmtKind::Switch, cid)));
        li = 0;
        for (const auto& c : s.cases) {
            ControlPart lab = make(PartKind::Label, case_labels[li++], octx,
                                   c.value ? "case" : "default", StmtKind::Switch, cid);
            lab.case_value = c.value;
            out.push_back(ready(std::move(lab)));
            out.push_back(block_work(c.body, inner));
        }
        out.push_back(ready(make(PartKind::Label, end_l, octx, "end", StmtKind::Switch, cid)));
        return out;
    }

    std::vector<ControlPart> run() {
        Work top;
        for (const auto& s : fn.body->body) top.stmts.push_back(s.get());
        work.push_back(std::move(top));
        while (!work.empty()) {
            Work w = std::move(work.front());
            work.pop_front();
            if (w.ready)
                parts.push_back(std::move(w.part));
            else
                process(std::move(w));
        }
        coalesce();
        for (size_t i = 0; i < parts.size(); ++i) parts[i].id = int(i);
        return std::move(parts);
    }

    void coalesce() {
        std::vector<ControlPart> merged;
        for (auto& p : parts) {
            if (!merged.empty() && p.kind == PartKind::SourceBlock && p.role == "keep" &&
                merged.back().kind == PartKind::SourceBlock && merged.back().role == "keep" &&
                merged.back().loop_depth == p.loop_depth &&
                merged.back().break_stack == p.break_stack &&
                merged.back().continue_stack == p.continue_stack && p.head_labels.empty()) {
                merged.back().payload += p.payload;
                merged.back().stmts.insert(merged.back().stmts.end(), p.stmts.begin(),
                                           p.stmts.end());
                continue;
            }
            merged.push_back(std::move(p));
        }
        parts = std::move(merged);
    }
};

}  // namespace

std::vector<ControlPart> split_parts(const FunctionDef& fn, const SplitConfig& config,
                                     const SplitPolicy& decide) {
    if (config.split_threshold <= 0)
        fail(ErrorKind::Config, "split_threshold must be positive");
    ComposabilityVerdict v = check_composability(fn);
    if (!v.composable)
        fail(ErrorKind::NonComposable,
             "function '" + fn.name + "' is not composable: " + v.blocking_constructs[0].second,
             v.blocking_constructs[0].first);
    Splitter sp(fn, decide);
    return sp.run();
}

// ---------------------------------------------------------------------------
// Recombination: invert the split shapes back into C text, validating part
// order and jump targets along the way.

namespace {

std::string rstrip(std::string s) {
    while (!s.empty() && (s.back() == ' ' || s.back() == '\n' || s.back() == '\t')) s.pop_back();
    return s;
}

std::string strip_trailing_semi(const std::string& s) {
    std::string t = rstrip(s);
    if (!t.empty() && t.back() == ';') t.pop_back();
    return t;
}

struct PartReader {
    const std::vector<ControlPart>& ps;
    size_t i = 0;

    bool done() const { return i >= ps.size(); }
    const ControlPart& peek() const {
        if (done()) fail(ErrorKind::Internal, "unexpected end of parts");
        return ps[i];
    }
    const ControlPart& take(PartKind k, const char* role, int cid) {
        const ControlPart& p = peek();
        if (p.kind != k || (role && p.role != role) || p.construct_id != cid)
            fail(ErrorKind::Internal, "malformed part sequence at part " + std::to_string(p.id));
        ++i;
        return p;
    }
    bool at(int cid, PartKind k, const char* role) const {
        return !done() && ps[i].construct_id == cid && ps[i].kind == k &&
               (role == nullptr || ps[i].role == role);
    }
};

std::string construct_text(PartReader& r);

template <typename Stop>
std::string seq_text(PartReader& r, Stop stop) {
    std::string out;
    while (!r.done() && !stop()) {
        const ControlPart& p = r.peek();
        if (p.kind == PartKind::SourceBlock && p.role == "keep") {
            out += p.payload;
            ++r.i;
        } else {
            out += construct_text(r);
        }
    }
    return out;
}

void require(bool ok, const char* what) {
    if (!ok) fail(ErrorKind::Internal, what);
}

std::string for_text(PartReader& r, int cid) {
    const ControlPart& init = r.take(PartKind::SourceBlock, "init", cid);
    const ControlPart& head = r.take(PartKind::Label, "head", cid);
    const ControlPart& cmp = r.take(PartKind::SourceBlock, "cmp", cid);
    const ControlPart& cj = r.take(PartKind::CondJump, "exit", cid);
    std::string body = seq_text(r, [&] { return r.at(cid, PartKind::SourceBlock, "incr"); });
    const ControlPart& incr = r.take(PartKind::SourceBlock, "incr", cid);
    const ControlPart& uj = r.take(PartKind::UncondJump, "loop", cid);
    const ControlPart& end = r.take(PartKind::Label, "end", cid);
    require(cj.payload == end.payload, "for exit jump target mismatch");
    require(uj.payload == head.payload, "for loop jump target mismatch");
    return "for (" + rstrip(init.payload) + " " + cmp.payload + "; " +
           strip_trailing_semi(incr.payload) + ") {\n" + body + "}\n";
}

std::string while_text(PartReader& r, int cid) {
    const ControlPart& head = r.take(PartKind::Label, "head", cid);
    const ControlPart& cmp = r.take(PartKind::SourceBlock, "cmp", cid);
    const ControlPart& cj = r.take(PartKind::CondJump, "exit", cid);
    std::string body = seq_text(r, [&] { return r.at(cid, PartKind::UncondJump, "loop"); });
    const ControlPart& uj = r.take(PartKind::UncondJump, "loop", cid);
    const ControlPart& end = r.take(PartKind::Label, "end", cid);
    require(cj.payload == end.payload, "while exit jump target mismatch");
    require(uj.payload == head.payload, "while loop jump target mismatch");
    return "while (" + cmp.payload + ") {\n" + body + "}\n";
}

std::string do_while_text(PartReader& r, int cid) {
    const ControlPart& head = r.take(PartKind::Label, "head", cid);
    std::string body = seq_text(r, [&] { return r.at(cid, PartKind::SourceBlock, "cmp"); });
    const ControlPart& cmp = r.take(PartKind::SourceBlock, "cmp", cid);
    const ControlPart& cj = r.take(PartKind::CondJump, "loop", cid);
    r.take(PartKind::Label, "end", cid);
    require(cj.payload == head.payload, "do-while jump target mismatch");
    require(cj.jump_if_true, "do-while jump polarity");
    return "do {\n" + body + "} while (" + cmp.payload + ");\n";
}

std::string if_text(PartReader& r, int cid) {
    const ControlPart& cmp = r.take(PartKind::SourceBlock, "cmp", cid);
    const ControlPart& cj = r.peek();
    if (cj.role == "else") {
        r.take(PartKind::CondJump, "else", cid);
        std::string then_body =
            seq_text(r, [&] { return r.at(cid, PartKind::UncondJump, "endif"); });
        const ControlPart& uj = r.take(PartKind::UncondJump, "endif", cid);
        const ControlPart& else_l = r.take(PartKind::Label, "else", cid);
        std::string else_body = seq_text(r, [&] { return r.at(cid, PartKind::Label, "endif"); });
        const ControlPart& end_l = r.take(PartKind::Label, "endif", cid);
        require(cj.payload == else_l.payload, "if else-jump target mismatch");
        require(uj.payload == end_l.payload, "if endif-jump target mismatch");
        return "if (" + cmp.payload + ") {\n" + then_body + "} else {\n" + else_body + "}\n";
    }
    r.take(PartKind::CondJump, "endif", cid);
    std::string then_body = seq_text(r, [&] { return r.at(cid, PartKind::Label, "endif"); });
    const ControlPart& end_l = r.take(PartKind::Label, "endif", cid);
    require(cj.payload == end_l.payload, "if endif-jump target mismatch");
    return "if (" + cmp.payload + ") {\n" + then_body + "}\n";
}

std::string switch_text(PartReader& r, int cid) {
    const ControlPart& expr = r.take(PartKind::SourceBlock, "expr", cid);
    std::vector<const ControlPart*> case_jumps;
    while (r.at(cid, PartKind::CondJump, "case")) {
        case_jumps.push_back(&r.peek());
        ++r.i;
    }
    const ControlPart& uj = r.take(PartKind::UncondJump, "dispatch", cid);

    std::string out = "switch (" + expr.payload + ") {\n";
    std::string default_label;
    size_t jump_ix = 0;
    while (!r.at(cid, PartKind::Label, "end")) {
        const ControlPart& lab = r.peek();
        if (lab.kind != PartKind::Label || lab.construct_id != cid)
            fail(ErrorKind::Internal, "malformed switch parts");
        ++r.i;
        if (lab.role == "default") {
            require(!lab.case_value.has_value(), "default label with case value");
            default_label = lab.payload;
            out += "default:\n";
        } else {
            require(lab.role == "case" && lab.case_value.has_value(), "bad switch label part");
            require(jump_ix < case_jumps.size(), "more case labels than dispatch jumps");
            require(case_jumps[jump_ix]->payload == lab.payload, "case jump target mismatch");
            require(case_jumps[jump_ix]->case_value == lab.case_value, "case value mismatch");
            ++jump_ix;
            int64_t v = *lab.case_value;
            out += "case " + std::to_string(v) + ":\n";
        }
        out += seq_text(r, [&] { return r.at(cid, PartKind::Label, nullptr); });
    }
    const ControlPart& end = r.take(PartKind::Label, "end", cid);
    require(jump_ix == case_jumps.size(), "unmatched case dispatch jumps");
    require(uj.payload == (default_label.empty() ? end.payload : default_label),
            "switch dispatch jump target mismatch");
    out += "}\n";
    return out;
}

std::string construct_text(PartReader& r) {
    const ControlPart& p = r.peek();
    int cid = p.construct_id;
    switch (p.construct_kind) {
        case StmtKind::For:
            require(p.role == "init", "for parts must start at init");
            return for_text(r, cid);
        case StmtKind::While:
            require(p.role == "head", "while parts must start at the head label");
            return while_text(r, cid);
        case StmtKind::DoWhile:
            require(p.role == "head", "do-while parts must start at the head label");
            return do_while_text(r, cid);
        case StmtKind::If:
            require(p.role == "cmp", "if parts must start at cmp");
            return if_text(r, cid);
        case StmtKind::Switch:
            require(p.role == "expr", "switch parts must start at expr");
            return switch_text(r, cid);
        default:
            fail(ErrorKind::Internal, "unexpected part role '" + p.role + "'");
    }
}

}  // namespace

std::string recombine_parts_text(const std::vector<ControlPart>& parts) {
    PartReader r{parts};
    return seq_text(r, [] { return false; });
}

Cfg stitch_parts_cfg(const std::vector<ControlPart>& parts) {
    detail::CfgBuilder b;
    b.cur = b.new_block("entry");
    for (const auto& p : parts) {
        switch (p.kind) {
            case PartKind::Label:
                b.begin_block_at_label(p.payload);
                break;
            case PartKind::SourceBlock: {
                for (const auto& hl : p.head_labels) b.begin_block_at_label(hl);
                b.break_targets.clear();
                b.continue_targets.clear();
                for (const auto& l : p.break_stack)
                    b.break_targets.push_back(b.ensure_label_block(l));
                for (const auto& l : p.continue_stack)
                    b.continue_targets.push_back(b.ensure_label_block(l));
                if (p.cond) b.branch_point(p.cond, "cmp");
                b.walk_stmts(p.stmts);
                break;
            }
            case PartKind::CondJump: {
                int t = b.ensure_label_block(p.payload);
                if (p.case_value) {
                    b.edge(b.here(), t, EdgeKind::SwitchCase);
                } else {
                    EdgeKind taken = b.begun.count(t)
                                         ? EdgeKind::Back
                                         : (p.jump_if_true ? EdgeKind::BranchTrue
                                                           : EdgeKind::BranchFalse);
                    b.edge(b.here(), t, taken);
                    b.pending_in = {{b.cur, p.jump_if_true ? EdgeKind::BranchFalse
                                                           : EdgeKind::BranchTrue}};
                    b.cur = -1;
                }
                break;
            }
            case PartKind::UncondJump: {
                int t = b.ensure_label_block(p.payload);
                b.edge(b.here(), t,
                       b.begun.count(t) ? EdgeKind::Back : EdgeKind::Fallthrough);
                b.cur = -1;
                break;
            }
        }
    }
    return b.finish();
}

namespace {

bool tokens_match(const std::string& a, const std::string& b) {
    std::vector<Token> ta = lex(a);
    std::vector<Token> tb = lex(b);
    if (ta.size() != tb.size()) return false;
    for (size_t i = 0; i < ta.size(); ++i) {
        const Token& x = ta[i];
        const Token& y = tb[i];
        if (x.kind != y.kind || x.text != y.text) return false;
        if (x.int_value != y.int_value || x.is_unsigned != y.is_unsigned ||
            x.is_long != y.is_long)
            return false;
        if (x.float_value != y.float_value || x.is_float32 != y.is_float32) return false;
    }
    return true;
}

}  // namespace

bool verify_split_integrity(const FunctionDef& fn, const std::vector<ControlPart>& parts) {
    try {
        std::map<std::string, int> defs;
        for (const auto& p : parts) {
            if (p.kind == PartKind::Label) defs[p.payload] += 1;
            for (const auto& hl : p.head_labels) defs[hl] += 1;
        }
        for (const auto& [name, count] : defs)
            if (count != 1) return false;
        for (const auto& p : parts) {
            if ((p.kind == PartKind::CondJump || p.kind == PartKind::UncondJump) &&
                !defs.count(p.payload))
                return false;
        }
        for (size_t i = 0; i < parts.size(); ++i)
            if (parts[i].id != int(i)) return false;

        std::string recombined = recombine_parts_text(parts);
        std::string original;
        for (const auto& s : fn.body->body) original += print_stmt(*s);
        if (!tokens_match(recombined, original)) return false;

        Cfg want = contract_fallthrough_chains(build_cfg(fn));
        Cfg got = contract_fallthrough_chains(stitch_parts_cfg(parts));
        return cfg_isomorphic(want, got);
    } catch (const CompileError&) {
        return false;
    }
}

std::string dump_parts(const std::vector<ControlPart>& parts) {
    std::ostringstream os;
    for (const auto& p : parts) {
        std::string flat;
        bool in_space = false;
        for (char c : p.payload) {
            if (c == ' ' || c == '\n' || c == '\t') {
                in_space = true;
                continue;
            }
            if (in_space && !flat.empty()) flat += ' ';
            in_space = false;
            flat += c;
        }
        os << p.id << ' ' << part_kind_name(p.kind) << ' ' << p.loop_depth << ' ' << flat
           << '\n';
    }
    return os.str();
}

}  // namespace blockcc
