#include "blockcc/cfg.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

#include "cfg_internal.hpp"

namespace blockcc {

const char* edge_kind_name(EdgeKind kind) {
    switch (kind) {
        case EdgeKind::Fallthrough: return "fallthrough";
        case EdgeKind::BranchTrue: return "branch-true";
        case EdgeKind::BranchFalse: return "branch-false";
        case EdgeKind::SwitchCase: return "switch-case";
        case EdgeKind::Back: return "back";
    }
    return "?";
}

std::vector<const CfgEdge*> Cfg::out_edges(int id) const {
    std::vector<const CfgEdge*> out;
    for (const auto& e : edges)
        if (e.src == id) out.push_back(&e);
    return out;
}

std::vector<const CfgEdge*> Cfg::in_edges(int id) const {
    std::vector<const CfgEdge*> in;
    for (const auto& e : edges)
        if (e.dst == id) in.push_back(&e);
    return in;
}

Cfg build_cfg(const FunctionDef& fn) {
    detail::CfgBuilder b;
    b.cur = b.new_block("entry");
    b.walk_block(fn.body->body);
    return b.finish();
}

Cfg contract_fallthrough_chains(const Cfg& g) {
    Cfg out = g;
    std::vector<char> alive(out.nodes.size(), 1);

    auto out_of = [&](int id) {
        std::vector<size_t> idx;
        for (size_t i = 0; i < out.edges.size(); ++i)
            if (out.edges[i].src == id) idx.push_back(i);
        return idx;
    };
    auto in_count = [&](int id) {
        int n = 0;
        for (const auto& e : out.edges)
            if (e.dst == id) ++n;
        return n;
    };

    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& n : out.nodes) {
            if (!alive[size_t(n.id)]) continue;
            auto oe = out_of(n.id);
            if (oe.size() != 1) continue;
            const CfgEdge e = out.edges[oe[0]];
            if (e.kind != EdgeKind::Fallthrough) continue;
            int a = n.id, b = e.dst;
            if (b == a || b == out.entry || !alive[size_t(b)]) continue;
            if (in_count(b) != 1) continue;
            CfgNode& na = out.nodes[size_t(a)];
            CfgNode& nb = out.nodes[size_t(b)];
            if (na.term && nb.term) continue;
            na.stmts.insert(na.stmts.end(), nb.stmts.begin(), nb.stmts.end());
            if (nb.term) na.term = nb.term;
            out.edges.erase(out.edges.begin() + ptrdiff_t(oe[0]));
            for (auto& re : out.edges)
                if (re.src == b) re.src = a;
            alive[size_t(b)] = 0;
            if (out.exit == b) out.exit = a;
            changed = true;
            break;
        }
    }

    Cfg compact;
    std::vector<int> remap(out.nodes.size(), -1);
    for (const auto& n : out.nodes) {
        if (!alive[size_t(n.id)]) continue;
        remap[size_t(n.id)] = int(compact.nodes.size());
        CfgNode cn = n;
        cn.id = remap[size_t(n.id)];
        compact.nodes.push_back(std::move(cn));
    }
    for (const auto& e : out.edges)
        compact.edges.push_back(CfgEdge{remap[size_t(e.src)], remap[size_t(e.dst)], e.kind});
    compact.entry = remap[size_t(out.entry)];
    compact.exit = out.exit < 0 ? -1 : remap[size_t(out.exit)];
    std::vector<char> seen(compact.nodes.size(), 0);
    std::deque<int> q{compact.entry};
    seen[size_t(compact.entry)] = 1;
    while (!q.empty()) {
        int id = q.front();
        q.pop_front();
        for (const auto& e : compact.edges)
            if (e.src == id && !seen[size_t(e.dst)]) {
                seen[size_t(e.dst)] = 1;
                q.push_back(e.dst);
            }
    }
    for (auto& n : compact.nodes) n.dead = !seen[size_t(n.id)];
    return compact;
}

namespace {

/// Out-edges grouped by kind, insertion order preserved within a kind.
std::vector<CfgEdge> canonical_out(const Cfg& g, int id) {
    std::vector<CfgEdge> out;
    for (const auto& e : g.edges)
        if (e.src == id) out.push_back(e);
    std::stable_sort(out.begin(), out.end(),
                     [](const CfgEdge& x, const CfgEdge& y) { return int(x.kind) < int(y.kind); });
    return out;
}

}  // namespace

bool cfg_isomorphic(const Cfg& a, const Cfg& b) {
    if (a.nodes.empty() || b.nodes.empty()) return a.nodes.empty() == b.nodes.empty();
    std::vector<int> a2b(a.nodes.size(), -1), b2a(b.nodes.size(), -1);
    std::deque<std::pair<int, int>> q;
    a2b[size_t(a.entry)] = b.entry;
    b2a[size_t(b.entry)] = a.entry;
    q.emplace_back(a.entry, b.entry);
    while (!q.empty()) {
        auto [x, y] = q.front();
        q.pop_front();
        if ((x == a.exit) != (y == b.exit)) return false;
        auto ex = canonical_out(a, x);
        auto ey = canonical_out(b, y);
        if (ex.size() != ey.size()) return false;
        for (size_t i = 0; i < ex.size(); ++i) {
            if (ex[i].kind != ey[i].kind) return false;
            int tx = ex[i].dst, ty = ey[i].dst;
            int mapped = a2b[size_t(tx)];
            if (mapped >= 0) {
                if (mapped != ty) return false;
            } else {
                if (b2a[size_t(ty)] >= 0) return false;
                a2b[size_t(tx)] = ty;
                b2a[size_t(ty)] = tx;
                q.emplace_back(tx, ty);
            }
        }
    }
    return true;
}

std::string dump_cfg(const Cfg& g) {
    std::ostringstream os;
    for (const auto& n : g.nodes) {
        os << "node " << n.id;
        if (n.id == g.entry) os << " entry";
        if (n.id == g.exit) os << " exit";
        if (n.dead) os << " dead";
        os << " [" << n.note << "] stmts=" << n.stmts.size();
        if (n.term) os << " term";
        os << "\n";
    }
    for (const auto& e : g.edges)
        os << "edge " << e.src << " -> " << e.dst << " " << edge_kind_name(e.kind) << "\n";
    return os.str();
}

}  // namespace blockcc
