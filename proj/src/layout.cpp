#include "blockcc/layout.hpp"

#include <set>
#include <sstream>

#include "blockcc/printer.hpp"
#include "blockcc/proc.hpp"

namespace blockcc {

namespace {

uint64_t align_up(uint64_t v, uint64_t a) { return (v + a - 1) / a * a; }

TypeLayout compute_rec(const TypePtr& t, std::set<std::string>& open_tags) {
    TypeLayout out;
    out.type_name = print_declarator(t, "");
    switch (t->kind) {
        case TypeKind::Void:
            fail(ErrorKind::UnknownType, "void has no layout");
        case TypeKind::Char:
        case TypeKind::UChar:
            out.size = out.align = 1;
            return out;
        case TypeKind::Short:
        case TypeKind::UShort:
            out.size = out.align = 2;
            return out;
        case TypeKind::Int:
        case TypeKind::UInt:
        case TypeKind::Float:
            out.size = out.align = 4;
            return out;
        case TypeKind::Long:
        case TypeKind::ULong:
        case TypeKind::Double:
        case TypeKind::Pointer:
            out.size = out.align = 8;
            return out;
        case TypeKind::Array: {
            out.element =
                std::make_shared<TypeLayout>(compute_rec(t->element, open_tags));
            out.count = t->array_len;
            out.align = out.element->align;
            out.size = out.element->size * t->array_len;
            return out;
        }
        case TypeKind::Record: {
            if (t->members.empty())
                fail(ErrorKind::UnknownType, "incomplete record " + t->tag);
            if (!open_tags.insert(t->tag).second)
                fail(ErrorKind::RecursiveType, t->tag);
            uint64_t offset = 0;
            uint64_t max_align = 1;
            uint64_t max_size = 0;
            for (const auto& m : t->members) {
                TypeLayout ml = compute_rec(m.type, open_tags);
                TypeLayout::MemberLayout entry;
                entry.name = m.name;
                if (t->is_union) {
                    entry.offset = 0;
                } else {
                    offset = align_up(offset, ml.align);
                    entry.offset = offset;
                    offset += ml.size;
                }
                max_align = std::max(max_align, ml.align);
                max_size = std::max(max_size, ml.size);
                entry.layout = std::make_shared<TypeLayout>(std::move(ml));
                out.members.push_back(std::move(entry));
            }
            out.align = max_align;
            out.size = align_up(t->is_union ? max_size : offset, max_align);
            open_tags.erase(t->tag);
            return out;
        }
    }
    fail(ErrorKind::Internal, "bad type kind");
}

}  // namespace

TypeLayout compute_layout(const TypePtr& t) {
    if (!t) fail(ErrorKind::UnknownType, "null type");
    std::set<std::string> open;
    return compute_rec(t, open);
}

std::string build_layout_probe(const std::vector<LayoutSubject>& subjects) {
    std::ostringstream out;
    out << "#include <stddef.h>\n#include <stdio.h>\n\n";
    std::set<std::string> emitted;
    for (const auto& s : subjects) {
        if (!s.decls.empty() && emitted.insert(s.decls).second) out << s.decls << "\n";
    }
    out << "int main(void) {\n";
    for (const auto& s : subjects) {
        const std::string& name = s.layout.type_name;
        out << "    printf(\"%s %zu\\n\", \"size:" << name << "\", sizeof(" << name
            << "));\n";
        out << "    printf(\"%s %zu\\n\", \"align:" << name << "\", _Alignof(" << name
            << "));\n";
        if (s.type->kind == TypeKind::Record) {
            for (const auto& m : s.type->members) {
                out << "    printf(\"%s %zu\\n\", \"offset:" << name << "." << m.name
                    << "\", offsetof(" << name << ", " << m.name << "));\n";
            }
        }
    }
    out << "    return 0;\n}\n";
    return out.str();
}

std::map<std::string, uint64_t> SystemCompilerOracle::facts(
    const std::string& probe_source) {
    TempDir dir("blockcc-layout");
    std::string src = dir.file("probe.c");
    std::string bin = dir.file("probe");
    write_text_file(src, probe_source);
    ProcResult cc = run_process({cc_, "-std=c11", "-o", bin, src});
    if (!cc.ok())
        fail(ErrorKind::OracleUnavailable,
             "layout probe failed to build: " + cc.err.substr(0, 500));
    ProcResult run = run_process({bin});
    if (!run.ok())
        fail(ErrorKind::OracleUnavailable, "layout probe failed to run");
    std::map<std::string, uint64_t> out;
    std::istringstream lines(run.out);
    std::string line;
    while (std::getline(lines, line)) {
        size_t sp = line.rfind(' ');
        if (sp == std::string::npos) continue;
        out[line.substr(0, sp)] = std::stoull(line.substr(sp + 1));
    }
    return out;
}

std::vector<Mismatch> verify_layout_against_oracle(
    const std::vector<LayoutSubject>& subjects, LayoutOracle& oracle) {
    auto facts = oracle.facts(build_layout_probe(subjects));
    std::vector<Mismatch> mismatches;
    auto check = [&](const std::string& key, uint64_t computed) {
        auto it = facts.find(key);
        if (it == facts.end()) {
            mismatches.push_back({key + " (missing from oracle)", computed, 0});
        } else if (it->second != computed) {
            mismatches.push_back({key, computed, it->second});
        }
    };
    for (const auto& s : subjects) {
        const std::string& name = s.layout.type_name;
        check("size:" + name, s.layout.size);
        check("align:" + name, s.layout.align);
        for (const auto& m : s.layout.members)
            check("offset:" + name + "." + m.name, m.offset);
    }
    return mismatches;
}

}  // namespace blockcc
