#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "blockcc/ast.hpp"

namespace blockcc {

struct TypeLayout {
    std::string type_name;
    uint64_t size = 0;
    uint64_t align = 1;

    struct MemberLayout {
        std::string name;
        uint64_t offset = 0;
        std::shared_ptr<TypeLayout> layout;
    };
    std::vector<MemberLayout> members;  // records only

    std::shared_ptr<TypeLayout> element;  // arrays only
    uint64_t count = 0;
};

// System V AMD64 sizes/alignments. Throws UnknownType / RecursiveType.
TypeLayout compute_layout(const TypePtr& t);

struct Mismatch {
    std::string key;  // "size:struct s", "align:struct s", "offset:struct s.x"
    uint64_t computed = 0;
    uint64_t oracle = 0;
};

struct LayoutSubject {
    std::string decls;  // record definitions required to name the type in C
    TypePtr type;
    TypeLayout layout;
};

// Produces size/align/offset facts for a generated probe program.
class LayoutOracle {
  public:
    virtual ~LayoutOracle() = default;
    // Throws CompileError(OracleUnavailable) when the tool cannot run.
    virtual std::map<std::string, uint64_t> facts(const std::string& probe_source) = 0;
};

// Compiles the probe with the system C compiler and runs it.
class SystemCompilerOracle : public LayoutOracle {
  public:
    explicit SystemCompilerOracle(std::string cc = "cc") : cc_(std::move(cc)) {}
    std::map<std::string, uint64_t> facts(const std::string& probe_source) override;

  private:
    std::string cc_;
};

std::string build_layout_probe(const std::vector<LayoutSubject>& subjects);

std::vector<Mismatch> verify_layout_against_oracle(
    const std::vector<LayoutSubject>& subjects, LayoutOracle& oracle);

}  // namespace blockcc
