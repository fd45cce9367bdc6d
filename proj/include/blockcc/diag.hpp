#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace blockcc {

/// Byte range [begin, end) into the source text a node was parsed from.
struct SourceSpan {
    size_t begin = 0;
    size_t end = 0;

    bool contains(const SourceSpan& inner) const {
        return begin <= inner.begin && inner.end <= end;
    }
};

enum class ErrorKind {
    Syntax,
    UnsupportedFeature,
    UnresolvedLabel,
    UnknownType,
    RecursiveType,
    LayoutMissing,
    DuplicateGlobal,
    NonComposable,
    ImmediateOverflow,
    UndefinedLabel,
    DuplicateLabel,
    Semantic,
    ExhaustedRetries,
    Backend,
    EmptyOutput,
    Extraction,
    OracleUnavailable,
    Harness,
    Config,
    Internal,
};

const char* error_kind_name(ErrorKind kind);

/// Single exception type for all compilation errors; `kind` carries the
/// condition, `span` the offending source range when one is known.
class CompileError : public std::runtime_error {
  public:
    CompileError(ErrorKind kind, std::string message, SourceSpan span = {})
        : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message),
          kind_(kind),
          span_(span),
          detail_(std::move(message)) {}

    ErrorKind kind() const { return kind_; }
    const SourceSpan& span() const { return span_; }
    const std::string& detail() const { return detail_; }

  private:
    ErrorKind kind_;
    SourceSpan span_;
    std::string detail_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message, SourceSpan span = {}) {
    throw CompileError(kind, message, span);
}

}  // namespace blockcc
