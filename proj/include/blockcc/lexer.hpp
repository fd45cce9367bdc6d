#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "blockcc/diag.hpp"

namespace blockcc {

enum class TokenKind {
    End,
    Ident,
    Keyword,
    IntLit,
    FloatLit,
    Punct,
};

struct Token {
    TokenKind kind = TokenKind::End;
    std::string text;          // identifier, keyword, or punctuator spelling
    uint64_t int_value = 0;    // IntLit payload
    double float_value = 0.0;  // FloatLit payload
    bool is_hex = false;       // IntLit spelled in hex
    bool is_unsigned = false;  // U suffix
    bool is_long = false;      // L suffix (IntLit) / absence of f suffix irrelevant
    bool is_float32 = false;   // f suffix on FloatLit
    SourceSpan span;
};

// Tokenizes the whole input. Throws CompileError(Syntax) on bad characters,
// CompileError(UnsupportedFeature) on string literals and preprocessor lines.
std::vector<Token> lex(const std::string& text);

bool is_keyword(const std::string& word);

}  // namespace blockcc
