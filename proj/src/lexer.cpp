#include "blockcc/lexer.hpp"

#include <array>
#include <cctype>
#include <cstdlib>
#include <unordered_set>

namespace blockcc {

namespace {

const std::unordered_set<std::string>& keyword_set() {
    static const std::unordered_set<std::string> kws = {
        "void", "char", "short", "int", "long", "float", "double",
        "signed", "unsigned", "const", "struct", "union",
        "if", "else", "while", "for", "do", "switch", "case", "default",
        "break", "continue", "return", "goto",
        "int8_t", "int16_t", "int32_t", "int64_t",
        "uint8_t", "uint16_t", "uint32_t", "uint64_t", "size_t",
        // Recognized so we can reject them with a clear diagnostic.
        "sizeof", "static", "extern", "typedef", "enum", "volatile",
        "register", "auto", "inline",
    };
    return kws;
}

// Longest-match punctuator table, longest first.
const std::array<const char*, 46>& puncts() {
    static const std::array<const char*, 46> ps = {
        "<<=", ">>=", "...",
        "==", "!=", "<=", ">=", "&&", "||", "<<", ">>",
        "+=", "-=", "*=", "/=", "%=", "&=", "^=", "|=",
        "++", "--", "->",
        "+", "-", "*", "/", "%", "<", ">", "=", "!", "&", "|", "^", "~",
        "(", ")", "{", "}", "[", "]", ";", ",", ".", "?", ":",
    };
    return ps;
}

int escape_value(char c, size_t pos) {
    switch (c) {
        case 'n': return '\n';
        case 't': return '\t';
        case 'r': return '\r';
        case '0': return '\0';
        case '\\': return '\\';
        case '\'': return '\'';
        case '"': return '"';
        default:
            fail(ErrorKind::Syntax, std::string("unknown escape \\") + c,
                 SourceSpan{pos, pos + 2});
    }
}

}  // namespace

bool is_keyword(const std::string& word) { return keyword_set().count(word) > 0; }

std::vector<Token> lex(const std::string& text) {
    std::vector<Token> out;
    size_t i = 0;
    const size_t n = text.size();

    while (i < n) {
        char c = text[i];
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f') {
            ++i;
            continue;
        }
        if (c == '/' && i + 1 < n && text[i + 1] == '/') {
            while (i < n && text[i] != '\n') ++i;
            continue;
        }
        if (c == '/' && i + 1 < n && text[i + 1] == '*') {
            size_t start = i;
            i += 2;
            while (i + 1 < n && !(text[i] == '*' && text[i + 1] == '/')) ++i;
            if (i + 1 >= n)
                fail(ErrorKind::Syntax, "unterminated comment", SourceSpan{start, n});
            i += 2;
            continue;
        }
        if (c == '#') {
            size_t start = i;
            while (i < n && text[i] != '\n') ++i;
            fail(ErrorKind::UnsupportedFeature,
                 "preprocessor directive (inputs must be preprocessed)",
                 SourceSpan{start, i});
        }
        if (c == '"') {
            fail(ErrorKind::UnsupportedFeature, "string literal",
                 SourceSpan{i, i + 1});
        }

        Token tok;
        tok.span.begin = i;

        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t start = i;
            while (i < n && (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_'))
                ++i;
            tok.text = text.substr(start, i - start);
            tok.kind = is_keyword(tok.text) ? TokenKind::Keyword : TokenKind::Ident;
            tok.span.end = i;
            out.push_back(std::move(tok));
            continue;
        }

        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && i + 1 < n && std::isdigit(static_cast<unsigned char>(text[i + 1])))) {
            size_t start = i;
            bool hex = c == '0' && i + 1 < n && (text[i + 1] == 'x' || text[i + 1] == 'X');
            bool is_float = false;
            if (hex) {
                i += 2;
                while (i < n && std::isxdigit(static_cast<unsigned char>(text[i]))) ++i;
            } else {
                while (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
                if (i < n && text[i] == '.') {
                    is_float = true;
                    ++i;
                    while (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
                }
                if (i < n && (text[i] == 'e' || text[i] == 'E')) {
                    is_float = true;
                    ++i;
                    if (i < n && (text[i] == '+' || text[i] == '-')) ++i;
                    while (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
                }
            }
            std::string body = text.substr(start, i - start);
            if (is_float) {
                tok.kind = TokenKind::FloatLit;
                tok.float_value = std::strtod(body.c_str(), nullptr);
                if (i < n && (text[i] == 'f' || text[i] == 'F')) {
                    tok.is_float32 = true;
                    ++i;
                }
            } else {
                tok.kind = TokenKind::IntLit;
                tok.is_hex = hex;
                tok.int_value = std::strtoull(body.c_str(), nullptr, hex ? 16 : 10);
                for (int pass = 0; pass < 2; ++pass) {
                    if (i < n && (text[i] == 'u' || text[i] == 'U') && !tok.is_unsigned) {
                        tok.is_unsigned = true;
                        ++i;
                    } else if (i < n && (text[i] == 'l' || text[i] == 'L') && !tok.is_long) {
                        tok.is_long = true;
                        ++i;
                        if (i < n && (text[i] == 'l' || text[i] == 'L')) ++i;
                    }
                }
            }
            if (i < n && (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_'))
                fail(ErrorKind::Syntax, "bad numeric literal suffix",
                     SourceSpan{start, i + 1});
            tok.span.end = i;
            out.push_back(std::move(tok));
            continue;
        }

        if (c == '\'') {
            size_t start = i;
            ++i;
            if (i >= n) fail(ErrorKind::Syntax, "unterminated char literal", SourceSpan{start, n});
            int value;
            if (text[i] == '\\') {
                if (i + 1 >= n)
                    fail(ErrorKind::Syntax, "unterminated char literal", SourceSpan{start, n});
                value = escape_value(text[i + 1], i);
                i += 2;
            } else {
                value = static_cast<unsigned char>(text[i]);
                ++i;
            }
            if (i >= n || text[i] != '\'')
                fail(ErrorKind::Syntax, "unterminated char literal", SourceSpan{start, i});
            ++i;
            tok.kind = TokenKind::IntLit;
            tok.int_value = static_cast<uint64_t>(static_cast<int64_t>(value));
            tok.span.end = i;
            out.push_back(std::move(tok));
            continue;
        }

        bool matched = false;
        for (const char* p : puncts()) {
            size_t len = std::char_traits<char>::length(p);
            if (text.compare(i, len, p) == 0) {
                tok.kind = TokenKind::Punct;
                tok.text = p;
                i += len;
                tok.span.end = i;
                out.push_back(std::move(tok));
                matched = true;
                break;
            }
        }
        if (matched) continue;

        fail(ErrorKind::Syntax, std::string("unexpected character '") + c + "'",
             SourceSpan{i, i + 1});
    }

    Token eof;
    eof.kind = TokenKind::End;
    eof.span = SourceSpan{n, n};
    out.push_back(std::move(eof));
    return out;
}

}  // namespace blockcc
