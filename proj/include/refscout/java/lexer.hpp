#pragma once

#include <array>
#include <cctype>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "refscout/errors.hpp"
#include "refscout/util.hpp"

namespace refscout::java {

enum class TokenKind { identifier, keyword, number, string_lit, char_lit, punct, end };

struct Token {
    TokenKind kind = TokenKind::end;
    std::string text;
    int line = 0;  // 1-based
    int col = 0;   // 1-based
    std::size_t offset = 0;  // byte offset into the source
    // Set by the parser, consumed by the metric counters.
    bool type_ctx = false;    // token belongs to a type (generics, declared types, casts)
    bool annotation = false;  // token belongs to a skipped annotation use
};

inline const std::unordered_set<std::string>& java_keywords() {
    static const std::unordered_set<std::string> kw = {
        "abstract", "assert",    "boolean",  "break",     "byte",      "case",    "catch",
        "char",     "class",     "const",    "continue",  "default",   "do",      "double",
        "else",     "enum",      "extends",  "final",     "finally",   "float",   "for",
        "goto",     "if",        "implements", "import",  "instanceof", "int",    "interface",
        "long",     "native",    "new",      "package",   "private",   "protected", "public",
        "return",   "short",     "static",   "strictfp",  "super",     "switch",  "synchronized",
        "this",     "throw",     "throws",   "transient", "try",       "void",    "volatile",
        "while",    "true",      "false",    "null",      "var",       "record",  "yield",
        "sealed",   "permits",   "non-sealed"};
    return kw;
}

inline bool is_ident_start(unsigned char c) {
    return std::isalpha(c) || c == '_' || c == '$' || c >= 0x80;
}

inline bool is_ident_part(unsigned char c) { return is_ident_start(c) || std::isdigit(c); }

/// Tokenizes Java source. Comments are dropped; strings and chars become
/// single tokens, so braces inside literals never reach the parser.
class Lexer {
public:
    explicit Lexer(std::string_view source) : src_(source) {}

    std::vector<Token> run() {
        std::vector<Token> tokens;
        while (true) {
            skip_space_and_comments();
            if (pos_ >= src_.size()) break;
            tokens.push_back(next_token());
        }
        Token eof;
        eof.kind = TokenKind::end;
        eof.line = line_;
        eof.col = col_;
        tokens.push_back(eof);
        return tokens;
    }

private:
    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;

    char peek(std::size_t off = 0) const {
        return pos_ + off < src_.size() ? src_[pos_ + off] : '\0';
    }

    void advance() {
        if (pos_ < src_.size()) {
            if (src_[pos_] == '\n') {
                ++line_;
                col_ = 1;
            } else {
                ++col_;
            }
            ++pos_;
        }
    }

    void skip_space_and_comments() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f') {
                advance();
            } else if (c == '/' && peek(1) == '/') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else if (c == '/' && peek(1) == '*') {
                int start_line = line_, start_col = col_;
                advance();
                advance();
                while (pos_ < src_.size() && !(src_[pos_] == '*' && peek(1) == '/')) advance();
                if (pos_ >= src_.size())
                    throw SyntaxError("unterminated block comment", start_line, start_col);
                advance();
                advance();
            } else {
                break;
            }
        }
    }

    Token make(TokenKind kind, std::size_t start, int line, int col) {
        Token t;
        t.kind = kind;
        t.text = std::string(src_.substr(start, pos_ - start));
        t.line = line;
        t.col = col;
        t.offset = start;
        return t;
    }

    Token next_token() {
        const int line = line_, col = col_;
        const std::size_t start = pos_;
        unsigned char c = static_cast<unsigned char>(src_[pos_]);

        if (is_ident_start(c)) {
            while (pos_ < src_.size() && is_ident_part(static_cast<unsigned char>(src_[pos_])))
                advance();
            Token t = make(TokenKind::identifier, start, line, col);
            if (java_keywords().count(t.text)) t.kind = TokenKind::keyword;
            return t;
        }

        if (std::isdigit(c) || (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
            bool prev_exp = false;
            while (pos_ < src_.size()) {
                char d = src_[pos_];
                if (std::isalnum(static_cast<unsigned char>(d)) || d == '_' || d == '.') {
                    prev_exp = (d == 'e' || d == 'E' || d == 'p' || d == 'P');
                    advance();
                } else if ((d == '+' || d == '-') && prev_exp) {
                    prev_exp = false;
                    advance();
                } else {
                    break;
                }
            }
            return make(TokenKind::number, start, line, col);
        }

        if (c == '"') {
            if (peek(1) == '"' && peek(2) == '"') {  // text block
                advance();
                advance();
                advance();
                while (pos_ < src_.size() &&
                       !(src_[pos_] == '"' && peek(1) == '"' && peek(2) == '"')) {
                    if (src_[pos_] == '\\') advance();
                    advance();
                }
                if (pos_ >= src_.size()) throw SyntaxError("unterminated text block", line, col);
                advance();
                advance();
                advance();
                return make(TokenKind::string_lit, start, line, col);
            }
            advance();
            while (pos_ < src_.size() && src_[pos_] != '"') {
                if (src_[pos_] == '\n') throw SyntaxError("unterminated string literal", line, col);
                if (src_[pos_] == '\\') advance();
                advance();
            }
            if (pos_ >= src_.size()) throw SyntaxError("unterminated string literal", line, col);
            advance();
            return make(TokenKind::string_lit, start, line, col);
        }

        if (c == '\'') {
            advance();
            while (pos_ < src_.size() && src_[pos_] != '\'') {
                if (src_[pos_] == '\n') throw SyntaxError("unterminated char literal", line, col);
                if (src_[pos_] == '\\') advance();
                advance();
            }
            if (pos_ >= src_.size()) throw SyntaxError("unterminated char literal", line, col);
            advance();
            return make(TokenKind::char_lit, start, line, col);
        }

        // Operators and punctuation, longest match first.
        static const std::array<std::string_view, 37> ops = {
            ">>>=", "<<=", ">>=", ">>>", "...", "->", "::", "++", "--", "&&", "||", "==",
            "!=",   "<=",  ">=",  "+=",  "-=",  "*=", "/=", "%=", "&=", "|=", "^=", "<<",
            ">>",   "(",   ")",   "{",   "}",   "[",  "]",  ";",  ",",  ".",  "@",  "?",
            ":"};
        for (std::string_view op : ops) {
            if (src_.substr(pos_).substr(0, op.size()) == op) {
                for (std::size_t i = 0; i < op.size(); ++i) advance();
                return make(TokenKind::punct, start, line, col);
            }
        }
        static constexpr std::string_view singles = "=+-*/%<>!&|^~";
        if (singles.find(static_cast<char>(c)) != std::string_view::npos) {
            advance();
            return make(TokenKind::punct, start, line, col);
        }
        throw SyntaxError(std::string("unexpected character '") + static_cast<char>(c) + "'", line,
                          col);
    }
};

inline std::vector<Token> lex(std::string_view source) { return Lexer(source).run(); }

}  // namespace refscout::java
