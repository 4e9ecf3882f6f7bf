#include <array>
#include <cctype>

#include "codesim/frontend.hpp"

namespace codesim {

namespace {

constexpr std::array<std::string_view, 16> kKeywords = {
    "fn", "int", "bool", "str", "if", "else", "while", "do",
    "for", "switch", "case", "default", "return", "new", "print", "read",
};

constexpr std::array<std::string_view, 11> kTwoCharOps = {
    "&&", "||", "==", "!=", "<=", ">=", "+=", "-=", "*=", "/=", "%=",
};

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

struct RawPiece {
    TextPiece::Kind kind;
    TokenKind token_kind;
    std::string_view text;
    SourcePos pos;
};

class Scanner {
public:
    explicit Scanner(std::string_view text) : text_(text) {}

    std::vector<RawPiece> run() {
        std::vector<RawPiece> out;
        while (at_ < text_.size()) out.push_back(next());
        return out;
    }

private:
    RawPiece next() {
        const SourcePos start{line_, column_};
        const std::size_t begin = at_;
        const char c = text_[at_];
        auto piece = [&](TextPiece::Kind kind, TokenKind tk = TokenKind::Punctuation) {
            return RawPiece{kind, tk, text_.substr(begin, at_ - begin), start};
        };

        if (is_space(c)) {
            while (at_ < text_.size() && is_space(text_[at_])) advance();
            return piece(TextPiece::Kind::Space);
        }
        if (c == '/' && peek(1) == '/') {
            while (at_ < text_.size() && text_[at_] != '\n') advance();
            return piece(TextPiece::Kind::LineComment);
        }
        if (c == '/' && peek(1) == '*') {
            advance();
            advance();
            while (true) {
                if (at_ >= text_.size()) throw LexError(start, "unterminated block comment");
                if (text_[at_] == '*' && peek(1) == '/') {
                    advance();
                    advance();
                    break;
                }
                advance();
            }
            return piece(TextPiece::Kind::BlockComment);
        }
        if (c == '"') {
            advance();
            while (true) {
                if (at_ >= text_.size() || text_[at_] == '\n') throw LexError(start, "unterminated string literal");
                if (text_[at_] == '\\' && at_ + 1 < text_.size() && text_[at_ + 1] != '\n') {
                    advance();
                    advance();
                    continue;
                }
                if (text_[at_] == '"') {
                    advance();
                    break;
                }
                advance();
            }
            return piece(TextPiece::Kind::Token, TokenKind::StringLiteral);
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            while (at_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[at_]))) advance();
            if (at_ < text_.size() && is_ident_start(text_[at_]))
                throw LexError({line_, column_}, "malformed integer literal");
            return piece(TextPiece::Kind::Token, TokenKind::IntLiteral);
        }
        if (is_ident_start(c)) {
            while (at_ < text_.size() && is_ident_char(text_[at_])) advance();
            auto word = text_.substr(begin, at_ - begin);
            TokenKind kind = TokenKind::Identifier;
            if (word == "true" || word == "false")
                kind = TokenKind::BoolLiteral;
            else if (is_keyword(word))
                kind = TokenKind::Keyword;
            return piece(TextPiece::Kind::Token, kind);
        }
        if (at_ + 1 < text_.size()) {
            auto two = text_.substr(at_, 2);
            for (auto op : kTwoCharOps) {
                if (two == op) {
                    advance();
                    advance();
                    return piece(TextPiece::Kind::Token, TokenKind::Operator);
                }
            }
        }
        switch (c) {
            case '+': case '-': case '*': case '/': case '%':
            case '<': case '>': case '=': case '!':
                advance();
                return piece(TextPiece::Kind::Token, TokenKind::Operator);
            case '(': case ')': case '{': case '}': case '[': case ']':
            case ';': case ',': case ':':
                advance();
                return piece(TextPiece::Kind::Token, TokenKind::Punctuation);
            default:
                throw LexError(start, "illegal character");
        }
    }

    char peek(std::size_t offset) const {
        return at_ + offset < text_.size() ? text_[at_ + offset] : '\0';
    }

    void advance() {
        if (text_[at_] == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++at_;
    }

    std::string_view text_;
    std::size_t at_ = 0;
    int line_ = 1;
    int column_ = 1;
};

}  // namespace

std::string token_kind_name(TokenKind kind) {
    switch (kind) {
        case TokenKind::Keyword: return "keyword";
        case TokenKind::Identifier: return "identifier";
        case TokenKind::IntLiteral: return "int-literal";
        case TokenKind::StringLiteral: return "string-literal";
        case TokenKind::BoolLiteral: return "bool-literal";
        case TokenKind::Operator: return "operator";
        case TokenKind::Punctuation: return "punctuation";
    }
    return "?";
}

bool is_keyword(std::string_view word) {
    for (auto k : kKeywords)
        if (k == word) return true;
    return false;
}

std::vector<SourceToken> lex(std::string_view text) {
    std::vector<SourceToken> tokens;
    for (const auto& p : Scanner(text).run()) {
        if (p.kind != TextPiece::Kind::Token) continue;
        tokens.push_back(SourceToken{p.token_kind, std::string(p.text), p.pos});
    }
    return tokens;
}

std::vector<TextPiece> lex_pieces(std::string_view text) {
    std::vector<TextPiece> pieces;
    for (const auto& p : Scanner(text).run()) pieces.push_back(TextPiece{p.kind, std::string(p.text)});
    return pieces;
}

}  // namespace codesim
