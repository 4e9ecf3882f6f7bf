#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "codesim/ast.hpp"

namespace codesim {

enum class TokenKind { Keyword, Identifier, IntLiteral, StringLiteral, BoolLiteral, Operator, Punctuation };

std::string token_kind_name(TokenKind kind);

struct SourceToken {
    TokenKind kind = TokenKind::Punctuation;
    std::string lexeme;
    SourcePos pos;

    friend bool operator==(const SourceToken& a, const SourceToken& b) {
        return a.kind == b.kind && a.lexeme == b.lexeme;
    }
};

/// Splits MiniJ text into tokens. Comments and whitespace produce no tokens.
/// Throws LexError on an unterminated string or block comment, or on an
/// illegal character.
std::vector<SourceToken> lex(std::string_view text);

/// A lossless slice of the input: every byte belongs to exactly one piece.
struct TextPiece {
    enum class Kind { Token, LineComment, BlockComment, Space };
    Kind kind;
    std::string text;
};

std::vector<TextPiece> lex_pieces(std::string_view text);

bool is_keyword(std::string_view word);

/// Parses a token stream into an AST and resolves every name.
Ast parse(const std::vector<SourceToken>& tokens);

/// Name resolution only; parse() already calls this.
void resolve(const Ast& ast);

struct SourceUnit {
    Ast ast;
    std::vector<SourceToken> tokens;
    std::string origin;
    std::string text;  // source as read, comments included
};

SourceUnit parse_source(std::string_view text, std::string origin = "<memory>");

/// Reads, lexes and parses a file. Throws IoError when unreadable.
SourceUnit load(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);

/// Canonical source rendering: four-space indent, one statement per line, no
/// comments. Lexing the output yields the same tokens the AST was parsed from.
std::string print_program(const Ast& ast);
std::string print_expr(const Expr& expr);

/// Indented tree rendering used by golden parse tests.
std::string dump_ast(const Ast& ast);

}  // namespace codesim
