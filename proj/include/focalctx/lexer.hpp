#pragma once

#include "focalctx/source_model.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace focalctx {

enum class TokenKind {
    Identifier, // keywords included; see is_keyword()
    IntLiteral,
    FloatLiteral,
    CharLiteral,
    StringLiteral, // text blocks included
    Operator,
    EndOfFile,
};

struct Token {
    TokenKind kind = TokenKind::EndOfFile;
    std::string text;
    Position pos;
    std::size_t offset = 0; // byte offset of the first character
    std::size_t end = 0;    // byte offset one past the last character
};

struct LexDiagnostic {
    std::string message;
    Position pos;
    bool fatal = false;
};

struct LexResult {
    std::vector<Token> tokens; // always terminated by EndOfFile
    std::vector<LexDiagnostic> diagnostics;
};

/// Splits Java source into tokens. Comments and whitespace are dropped.
/// Multi-character operators are maximal-munch except '>' which is always
/// emitted alone so nested generics close cleanly; the parser reassembles
/// shift operators from adjacent '>' tokens.
LexResult lex(std::string_view source);

bool is_keyword(std::string_view word);
bool is_primitive_type(std::string_view word);

} // namespace focalctx
