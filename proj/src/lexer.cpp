#include "focalctx/lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace focalctx {

namespace {

constexpr auto kKeywords = std::to_array<std::string_view>({
    "abstract", "assert",     "boolean",   "break",     "byte",       "case",
    "catch",    "char",       "class",     "const",     "continue",   "default",
    "do",       "double",     "else",      "enum",      "extends",    "final",
    "finally",  "float",      "for",       "goto",      "if",         "implements",
    "import",   "instanceof", "int",       "interface", "long",       "native",
    "new",      "package",    "private",   "protected", "public",     "return",
    "short",    "static",     "strictfp",  "super",     "switch",     "synchronized",
    "this",     "throw",      "throws",    "transient", "try",        "void",
    "volatile", "while",      "true",      "false",     "null",
});

constexpr auto kPrimitives = std::to_array<std::string_view>({
    "boolean", "byte", "char", "short", "int", "long", "float", "double",
});

// Longest first so the scan below is maximal munch.
constexpr auto kMultiOps = std::to_array<std::string_view>({
    "<<=", "...", "->", "::", "++", "--", "&&", "||", "==", "!=", "<=",
    "<<",  "+=",  "-=", "*=", "/=", "%=", "&=", "|=", "^=", "@",
});

bool ident_start(unsigned char c)
{
    return std::isalpha(c) || c == '_' || c == '$' || c >= 0x80;
}

bool ident_part(unsigned char c)
{
    return std::isalnum(c) || c == '_' || c == '$' || c >= 0x80;
}

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    LexResult run()
    {
        LexResult out;
        while (true) {
            skip_trivia(out);
            if (fatal_) {
                break;
            }
            if (at_end()) {
                break;
            }
            out.tokens.push_back(next(out));
        }
        Token eof;
        eof.kind = TokenKind::EndOfFile;
        eof.pos = {line_, col_};
        eof.offset = eof.end = pos_;
        out.tokens.push_back(std::move(eof));
        return out;
    }

private:
    bool at_end() const { return pos_ >= src_.size(); }
    char peek(std::size_t ahead = 0) const
    {
        return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
    }

    void advance()
    {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_trivia(LexResult& out)
    {
        while (!at_end()) {
            const char c = peek();
            if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
                advance();
            } else if (c == '/' && peek(1) == '/') {
                while (!at_end() && peek() != '\n') {
                    advance();
                }
            } else if (c == '/' && peek(1) == '*') {
                const Position start{line_, col_};
                advance();
                advance();
                while (!at_end() && !(peek() == '*' && peek(1) == '/')) {
                    advance();
                }
                if (at_end()) {
                    out.diagnostics.push_back({"unterminated block comment", start, true});
                    fatal_ = true;
                    return;
                }
                advance();
                advance();
            } else {
                return;
            }
        }
    }

    Token next(LexResult& out)
    {
        Token tok;
        tok.pos = {line_, col_};
        tok.offset = pos_;
        const auto c = static_cast<unsigned char>(peek());

        if (ident_start(c)) {
            while (!at_end() && ident_part(static_cast<unsigned char>(peek()))) {
                advance();
            }
            tok.kind = TokenKind::Identifier;
        } else if (std::isdigit(c) || (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
            tok.kind = number();
        } else if (c == '"') {
            tok.kind = TokenKind::StringLiteral;
            if (peek(1) == '"' && peek(2) == '"') {
                text_block(out, tok.pos);
            } else {
                quoted('"', out, tok.pos);
            }
        } else if (c == '\'') {
            tok.kind = TokenKind::CharLiteral;
            quoted('\'', out, tok.pos);
        } else {
            tok.kind = TokenKind::Operator;
            std::size_t len = 1;
            for (std::string_view op : kMultiOps) {
                if (src_.substr(pos_, op.size()) == op) {
                    len = op.size();
                    break;
                }
            }
            for (std::size_t i = 0; i < len; ++i) {
                advance();
            }
        }
        tok.end = pos_;
        tok.text = std::string(src_.substr(tok.offset, tok.end - tok.offset));
        return tok;
    }

    TokenKind number()
    {
        bool is_float = false;
        if (peek() == '0' && (peek(1) == 'x' || peek(1) == 'X' || peek(1) == 'b' || peek(1) == 'B')) {
            advance();
            advance();
            while (!at_end() && (std::isxdigit(static_cast<unsigned char>(peek())) || peek() == '_')) {
                advance();
            }
            if (peek() == '.' || peek() == 'p' || peek() == 'P') {
                is_float = true;
                if (peek() == '.') {
                    advance();
                }
                while (!at_end() && (std::isxdigit(static_cast<unsigned char>(peek())) || peek() == '_')) {
                    advance();
                }
                if (peek() == 'p' || peek() == 'P') {
                    advance();
                    if (peek() == '+' || peek() == '-') {
                        advance();
                    }
                    while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) {
                        advance();
                    }
                }
            }
        } else {
            auto digits = [&] {
                while (!at_end() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '_')) {
                    advance();
                }
            };
            digits();
            if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
                is_float = true;
                advance();
                digits();
            } else if (peek() == '.' && !ident_start(static_cast<unsigned char>(peek(1))) && peek(1) != '.') {
                // "1." is a valid double literal
                is_float = true;
                advance();
            }
            if (peek() == 'e' || peek() == 'E') {
                is_float = true;
                advance();
                if (peek() == '+' || peek() == '-') {
                    advance();
                }
                digits();
            }
        }
        const char suffix = peek();
        if (suffix == 'f' || suffix == 'F' || suffix == 'd' || suffix == 'D') {
            is_float = true;
            advance();
        } else if (suffix == 'l' || suffix == 'L') {
            advance();
        }
        return is_float ? TokenKind::FloatLiteral : TokenKind::IntLiteral;
    }

    void quoted(char quote, LexResult& out, Position start)
    {
        advance();
        while (!at_end() && peek() != quote) {
            if (peek() == '\n') {
                out.diagnostics.push_back({"unterminated literal", start, false});
                return;
            }
            if (peek() == '\\' && pos_ + 1 < src_.size()) {
                advance();
            }
            advance();
        }
        if (at_end()) {
            out.diagnostics.push_back({"unterminated literal", start, false});
            return;
        }
        advance();
    }

    void text_block(LexResult& out, Position start)
    {
        advance();
        advance();
        advance();
        while (!at_end() && !(peek() == '"' && peek(1) == '"' && peek(2) == '"')) {
            if (peek() == '\\' && pos_ + 1 < src_.size()) {
                advance();
            }
            advance();
        }
        if (at_end()) {
            out.diagnostics.push_back({"unterminated text block", start, false});
            return;
        }
        advance();
        advance();
        advance();
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
    bool fatal_ = false;
};

} // namespace

LexResult lex(std::string_view source)
{
    return Lexer(source).run();
}

bool is_keyword(std::string_view word)
{
    return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

bool is_primitive_type(std::string_view word)
{
    return std::find(kPrimitives.begin(), kPrimitives.end(), word) != kPrimitives.end();
}

} // namespace focalctx
