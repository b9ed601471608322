#include "focalctx/signature.hpp"

#include "focalctx/lexer.hpp"

#include <cctype>

namespace focalctx {

namespace {

bool valid_identifier(std::string_view s)
{
    if (s.empty()) {
        return false;
    }
    const auto first = static_cast<unsigned char>(s.front());
    if (!(std::isalpha(first) || first == '_' || first == '$' || first >= 0x80)) {
        return false;
    }
    for (const char ch : s) {
        const auto c = static_cast<unsigned char>(ch);
        if (!(std::isalnum(c) || c == '_' || c == '$' || c >= 0x80)) {
            return false;
        }
    }
    return true;
}

bool valid_dotted(std::string_view s)
{
    std::size_t pos = 0;
    while (true) {
        const std::size_t dot = s.find('.', pos);
        if (!valid_identifier(s.substr(pos, dot == std::string_view::npos ? dot : dot - pos))) {
            return false;
        }
        if (dot == std::string_view::npos) {
            return true;
        }
        pos = dot + 1;
    }
}

bool valid_type(std::string_view s)
{
    while (s.ends_with("[]")) {
        s.remove_suffix(2);
    }
    return valid_dotted(s);
}

std::optional<MethodSignature> fail(std::string* error, std::string message)
{
    if (error != nullptr) {
        *error = std::move(message);
    }
    return std::nullopt;
}

} // namespace

std::string render(const MethodSignature& sig)
{
    std::string out = sig.return_type.text;
    out += ' ';
    out += sig.declaring_class;
    out += '.';
    out += sig.name;
    out += '(';
    for (std::size_t i = 0; i < sig.parameter_types.size(); ++i) {
        if (i > 0) {
            out += ", ";
        }
        out += sig.parameter_types[i].text;
    }
    out += ')';
    return out;
}

TypeName type_from_text(std::string_view text)
{
    return TypeName{std::string(text), text == "void" || is_primitive_type(text)};
}

std::optional<MethodSignature> parse_signature(std::string_view text, std::string* error)
{
    const std::size_t space = text.find(' ');
    if (space == std::string_view::npos) {
        return fail(error, "missing space after return type");
    }
    const std::string_view ret = text.substr(0, space);
    if (!valid_type(ret)) {
        return fail(error, "invalid return type '" + std::string(ret) + "'");
    }
    const std::size_t open = text.find('(', space);
    if (open == std::string_view::npos || text.back() != ')') {
        return fail(error, "missing parameter list");
    }
    const std::string_view qualified = text.substr(space + 1, open - space - 1);
    const std::size_t dot = qualified.rfind('.');
    if (dot == std::string_view::npos) {
        return fail(error, "method name must be qualified by its declaring class");
    }
    MethodSignature sig;
    sig.return_type = type_from_text(ret);
    sig.declaring_class = std::string(qualified.substr(0, dot));
    sig.name = std::string(qualified.substr(dot + 1));
    if (!valid_dotted(sig.declaring_class)) {
        return fail(error, "invalid declaring class '" + sig.declaring_class + "'");
    }
    if (!valid_identifier(sig.name)) {
        return fail(error, "invalid method name '" + sig.name + "'");
    }

    std::string_view params = text.substr(open + 1, text.size() - open - 2);
    if (!params.empty()) {
        std::size_t pos = 0;
        while (true) {
            const std::size_t sep = params.find(", ", pos);
            const std::string_view param =
                params.substr(pos, sep == std::string_view::npos ? std::string_view::npos : sep - pos);
            if (!valid_type(param)) {
                return fail(error, "invalid parameter type '" + std::string(param) + "'");
            }
            sig.parameter_types.push_back(type_from_text(param));
            if (sep == std::string_view::npos) {
                break;
            }
            pos = sep + 2;
        }
    }
    return sig;
}

} // namespace focalctx
