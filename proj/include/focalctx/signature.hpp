#pragma once

#include "focalctx/source_model.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace focalctx {

/// Fully qualified, typed signature of a callable.
struct MethodSignature {
    TypeName return_type;
    std::string declaring_class;
    std::string name;
    std::vector<TypeName> parameter_types;

    bool operator==(const MethodSignature&) const = default;
};

/// "<return> <declaring_class>.<name>(<p1>, <p2>)"
std::string render(const MethodSignature& sig);

/// Inverse of render(). Returns nullopt and sets `error` on malformed input.
std::optional<MethodSignature> parse_signature(std::string_view text, std::string* error = nullptr);

/// TypeName for canonical text as it appears in a rendered signature.
TypeName type_from_text(std::string_view text);

} // namespace focalctx
