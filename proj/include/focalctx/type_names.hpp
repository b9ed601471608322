#pragma once

#include "focalctx/source_model.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace focalctx {

/// Name-lookup environment for turning written type names into canonical ones.
struct TypeScope {
    std::string package_name;
    std::vector<ImportDecl> imports;
    /// Qualified names of every type declared in the compilation unit.
    std::set<std::string> declared_types;
    /// Qualified name of the innermost enclosing class, empty at top level.
    std::string current_class;
    /// Type parameters in scope, innermost last; name -> erasure.
    std::vector<std::map<std::string, std::string>> type_params;
};

/// Qualified name for the first segment of a written type, or nullopt when
/// only the same-package fallback applies. Consults type parameters,
/// declared nested types, single-type imports, java.lang and wildcard imports
/// of well-known JDK packages, in that order.
std::optional<std::string> lookup_type_name(const TypeScope& scope, std::string_view simple);

/// Canonical TypeName for a dotted written name (generics already stripped)
/// with `dims` trailing array dimensions.
TypeName canonical_type(const TypeScope& scope, std::string_view dotted, int dims);

TypeName primitive_type(std::string_view name);
TypeName object_type(std::string qualified);

bool is_java_lang_type(std::string_view simple);

/// Package of a JDK type when `simple` is known to live in `package`.
bool jdk_package_contains(std::string_view package, std::string_view simple);

/// Last dot-separated segment.
std::string_view simple_name_of(std::string_view qualified);

/// Everything before the last dot; empty when there is none.
std::string_view qualifier_of(std::string_view qualified);

} // namespace focalctx
