#pragma once

#include "focalctx/resolver.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace focalctx {

/// Identifies one focal method. `class_name` may be qualified or a simple
/// name; `unit_path` (relative to the project root) and `arity` narrow the
/// match when present.
struct FocalMethodRef {
    std::string unit_path;
    std::string class_name;
    std::string method_name;
    std::optional<std::size_t> arity;

    bool operator==(const FocalMethodRef&) const = default;
};

/// "Class.method/arity", or "Class.method" without an arity.
std::string to_string(const FocalMethodRef& ref);

/// True when `wanted` equals `qualified` or is a dot-aligned suffix of it.
bool class_name_matches(std::string_view qualified, std::string_view wanted);

struct ResolutionStats {
    std::size_t resolved = 0;
    std::size_t ambiguous = 0;
    std::size_t unresolved = 0;

    std::size_t total() const { return resolved + ambiguous + unresolved; }
    bool operator==(const ResolutionStats&) const = default;
};

struct FocalContext {
    std::string focal_source;
    std::string declaring_class;
    /// Rendered signatures and "UNRESOLVED name/arity" markers; deduplicated, sorted.
    std::vector<std::string> invoked_signatures;
    /// "name : type" facts; deduplicated, sorted.
    std::vector<std::string> field_facts;
    ResolutionStats resolution_stats;

    bool operator==(const FocalContext&) const = default;
};

struct LocatedMethod {
    const CompilationUnitModel* unit = nullptr;
    const ClassModel* cls = nullptr;
    const MethodModel* method = nullptr;
};

/// Throws LookupError when nothing matches and AmbiguityError (listing the
/// candidates) when more than one method does.
LocatedMethod locate_method(const ProjectIndex& index, const FocalMethodRef& ref);

FocalContext extract_context(const ProjectIndex& index, const FocalMethodRef& ref);
FocalContext extract_context(const ProjectIndex& index, const LocatedMethod& located);

/// The context section of the prompt, from FOCAL-METHOD-BEGIN through the
/// field facts; every line is newline-terminated.
std::string render_context(const FocalContext& ctx);

} // namespace focalctx
