#pragma once

#include "focalctx/signature.hpp"
#include "focalctx/source_model.hpp"
#include "focalctx/type_names.hpp"

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace focalctx {

/// (declaring class, method name, arity)
using BuiltinKey = std::tuple<std::string, std::string, std::size_t>;
using BuiltinTable = std::map<BuiltinKey, std::vector<MethodSignature>>;

/// Parses the line-oriented signature table. Throws LoadError with the
/// 1-based line number of the first malformed line.
BuiltinTable parse_builtin_table(std::string_view text);
BuiltinTable load_builtin_table(const std::filesystem::path& path);

/// The table shipped with the toolkit.
std::filesystem::path default_builtin_table_path();

struct ClassEntry {
    const ClassModel* cls = nullptr;
    const CompilationUnitModel* unit = nullptr;
    /// Qualified name of the lexically enclosing class, empty for top-level types.
    std::string outer;
};

/// Project-wide symbol index. Owns the parsed units; immutable once built.
class ProjectIndex {
public:
    ProjectIndex() = default;

    const std::vector<CompilationUnitModel>& units() const { return *units_; }
    const ClassEntry* find_class(std::string_view qualified) const;
    std::vector<const ClassEntry*> find_simple(std::string_view simple) const;
    const std::vector<MethodSignature>* builtins(const std::string& cls, const std::string& name,
                                                 std::size_t arity) const;
    /// True when the builtin table mentions `cls` at all.
    bool builtin_class_known(std::string_view cls) const;

    std::size_t class_count() const { return by_qualified_.size(); }
    std::size_t builtin_count() const;
    const std::map<std::string, ClassEntry>& classes() const { return by_qualified_; }

    /// Type-name lookup environment for code inside `enclosing`.
    TypeScope scope_for(const CompilationUnitModel& unit, const ClassModel& enclosing) const;

private:
    friend ProjectIndex build_index(std::vector<CompilationUnitModel> units, BuiltinTable builtins);

    std::shared_ptr<const std::vector<CompilationUnitModel>> units_ =
        std::make_shared<const std::vector<CompilationUnitModel>>();
    std::map<std::string, ClassEntry> by_qualified_;
    std::multimap<std::string, std::string> by_simple_;
    BuiltinTable builtins_;
    std::map<std::string, std::size_t, std::less<>> builtin_classes_;
};

ProjectIndex build_index(std::vector<CompilationUnitModel> units, BuiltinTable builtins);
ProjectIndex build_index(std::vector<CompilationUnitModel> units, const std::filesystem::path& builtin_table);

enum class ResolutionOutcome { Resolved, Ambiguous, Unresolved };

struct Resolution {
    ResolutionOutcome outcome = ResolutionOutcome::Unresolved;
    std::optional<MethodSignature> signature;
    std::vector<MethodSignature> candidates;

    bool operator==(const Resolution&) const = default;
};

std::string_view to_string(ResolutionOutcome outcome);

/// Resolves one call site of a method declared in `enclosing`. Lookup order:
/// the enclosing class and its ancestors (then lexically enclosing classes),
/// static imports, the receiver's type, and finally the builtin table.
/// Candidates are matched by arity; when several remain and every argument
/// type is known, the argument types pick the most specific overload.
/// `earlier` holds the resolutions of the preceding call sites of the same
/// method, which lets a chained call use its receiver call's return type.
Resolution resolve_call(const ProjectIndex& index, const CompilationUnitModel& unit,
                        const ClassModel& enclosing, const CallSite& site,
                        const std::vector<Resolution>* earlier = nullptr);

/// Resolves every call site of `method`, one result per invocation. Receiver
/// and argument calls are resolved first so their return types are known.
std::vector<Resolution> resolve_calls(const ProjectIndex& index, const CompilationUnitModel& unit,
                                      const ClassModel& enclosing, const MethodModel& method);

enum class FieldOutcome { Resolved, Local, Unresolved };

struct FieldFact {
    std::string name;
    std::string declaring_class;
    TypeName type;

    bool operator==(const FieldFact&) const = default;
};

struct FieldResolution {
    FieldOutcome outcome = FieldOutcome::Unresolved;
    std::optional<FieldFact> fact;
};

/// Field facts come from unqualified and `this.`-qualified accesses; they are
/// looked up in the enclosing class, its ancestors, then enclosing classes.
FieldResolution resolve_field(const ProjectIndex& index, const ClassModel& enclosing, const FieldAccessSite& site);

/// Signature of a method declared in the project.
MethodSignature signature_of(const ClassModel& cls, const MethodModel& method);

} // namespace focalctx
