#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace focalctx {

/// Canonical type carrier. Generics are erased, simple names are qualified
/// ("List<String>" -> "java.util.List"), varargs become arrays.
struct TypeName {
    std::string text;
    bool is_primitive = false;

    bool empty() const noexcept { return text.empty(); }
    bool operator==(const TypeName&) const = default;
};

/// 1-based line and column.
struct Position {
    int line = 0;
    int column = 0;

    bool operator==(const Position&) const = default;
    auto operator<=>(const Position&) const = default;
};

/// Inclusive line range.
struct SourceSpan {
    int start_line = 0;
    int end_line = 0;

    bool operator==(const SourceSpan&) const = default;
};

enum class Modifier : std::uint32_t {
    Public = 1u << 0,
    Protected = 1u << 1,
    Private = 1u << 2,
    Static = 1u << 3,
    Final = 1u << 4,
    Abstract = 1u << 5,
    Native = 1u << 6,
    Synchronized = 1u << 7,
    Transient = 1u << 8,
    Volatile = 1u << 9,
    Strictfp = 1u << 10,
    Default = 1u << 11,
    Sealed = 1u << 12,
    NonSealed = 1u << 13,
};

/// Modifier flags plus the simple names of annotations attached to a declaration.
struct Modifiers {
    std::uint32_t flags = 0;
    std::vector<std::string> annotations;

    bool has(Modifier m) const noexcept { return (flags & static_cast<std::uint32_t>(m)) != 0; }
    void set(Modifier m) noexcept { flags |= static_cast<std::uint32_t>(m); }
    bool has_annotation(std::string_view name) const;

    bool operator==(const Modifiers&) const = default;
};

/// How the receiver of a call was written, as far as the parser can tell
/// without a project index.
enum class ReceiverKind {
    None,          // f(x)
    This,          // this.f(x)
    Super,         // super.f(x)
    Local,         // p.f(x) where p is a parameter or local in scope
    Name,          // n.f(x) where n is not a local: a field or a type name
    QualifiedName, // a.b.f(x), a dotted chain of plain names
    Typed,         // receiver type known syntactically: literal, new, cast
    Expression,    // anything else
};

/// Static knowledge about one call argument.
struct ArgumentInfo {
    std::optional<TypeName> type;
    /// Set when the argument is a bare name not bound to a local; it may be a field.
    std::string bare_name;
    /// Set when the argument is a call: its index in the method's invocation list.
    std::optional<std::size_t> call;

    bool operator==(const ArgumentInfo&) const = default;
};

struct CallSite {
    std::string callee_name;
    std::optional<std::string> receiver_expr;
    ReceiverKind receiver_kind = ReceiverKind::None;
    /// Receiver type when derivable at parse time (locals, literals, `new`).
    std::optional<TypeName> receiver_type;
    std::size_t argument_count = 0;
    std::vector<ArgumentInfo> arguments;
    /// When the receiver is itself a call (a.f().g()), the index of that call
    /// within the same method's invocation list.
    std::optional<std::size_t> receiver_call;
    /// Position of the callee identifier token.
    Position span;

    bool operator==(const CallSite&) const = default;
};

struct FieldAccessSite {
    std::string field_name;
    std::optional<std::string> receiver_expr;
    Position span;
    /// A bare name that is bound to a local variable or parameter at this point.
    bool shadowed_by_local = false;

    bool operator==(const FieldAccessSite&) const = default;
};

struct Parameter {
    std::string name;
    TypeName type;

    bool operator==(const Parameter&) const = default;
};

struct MethodModel {
    std::string name;
    TypeName return_type;
    std::vector<Parameter> parameters;
    Modifiers modifiers;
    std::optional<std::string> body_source;
    std::vector<CallSite> invocations;
    std::vector<FieldAccessSite> field_accesses;
    SourceSpan source_span;
    bool is_constructor = false;
    /// Statement-level errors were recovered inside the body; call lists may be incomplete.
    bool partial = false;

    std::size_t arity() const noexcept { return parameters.size(); }
    bool operator==(const MethodModel&) const = default;
};

struct FieldModel {
    std::string name;
    TypeName declared_type;
    Modifiers modifiers;
    Position location;

    bool operator==(const FieldModel&) const = default;
};

enum class ClassKind { Class, Interface, Enum };

struct ClassModel {
    std::string simple_name;
    std::string qualified_name;
    ClassKind kind = ClassKind::Class;
    Modifiers modifiers;
    std::optional<TypeName> superclass;
    std::vector<TypeName> interfaces;
    std::vector<FieldModel> fields;
    std::vector<MethodModel> methods;
    std::vector<ClassModel> nested;
    SourceSpan source_span;

    bool operator==(const ClassModel&) const = default;
};

struct ImportDecl {
    /// Dotted name without the trailing ".*".
    std::string name;
    bool is_static = false;
    bool is_wildcard = false;

    bool operator==(const ImportDecl&) const = default;
};

struct CompilationUnitModel {
    std::string path;
    std::string package_name;
    std::vector<ImportDecl> imports;
    std::vector<ClassModel> types;
    std::string raw_source;

    bool operator==(const CompilationUnitModel&) const = default;
};

/// Number of lines in `text`; a trailing newline does not open a new line.
int line_count(std::string_view text);

/// Exact text of lines [span.start_line, span.end_line]; throws RangeError.
std::string span_text(const CompilationUnitModel& unit, SourceSpan span);

/// Removes the longest whitespace prefix shared by all non-blank lines.
std::string strip_common_indent(std::string_view text);

std::string_view to_string(ClassKind kind);

/// Visits every class of the unit, nested ones included, in declaration order.
void for_each_class(const CompilationUnitModel& unit,
                    const std::function<void(const ClassModel&)>& visit);

} // namespace focalctx
