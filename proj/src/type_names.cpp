#include "focalctx/type_names.hpp"

#include "focalctx/lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace focalctx {

namespace {

constexpr auto kJavaLang = std::to_array<std::string_view>({
    "AssertionError", "AutoCloseable", "Appendable", "ArithmeticException", "ArrayIndexOutOfBoundsException",
    "Boolean", "Byte", "Character", "CharSequence", "Class", "ClassCastException",
    "Cloneable", "Comparable", "Deprecated", "Double", "Enum", "Error", "Exception",
    "Float", "IllegalArgumentException", "IllegalStateException",
    "IndexOutOfBoundsException", "Integer", "Iterable", "Long", "Math",
    "NullPointerException", "Number", "NumberFormatException", "Object", "Override",
    "Runnable", "RuntimeException", "Short", "StrictMath", "String", "StringBuilder",
    "StringBuffer", "SuppressWarnings", "System", "Thread", "Throwable",
    "UnsupportedOperationException", "Void",
});

struct JdkType {
    std::string_view package;
    std::string_view simple;
};

constexpr auto kJdkTypes = std::to_array<JdkType>({
    {"java.util", "ArrayDeque"},       {"java.util", "ArrayList"},
    {"java.util", "Arrays"},           {"java.util", "Collection"},
    {"java.util", "Collections"},      {"java.util", "Comparator"},
    {"java.util", "Deque"},            {"java.util", "EnumMap"},
    {"java.util", "EnumSet"},          {"java.util", "HashMap"},
    {"java.util", "HashSet"},          {"java.util", "Iterator"},
    {"java.util", "LinkedHashMap"},    {"java.util", "LinkedHashSet"},
    {"java.util", "LinkedList"},       {"java.util", "List"},
    {"java.util", "Map"},              {"java.util", "NavigableMap"},
    {"java.util", "NoSuchElementException"},
    {"java.util", "Objects"},          {"java.util", "Optional"},
    {"java.util", "PriorityQueue"},    {"java.util", "Queue"},
    {"java.util", "Random"},           {"java.util", "Set"},
    {"java.util", "SortedMap"},        {"java.util", "SortedSet"},
    {"java.util", "TreeMap"},          {"java.util", "TreeSet"},
    {"java.util", "UUID"},             {"java.io", "File"},
    {"java.io", "IOException"},        {"java.io", "InputStream"},
    {"java.io", "OutputStream"},       {"java.io", "PrintStream"},
    {"java.io", "Reader"},             {"java.io", "Serializable"},
    {"java.io", "Writer"},             {"java.math", "BigDecimal"},
    {"java.math", "BigInteger"},       {"java.math", "RoundingMode"},
    {"java.util.function", "BiFunction"},
    {"java.util.function", "Consumer"},
    {"java.util.function", "Function"},
    {"java.util.function", "Predicate"},
    {"java.util.function", "Supplier"},
    {"java.util.concurrent", "Callable"},
    {"java.util.concurrent", "ConcurrentHashMap"},
    {"java.util.concurrent", "ExecutorService"},
    {"java.util.concurrent", "TimeUnit"},
    {"java.nio.file", "Path"},         {"java.nio.file", "Files"},
});

std::vector<std::string_view> split_dots(std::string_view dotted)
{
    std::vector<std::string_view> parts;
    std::size_t pos = 0;
    while (true) {
        const std::size_t dot = dotted.find('.', pos);
        parts.push_back(dotted.substr(pos, dot == std::string_view::npos ? dot : dot - pos));
        if (dot == std::string_view::npos) {
            break;
        }
        pos = dot + 1;
    }
    return parts;
}

} // namespace

bool is_java_lang_type(std::string_view simple)
{
    return std::find(kJavaLang.begin(), kJavaLang.end(), simple) != kJavaLang.end();
}

bool jdk_package_contains(std::string_view package, std::string_view simple)
{
    return std::any_of(kJdkTypes.begin(), kJdkTypes.end(), [&](const JdkType& t) {
        return t.package == package && t.simple == simple;
    });
}

std::string_view simple_name_of(std::string_view qualified)
{
    const std::size_t dot = qualified.rfind('.');
    return dot == std::string_view::npos ? qualified : qualified.substr(dot + 1);
}

std::string_view qualifier_of(std::string_view qualified)
{
    const std::size_t dot = qualified.rfind('.');
    return dot == std::string_view::npos ? std::string_view{} : qualified.substr(0, dot);
}

std::optional<std::string> lookup_type_name(const TypeScope& scope, std::string_view simple)
{
    for (auto it = scope.type_params.rbegin(); it != scope.type_params.rend(); ++it) {
        if (auto found = it->find(std::string(simple)); found != it->end()) {
            return found->second;
        }
    }

    // Nested types visible from the current class outwards.
    std::string_view enclosing = scope.current_class;
    while (!enclosing.empty()) {
        std::string candidate = std::string(enclosing) + "." + std::string(simple);
        if (scope.declared_types.count(candidate) != 0) {
            return candidate;
        }
        enclosing = qualifier_of(enclosing);
        if (!scope.package_name.empty() && enclosing == scope.package_name) {
            break;
        }
    }
    const std::string top_level =
        scope.package_name.empty() ? std::string(simple) : scope.package_name + "." + std::string(simple);
    if (scope.declared_types.count(top_level) != 0) {
        return top_level;
    }

    for (const ImportDecl& imp : scope.imports) {
        if (!imp.is_static && !imp.is_wildcard && simple_name_of(imp.name) == simple) {
            return imp.name;
        }
    }
    if (is_java_lang_type(simple)) {
        return "java.lang." + std::string(simple);
    }
    for (const ImportDecl& imp : scope.imports) {
        if (!imp.is_static && imp.is_wildcard && jdk_package_contains(imp.name, simple)) {
            return imp.name + "." + std::string(simple);
        }
    }
    return std::nullopt;
}

TypeName primitive_type(std::string_view name)
{
    return TypeName{std::string(name), true};
}

TypeName object_type(std::string qualified)
{
    return TypeName{std::move(qualified), false};
}

TypeName canonical_type(const TypeScope& scope, std::string_view dotted, int dims)
{
    std::string suffix;
    for (int i = 0; i < dims; ++i) {
        suffix += "[]";
    }
    if (dotted == "void" || is_primitive_type(dotted)) {
        return TypeName{std::string(dotted) + suffix, dims == 0};
    }

    const std::vector<std::string_view> parts = split_dots(dotted);
    std::string head;
    if (auto qualified = lookup_type_name(scope, parts.front())) {
        head = *qualified;
    } else if (parts.size() > 1 && std::islower(static_cast<unsigned char>(parts.front().front()))) {
        // Already package-qualified.
        return TypeName{std::string(dotted) + suffix, false};
    } else {
        head = scope.package_name.empty() ? std::string(parts.front())
                                          : scope.package_name + "." + std::string(parts.front());
    }
    for (std::size_t i = 1; i < parts.size(); ++i) {
        head += ".";
        head += parts[i];
    }
    return TypeName{head + suffix, false};
}

} // namespace focalctx
