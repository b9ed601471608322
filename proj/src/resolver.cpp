#include "focalctx/resolver.hpp"

#include "focalctx/errors.hpp"
#include "focalctx/lexer.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace focalctx {

BuiltinTable parse_builtin_table(std::string_view text)
{
    BuiltinTable table;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) {
            line.remove_suffix(1);
        }
        std::size_t first = line.find_first_not_of(" \t");
        if (first == std::string_view::npos || line[first] == '#') {
            continue;
        }
        line.remove_prefix(first);

        std::string error;
        std::optional<MethodSignature> sig = parse_signature(line, &error);
        if (!sig) {
            throw LoadError(error + ": '" + std::string(line) + "'", line_no);
        }
        auto& bucket = table[{sig->declaring_class, sig->name, sig->parameter_types.size()}];
        if (std::find(bucket.begin(), bucket.end(), *sig) == bucket.end()) {
            bucket.push_back(std::move(*sig));
        }
    }
    return table;
}

BuiltinTable load_builtin_table(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open builtin signature table " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_builtin_table(buffer.str());
}

std::filesystem::path default_builtin_table_path()
{
    return std::filesystem::path(FOCALCTX_DATA_DIR) / "builtin_signatures.txt";
}

const ClassEntry* ProjectIndex::find_class(std::string_view qualified) const
{
    auto it = by_qualified_.find(std::string(qualified));
    return it == by_qualified_.end() ? nullptr : &it->second;
}

std::vector<const ClassEntry*> ProjectIndex::find_simple(std::string_view simple) const
{
    std::vector<const ClassEntry*> out;
    auto [lo, hi] = by_simple_.equal_range(std::string(simple));
    for (auto it = lo; it != hi; ++it) {
        out.push_back(find_class(it->second));
    }
    return out;
}

const std::vector<MethodSignature>* ProjectIndex::builtins(const std::string& cls, const std::string& name,
                                                           std::size_t arity) const
{
    auto it = builtins_.find({cls, name, arity});
    return it == builtins_.end() ? nullptr : &it->second;
}

bool ProjectIndex::builtin_class_known(std::string_view cls) const
{
    return builtin_classes_.find(cls) != builtin_classes_.end();
}

std::size_t ProjectIndex::builtin_count() const
{
    std::size_t n = 0;
    for (const auto& [key, sigs] : builtins_) {
        n += sigs.size();
    }
    return n;
}

TypeScope ProjectIndex::scope_for(const CompilationUnitModel& unit, const ClassModel& enclosing) const
{
    TypeScope scope;
    scope.package_name = unit.package_name;
    scope.imports = unit.imports;
    for_each_class(unit, [&](const ClassModel& c) { scope.declared_types.insert(c.qualified_name); });
    scope.current_class = enclosing.qualified_name;
    return scope;
}

ProjectIndex build_index(std::vector<CompilationUnitModel> units, BuiltinTable builtins)
{
    ProjectIndex index;
    index.units_ = std::make_shared<const std::vector<CompilationUnitModel>>(std::move(units));
    index.builtins_ = std::move(builtins);
    for (const auto& [key, sigs] : index.builtins_) {
        ++index.builtin_classes_[std::get<0>(key)];
    }

    struct Walker {
        ProjectIndex& index;
        const CompilationUnitModel& unit;

        void visit(const ClassModel& cls, const std::string& outer)
        {
            // A qualified name declared twice keeps its first (path-sorted) declaration.
            if (index.by_qualified_.emplace(cls.qualified_name, ClassEntry{&cls, &unit, outer}).second) {
                index.by_simple_.emplace(cls.simple_name, cls.qualified_name);
            }
            for (const ClassModel& nested : cls.nested) {
                visit(nested, cls.qualified_name);
            }
        }
    };
    for (const CompilationUnitModel& unit : *index.units_) {
        Walker walker{index, unit};
        for (const ClassModel& cls : unit.types) {
            walker.visit(cls, "");
        }
    }
    return index;
}

ProjectIndex build_index(std::vector<CompilationUnitModel> units, const std::filesystem::path& builtin_table)
{
    return build_index(std::move(units), load_builtin_table(builtin_table));
}

std::string_view to_string(ResolutionOutcome outcome)
{
    switch (outcome) {
    case ResolutionOutcome::Resolved:
        return "resolved";
    case ResolutionOutcome::Ambiguous:
        return "ambiguous";
    case ResolutionOutcome::Unresolved:
        return "unresolved";
    }
    return "unresolved";
}

MethodSignature signature_of(const ClassModel& cls, const MethodModel& method)
{
    MethodSignature sig;
    sig.return_type = method.return_type;
    sig.declaring_class = cls.qualified_name;
    sig.name = method.name;
    for (const Parameter& p : method.parameters) {
        sig.parameter_types.push_back(p.type);
    }
    return sig;
}

namespace {

constexpr std::string_view kObject = "java.lang.Object";

/// Supertypes of `cls` in lookup order: the class itself, then superclasses
/// and interfaces breadth-first. Types outside the project are listed
/// separately; java.lang.Object always closes the external list.
struct Hierarchy {
    std::vector<const ClassModel*> project;
    std::vector<std::string> external;
};

Hierarchy hierarchy_of(const ProjectIndex& index, const ClassModel& start)
{
    Hierarchy h;
    std::set<std::string> seen{start.qualified_name};
    std::deque<const ClassModel*> queue{&start};
    auto enqueue = [&](const std::string& name) {
        if (!seen.insert(name).second) {
            return;
        }
        if (const ClassEntry* entry = index.find_class(name)) {
            queue.push_back(entry->cls);
        } else if (name != kObject) {
            h.external.push_back(name);
        }
    };
    while (!queue.empty()) {
        const ClassModel* cls = queue.front();
        queue.pop_front();
        h.project.push_back(cls);
        if (cls->superclass) {
            enqueue(cls->superclass->text);
        } else if (cls->kind == ClassKind::Enum) {
            enqueue("java.lang.Enum");
        }
        for (const TypeName& iface : cls->interfaces) {
            enqueue(iface.text);
        }
    }
    h.external.emplace_back(kObject);
    return h;
}

std::vector<std::string> split(std::string_view dotted)
{
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (true) {
        const std::size_t dot = dotted.find('.', pos);
        parts.emplace_back(dotted.substr(pos, dot == std::string_view::npos ? dot : dot - pos));
        if (dot == std::string_view::npos) {
            return parts;
        }
        pos = dot + 1;
    }
}

// ---- assignability used to break same-arity ties ------------------------

int primitive_rank(std::string_view t)
{
    if (t == "byte") return 1;
    if (t == "short") return 2;
    if (t == "char") return 2;
    if (t == "int") return 3;
    if (t == "long") return 4;
    if (t == "float") return 5;
    if (t == "double") return 6;
    return 0;
}

bool primitive_widens(std::string_view from, std::string_view to)
{
    if (from == to) {
        return true;
    }
    if (from == "boolean" || to == "boolean" || to == "char" || to == "byte") {
        return false;
    }
    if (from == "char" && to == "short") {
        return false;
    }
    if (to == "short") {
        return from == "byte";
    }
    return primitive_rank(from) != 0 && primitive_rank(from) < primitive_rank(to);
}

std::string_view box(std::string_view primitive)
{
    static const std::map<std::string_view, std::string_view> table = {
        {"boolean", "java.lang.Boolean"}, {"byte", "java.lang.Byte"},   {"short", "java.lang.Short"},
        {"char", "java.lang.Character"},  {"int", "java.lang.Integer"}, {"long", "java.lang.Long"},
        {"float", "java.lang.Float"},     {"double", "java.lang.Double"},
    };
    auto it = table.find(primitive);
    return it == table.end() ? std::string_view{} : it->second;
}

std::string_view unbox(std::string_view boxed)
{
    static const std::map<std::string_view, std::string_view> table = {
        {"java.lang.Boolean", "boolean"}, {"java.lang.Byte", "byte"},   {"java.lang.Short", "short"},
        {"java.lang.Character", "char"},  {"java.lang.Integer", "int"}, {"java.lang.Long", "long"},
        {"java.lang.Float", "float"},     {"java.lang.Double", "double"},
    };
    auto it = table.find(boxed);
    return it == table.end() ? std::string_view{} : it->second;
}

/// Supertypes of well-known library types, beyond java.lang.Object.
bool library_subtype(std::string_view from, std::string_view to)
{
    static const std::multimap<std::string_view, std::string_view> table = {
        {"java.lang.String", "java.lang.CharSequence"},
        {"java.lang.String", "java.lang.Comparable"},
        {"java.lang.StringBuilder", "java.lang.CharSequence"},
        {"java.util.ArrayList", "java.util.List"},
        {"java.util.ArrayList", "java.util.Collection"},
        {"java.util.ArrayList", "java.lang.Iterable"},
        {"java.util.LinkedList", "java.util.List"},
        {"java.util.LinkedList", "java.util.Collection"},
        {"java.util.List", "java.util.Collection"},
        {"java.util.List", "java.lang.Iterable"},
        {"java.util.Set", "java.util.Collection"},
        {"java.util.Set", "java.lang.Iterable"},
        {"java.util.HashSet", "java.util.Set"},
        {"java.util.HashSet", "java.util.Collection"},
        {"java.util.Collection", "java.lang.Iterable"},
        {"java.util.HashMap", "java.util.Map"},
        {"java.util.TreeMap", "java.util.Map"},
        {"java.util.LinkedHashMap", "java.util.Map"},
    };
    auto [lo, hi] = table.equal_range(from);
    for (auto it = lo; it != hi; ++it) {
        if (it->second == to) {
            return true;
        }
    }
    if (!unbox(from).empty()) {
        return to == "java.lang.Comparable" || (from != "java.lang.Boolean" && from != "java.lang.Character" &&
                                                to == "java.lang.Number");
    }
    return false;
}

bool reference_assignable(const ProjectIndex& index, const std::string& from, std::string_view to)
{
    if (from == to || to == kObject) {
        return true;
    }
    if (from.ends_with("[]")) {
        return to == "java.lang.Object[]" && !is_primitive_type(std::string_view(from).substr(0, from.size() - 2));
    }
    if (const ClassEntry* entry = index.find_class(from)) {
        const Hierarchy h = hierarchy_of(index, *entry->cls);
        for (const ClassModel* c : h.project) {
            if (c->qualified_name == to) {
                return true;
            }
        }
        for (const std::string& ext : h.external) {
            if (ext == to || library_subtype(ext, to)) {
                return true;
            }
        }
        return false;
    }
    return library_subtype(from, to);
}

bool assignable(const ProjectIndex& index, const TypeName& arg, const TypeName& param)
{
    if (arg.text == param.text) {
        return true;
    }
    if (arg.is_primitive && param.is_primitive) {
        return primitive_widens(arg.text, param.text);
    }
    if (arg.is_primitive) {
        const std::string_view boxed = box(arg.text);
        return !boxed.empty() && reference_assignable(index, std::string(boxed), param.text);
    }
    if (param.is_primitive) {
        const std::string_view unboxed = unbox(arg.text);
        return !unboxed.empty() && primitive_widens(unboxed, param.text);
    }
    return reference_assignable(index, arg.text, param.text);
}

bool applicable(const ProjectIndex& index, const MethodSignature& sig, const std::vector<TypeName>& args)
{
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (!assignable(index, args[i], sig.parameter_types[i])) {
            return false;
        }
    }
    return true;
}

Resolution pick(const ProjectIndex& index, std::vector<MethodSignature> candidates,
                const std::vector<std::optional<TypeName>>& arg_types)
{
    Resolution r;
    if (candidates.empty()) {
        return r;
    }
    if (candidates.size() == 1) {
        r.outcome = ResolutionOutcome::Resolved;
        r.signature = std::move(candidates.front());
        return r;
    }

    const bool all_known = std::all_of(arg_types.begin(), arg_types.end(), [](const auto& t) { return t.has_value(); });
    if (all_known) {
        std::vector<TypeName> args;
        for (const auto& t : arg_types) {
            args.push_back(*t);
        }
        std::vector<const MethodSignature*> exact;
        std::vector<const MethodSignature*> usable;
        for (const MethodSignature& c : candidates) {
            bool same = true;
            for (std::size_t i = 0; i < args.size(); ++i) {
                same = same && c.parameter_types[i].text == args[i].text;
            }
            if (same) {
                exact.push_back(&c);
            }
            if (applicable(index, c, args)) {
                usable.push_back(&c);
            }
        }
        const MethodSignature* chosen = nullptr;
        if (exact.size() == 1) {
            chosen = exact.front();
        } else if (usable.size() == 1) {
            chosen = usable.front();
        } else if (usable.size() > 1) {
            std::vector<const MethodSignature*> most_specific;
            for (const MethodSignature* m : usable) {
                bool beats_all = true;
                for (const MethodSignature* n : usable) {
                    if (m != n && !applicable(index, *n, m->parameter_types)) {
                        beats_all = false;
                    }
                }
                if (beats_all) {
                    most_specific.push_back(m);
                }
            }
            if (most_specific.size() == 1) {
                chosen = most_specific.front();
            }
        }
        if (chosen != nullptr) {
            r.outcome = ResolutionOutcome::Resolved;
            r.signature = *chosen;
            return r;
        }
    }
    r.outcome = ResolutionOutcome::Ambiguous;
    r.candidates = std::move(candidates);
    return r;
}

class CallResolver {
public:
    CallResolver(const ProjectIndex& index, const CompilationUnitModel& unit, const ClassModel& enclosing)
        : index_(index), unit_(unit), enclosing_(enclosing), scope_(index.scope_for(unit, enclosing))
    {
    }

    using CallLookup = std::function<const Resolution*(std::size_t)>;

    Resolution resolve(const CallSite& site, const CallLookup& call)
    {
        std::vector<std::optional<TypeName>> arg_types;
        for (const ArgumentInfo& arg : site.arguments) {
            const Resolution* produced = arg.call ? call(*arg.call) : nullptr;
            if (arg.type) {
                arg_types.push_back(arg.type);
            } else if (produced != nullptr && produced->signature) {
                arg_types.push_back(produced->signature->return_type);
            } else if (!arg.bare_name.empty()) {
                arg_types.push_back(field_type(enclosing_, arg.bare_name, true));
            } else {
                arg_types.emplace_back();
            }
        }
        while (arg_types.size() < site.argument_count) {
            arg_types.emplace_back();
        }
        const std::size_t arity = site.argument_count;

        switch (site.receiver_kind) {
        case ReceiverKind::None: {
            for (const ClassModel* cls = &enclosing_; cls != nullptr; cls = outer_of(*cls)) {
                Resolution r = lookup_in_class(*cls, site.callee_name, arity, arg_types);
                if (r.outcome != ResolutionOutcome::Unresolved) {
                    return r;
                }
            }
            return lookup_static_imports(site.callee_name, arity, arg_types);
        }
        case ReceiverKind::This:
            return lookup_in_class(enclosing_, site.callee_name, arity, arg_types);
        case ReceiverKind::Super: {
            if (enclosing_.superclass) {
                return lookup_in_type(enclosing_.superclass->text, site.callee_name, arity, arg_types);
            }
            return lookup_in_type(std::string(kObject), site.callee_name, arity, arg_types);
        }
        case ReceiverKind::Local:
        case ReceiverKind::Typed:
            if (site.receiver_type && !site.receiver_type->empty()) {
                return lookup_in_type(site.receiver_type->text, site.callee_name, arity, arg_types);
            }
            return {};
        case ReceiverKind::Name:
        case ReceiverKind::QualifiedName:
            if (site.receiver_expr) {
                if (auto type = expression_type(*site.receiver_expr)) {
                    return lookup_in_type(*type, site.callee_name, arity, arg_types);
                }
            }
            return {};
        case ReceiverKind::Expression:
            if (const Resolution* receiver = site.receiver_call ? call(*site.receiver_call) : nullptr) {
                if (receiver->signature && !receiver->signature->return_type.is_primitive) {
                    return lookup_in_type(receiver->signature->return_type.text, site.callee_name, arity, arg_types);
                }
            }
            return {};
        }
        return {};
    }

    std::optional<TypeName> field_type(const ClassModel& start, const std::string& name, bool include_outer) const
    {
        for (const ClassModel* cls = &start; cls != nullptr; cls = include_outer ? outer_of(*cls) : nullptr) {
            for (const ClassModel* c : hierarchy_of(index_, *cls).project) {
                for (const FieldModel& f : c->fields) {
                    if (f.name == name) {
                        return f.declared_type;
                    }
                }
            }
        }
        return std::nullopt;
    }

private:
    const ClassModel* outer_of(const ClassModel& cls) const
    {
        const ClassEntry* entry = index_.find_class(cls.qualified_name);
        if (entry == nullptr || entry->outer.empty()) {
            return nullptr;
        }
        const ClassEntry* outer = index_.find_class(entry->outer);
        return outer == nullptr ? nullptr : outer->cls;
    }

    Resolution lookup_in_class(const ClassModel& cls, const std::string& name, std::size_t arity,
                               const std::vector<std::optional<TypeName>>& args) const
    {
        const Hierarchy h = hierarchy_of(index_, cls);
        std::vector<MethodSignature> found;
        std::set<std::vector<std::string>> seen_params;
        auto offer = [&](MethodSignature sig) {
            std::vector<std::string> params;
            for (const TypeName& t : sig.parameter_types) {
                params.push_back(t.text);
            }
            // A subtype's declaration hides the inherited one with the same parameters.
            if (seen_params.insert(params).second) {
                found.push_back(std::move(sig));
            }
        };
        for (const ClassModel* c : h.project) {
            for (const MethodModel& m : c->methods) {
                if (!m.is_constructor && m.name == name && m.arity() == arity) {
                    offer(signature_of(*c, m));
                }
            }
            if (c->kind == ClassKind::Enum) {
                if (name == "values" && arity == 0) {
                    offer({TypeName{c->qualified_name + "[]", false}, c->qualified_name, "values", {}});
                } else if (name == "valueOf" && arity == 1) {
                    offer({object_type(c->qualified_name), c->qualified_name, "valueOf",
                           {object_type("java.lang.String")}});
                }
            }
        }
        if (!found.empty()) {
            return pick(index_, std::move(found), args);
        }
        for (const std::string& ext : h.external) {
            if (const auto* sigs = index_.builtins(ext, name, arity)) {
                return pick(index_, *sigs, args);
            }
        }
        return {};
    }

    Resolution lookup_in_type(const std::string& type, const std::string& name, std::size_t arity,
                              const std::vector<std::optional<TypeName>>& args) const
    {
        if (type.ends_with("[]")) {
            if (const auto* sigs = index_.builtins(std::string(kObject), name, arity)) {
                return pick(index_, *sigs, args);
            }
            return {};
        }
        if (const ClassEntry* entry = index_.find_class(type)) {
            return lookup_in_class(*entry->cls, name, arity, args);
        }
        if (const auto* sigs = index_.builtins(type, name, arity)) {
            return pick(index_, *sigs, args);
        }
        if (!is_primitive_type(type)) {
            if (const auto* sigs = index_.builtins(std::string(kObject), name, arity)) {
                return pick(index_, *sigs, args);
            }
        }
        return {};
    }

    Resolution lookup_static_imports(const std::string& name, std::size_t arity,
                                     const std::vector<std::optional<TypeName>>& args) const
    {
        for (bool wildcard : {false, true}) {
            std::vector<MethodSignature> found;
            for (const ImportDecl& imp : unit_.imports) {
                if (!imp.is_static || imp.is_wildcard != wildcard) {
                    continue;
                }
                std::string owner;
                if (wildcard) {
                    owner = imp.name;
                } else if (simple_name_of(imp.name) == name) {
                    owner = std::string(qualifier_of(imp.name));
                } else {
                    continue;
                }
                Resolution r = lookup_in_type(owner, name, arity, args);
                if (r.signature) {
                    found.push_back(*r.signature);
                }
                for (MethodSignature& c : r.candidates) {
                    found.push_back(std::move(c));
                }
            }
            if (!found.empty()) {
                std::vector<MethodSignature> unique;
                for (MethodSignature& s : found) {
                    if (std::find(unique.begin(), unique.end(), s) == unique.end()) {
                        unique.push_back(std::move(s));
                    }
                }
                return pick(index_, std::move(unique), args);
            }
        }
        return {};
    }

    /// Qualified class for a written type name, if it names a known type.
    std::optional<std::string> type_name(const std::string& simple) const
    {
        if (auto found = lookup_type_name(scope_, simple)) {
            return found;
        }
        const std::string same_package =
            unit_.package_name.empty() ? simple : unit_.package_name + "." + simple;
        if (index_.find_class(same_package) != nullptr) {
            return same_package;
        }
        for (const ImportDecl& imp : unit_.imports) {
            if (!imp.is_static && imp.is_wildcard) {
                const std::string candidate = imp.name + "." + simple;
                if (index_.find_class(candidate) != nullptr || index_.builtin_class_known(candidate)) {
                    return candidate;
                }
            }
        }
        return std::nullopt;
    }

    bool known_class(const std::string& qualified) const
    {
        return index_.find_class(qualified) != nullptr || index_.builtin_class_known(qualified);
    }

    /// Static type of a receiver written as a dotted chain of names.
    std::optional<std::string> expression_type(const std::string& text) const
    {
        const std::vector<std::string> parts = split(text);
        std::optional<std::string> type;
        std::size_t next = 1;
        if (parts.front() == "this") {
            type = enclosing_.qualified_name;
        } else if (auto field = field_type(enclosing_, parts.front(), true)) {
            type = field->text;
        } else if (auto head = type_name(parts.front())) {
            type = *head;
            // Nested types: Outer.Inner
            while (next < parts.size() && known_class(*type + "." + parts[next])) {
                *type += "." + parts[next];
                ++next;
            }
        } else {
            // Fully qualified class name: longest known prefix.
            for (std::size_t k = parts.size(); k >= 2; --k) {
                std::string candidate = parts[0];
                for (std::size_t i = 1; i < k; ++i) {
                    candidate += "." + parts[i];
                }
                if (known_class(candidate)) {
                    type = candidate;
                    next = k;
                    break;
                }
            }
        }
        for (; type && next < parts.size(); ++next) {
            const ClassEntry* entry = index_.find_class(*type);
            if (entry == nullptr) {
                return std::nullopt;
            }
            std::optional<TypeName> field = field_type(*entry->cls, parts[next], false);
            if (!field) {
                return std::nullopt;
            }
            type = field->text;
        }
        return type;
    }

    const ProjectIndex& index_;
    const CompilationUnitModel& unit_;
    const ClassModel& enclosing_;
    TypeScope scope_;
};

} // namespace

Resolution resolve_call(const ProjectIndex& index, const CompilationUnitModel& unit, const ClassModel& enclosing,
                        const CallSite& site, const std::vector<Resolution>* earlier)
{
    return CallResolver(index, unit, enclosing).resolve(site, [earlier](std::size_t i) -> const Resolution* {
        return earlier != nullptr && i < earlier->size() ? &(*earlier)[i] : nullptr;
    });
}

std::vector<Resolution> resolve_calls(const ProjectIndex& index, const CompilationUnitModel& unit,
                                      const ClassModel& enclosing, const MethodModel& method)
{
    const std::vector<CallSite>& sites = method.invocations;
    std::vector<std::optional<Resolution>> done(sites.size());
    std::vector<bool> busy(sites.size(), false);
    CallResolver resolver(index, unit, enclosing);
    std::function<const Resolution*(std::size_t)> get = [&](std::size_t i) -> const Resolution* {
        if (i >= sites.size() || busy[i]) {
            return nullptr;
        }
        if (!done[i]) {
            busy[i] = true;
            done[i] = resolver.resolve(sites[i], get);
            busy[i] = false;
        }
        return &*done[i];
    };
    std::vector<Resolution> out;
    out.reserve(sites.size());
    for (std::size_t i = 0; i < sites.size(); ++i) {
        out.push_back(*get(i));
    }
    return out;
}

FieldResolution resolve_field(const ProjectIndex& index, const ClassModel& enclosing, const FieldAccessSite& site)
{
    FieldResolution r;
    if (site.shadowed_by_local) {
        r.outcome = FieldOutcome::Local;
        return r;
    }
    if (site.receiver_expr && *site.receiver_expr != "this") {
        return r;
    }
    const bool include_outer = !site.receiver_expr.has_value();
    const ClassModel* start = &enclosing;
    while (start != nullptr) {
        for (const ClassModel* c : hierarchy_of(index, *start).project) {
            for (const FieldModel& f : c->fields) {
                if (f.name == site.field_name) {
                    r.outcome = FieldOutcome::Resolved;
                    r.fact = FieldFact{f.name, c->qualified_name, f.declared_type};
                    return r;
                }
            }
        }
        if (!include_outer) {
            break;
        }
        const ClassEntry* entry = index.find_class(start->qualified_name);
        const ClassEntry* outer = (entry == nullptr || entry->outer.empty()) ? nullptr : index.find_class(entry->outer);
        start = outer == nullptr ? nullptr : outer->cls;
    }
    return r;
}

} // namespace focalctx
