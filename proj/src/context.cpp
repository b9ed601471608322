#include "focalctx/context.hpp"

#include "focalctx/errors.hpp"

#include <algorithm>
#include <functional>

namespace focalctx {

std::string to_string(const FocalMethodRef& ref)
{
    std::string out = ref.class_name + "." + ref.method_name;
    if (ref.arity) {
        out += "/" + std::to_string(*ref.arity);
    }
    return out;
}

bool class_name_matches(std::string_view qualified, std::string_view wanted)
{
    return qualified == wanted ||
           (qualified.size() > wanted.size() && qualified.ends_with(wanted) &&
            qualified[qualified.size() - wanted.size() - 1] == '.');
}

namespace {

void sort_unique(std::vector<std::string>& v)
{
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

} // namespace

LocatedMethod locate_method(const ProjectIndex& index, const FocalMethodRef& ref)
{
    std::vector<const ClassEntry*> classes;
    for (const auto& [qualified, entry] : index.classes()) {
        if (!ref.unit_path.empty() && entry.unit->path != ref.unit_path) {
            continue;
        }
        if (class_name_matches(qualified, ref.class_name)) {
            classes.push_back(&entry);
        }
    }
    // An exact qualified match beats suffix matches.
    auto exact = std::find_if(classes.begin(), classes.end(),
                              [&](const ClassEntry* e) { return e->cls->qualified_name == ref.class_name; });
    if (exact != classes.end()) {
        classes = {*exact};
    }
    if (classes.empty()) {
        throw LookupError("class not found: " + ref.class_name);
    }
    if (classes.size() > 1) {
        std::string names;
        for (const ClassEntry* e : classes) {
            names += "\n  " + e->cls->qualified_name + " (" + e->unit->path + ")";
        }
        throw AmbiguityError("class name " + ref.class_name + " is ambiguous:" + names);
    }

    const ClassEntry& entry = *classes.front();
    std::vector<const MethodModel*> methods;
    for (const MethodModel& m : entry.cls->methods) {
        if (m.name == ref.method_name && (!ref.arity || m.arity() == *ref.arity)) {
            methods.push_back(&m);
        }
    }
    if (methods.empty()) {
        throw LookupError("method not found: " + to_string(ref));
    }
    if (methods.size() > 1) {
        std::string names;
        for (const MethodModel* m : methods) {
            names += "\n  " + render(signature_of(*entry.cls, *m));
        }
        throw AmbiguityError("method " + to_string(ref) + " is ambiguous; pass an arity:" + names);
    }
    return {entry.unit, entry.cls, methods.front()};
}

FocalContext extract_context(const ProjectIndex& index, const FocalMethodRef& ref)
{
    return extract_context(index, locate_method(index, ref));
}

FocalContext extract_context(const ProjectIndex& index, const LocatedMethod& located)
{
    const CompilationUnitModel& unit = *located.unit;
    const ClassModel& cls = *located.cls;
    const MethodModel& method = *located.method;

    FocalContext ctx;
    ctx.focal_source = strip_common_indent(span_text(unit, method.source_span));
    ctx.declaring_class = cls.simple_name;

    const std::vector<Resolution> resolutions = resolve_calls(index, unit, cls, method);
    for (std::size_t i = 0; i < resolutions.size(); ++i) {
        const CallSite& site = method.invocations[i];
        const Resolution& r = resolutions[i];
        switch (r.outcome) {
        case ResolutionOutcome::Resolved:
            ++ctx.resolution_stats.resolved;
            ctx.invoked_signatures.push_back(render(*r.signature));
            break;
        case ResolutionOutcome::Ambiguous:
            ++ctx.resolution_stats.ambiguous;
            for (const MethodSignature& c : r.candidates) {
                ctx.invoked_signatures.push_back(render(c));
            }
            break;
        case ResolutionOutcome::Unresolved:
            ++ctx.resolution_stats.unresolved;
            ctx.invoked_signatures.push_back("UNRESOLVED " + site.callee_name + "/" +
                                             std::to_string(site.argument_count));
            break;
        }
    }
    for (const FieldAccessSite& site : method.field_accesses) {
        const FieldResolution r = resolve_field(index, cls, site);
        if (r.outcome == FieldOutcome::Resolved) {
            ctx.field_facts.push_back(r.fact->name + " : " + r.fact->type.text);
        }
    }
    sort_unique(ctx.invoked_signatures);
    sort_unique(ctx.field_facts);
    return ctx;
}

std::string render_context(const FocalContext& ctx)
{
    std::string out = "FOCAL-METHOD-BEGIN\n";
    out += ctx.focal_source;
    out += "\nFOCAL-METHOD-END\nDeclaring-Class-of-Method:\n";
    out += ctx.declaring_class;
    out += "\nSIGNATURES-OF-METHOD-CALLS-WITHIN-FOCAL-METHOD:\n";
    for (const std::string& s : ctx.invoked_signatures) {
        out += s;
        out += '\n';
    }
    out += "FIELDS-USED-WITHIN-FOCAL-METHOD:\n";
    for (const std::string& f : ctx.field_facts) {
        out += f;
        out += '\n';
    }
    return out;
}

} // namespace focalctx
