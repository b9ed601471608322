#include "focalctx/prompt.hpp"

#include "focalctx/errors.hpp"
#include "focalctx/type_names.hpp"

#include <filesystem>

namespace focalctx {

std::string_view to_string(Strategy strategy)
{
    return strategy == Strategy::Ours ? "ours" : "baseline";
}

std::string_view display_name(Strategy strategy)
{
    return strategy == Strategy::Ours ? "Ours" : "Baseline";
}

Strategy parse_strategy(std::string_view text)
{
    if (text == "ours") {
        return Strategy::Ours;
    }
    if (text == "baseline") {
        return Strategy::Baseline;
    }
    throw ConfigError("unknown strategy '" + std::string(text) + "' (expected ours or baseline)");
}

std::string wrap_instruction(std::string_view system, std::string_view body)
{
    std::string out = "[INST]\n<<SYS>>\n";
    out += system;
    out += "\n<</SYS>>\n";
    out += body;
    out += "[/INST]";
    return out;
}

PromptArtifact build_ours(const FocalContext& ctx, const FocalMethodRef& ref, std::string_view tokenizer)
{
    PromptArtifact p;
    p.strategy = Strategy::Ours;
    p.text = wrap_instruction(kOursSystemPrompt, render_context(ctx));
    p.token_count = count_tokens(p.text, tokenizer);
    p.tokenizer = std::string(tokenizer);
    p.focal_ref = ref;
    return p;
}

std::string baseline_test_class(const ClassModel& cls)
{
    return cls.simple_name + "1Test";
}

namespace {

std::string simple_type(const TypeName& type)
{
    const std::size_t bracket = type.text.find('[');
    const std::string_view base = std::string_view(type.text).substr(0, bracket);
    std::string out(simple_name_of(base));
    if (bracket != std::string::npos) {
        out += type.text.substr(bracket);
    }
    return out;
}

std::string render_import(const ImportDecl& imp)
{
    std::string out = "import ";
    if (imp.is_static) {
        out += "static ";
    }
    out += imp.name;
    if (imp.is_wildcard) {
        out += ".*";
    }
    out += ";\n";
    return out;
}

} // namespace

PromptArtifact build_baseline(const LocatedMethod& located, const FocalMethodRef& ref, std::string_view tokenizer)
{
    const CompilationUnitModel& unit = *located.unit;
    const ClassModel& cls = *located.cls;
    const MethodModel& method = *located.method;
    const std::string test_class = baseline_test_class(cls);

    std::string body = "// " + std::filesystem::path(unit.path).filename().string() + "\n";
    body += unit.raw_source;
    if (!unit.raw_source.empty() && unit.raw_source.back() != '\n') {
        body += '\n';
    }
    body += "\n// " + test_class + ".java\n";
    if (!unit.package_name.empty()) {
        body += "package " + unit.package_name + ";\n\n";
    }
    for (const ImportDecl& imp : unit.imports) {
        body += render_import(imp);
    }
    body += "import org.junit.jupiter.api.Test;\n";
    body += "import static org.junit.jupiter.api.Assertions.*;\n\n";

    std::string params;
    for (const Parameter& p : method.parameters) {
        if (!params.empty()) {
            params += ", ";
        }
        params += simple_type(p.type);
    }
    body += "/**\n";
    body += " * Test class of {@link " + cls.simple_name + "}.\n";
    body += " * It contains unit test cases for the\n";
    body += " * {@link " + cls.simple_name + "#" + method.name + "(" + params + ")} method.\n";
    body += " */\n";
    body += "public class " + test_class + " {\n";

    PromptArtifact p;
    p.strategy = Strategy::Baseline;
    p.text = wrap_instruction(kBaselineSystemPrompt, body);
    p.token_count = count_tokens(p.text, tokenizer);
    p.tokenizer = std::string(tokenizer);
    p.focal_ref = ref;
    return p;
}

PromptArtifact build_baseline(const CompilationUnitModel& unit, const FocalMethodRef& ref, std::string_view tokenizer)
{
    LocatedMethod found;
    std::size_t matches = 0;
    for_each_class(unit, [&](const ClassModel& cls) {
        if (!class_name_matches(cls.qualified_name, ref.class_name)) {
            return;
        }
        for (const MethodModel& m : cls.methods) {
            if (m.name == ref.method_name && (!ref.arity || m.arity() == *ref.arity)) {
                found = {&unit, &cls, &m};
                ++matches;
            }
        }
    });
    if (matches == 0) {
        throw LookupError("method not found in " + unit.path + ": " + to_string(ref));
    }
    if (matches > 1) {
        throw AmbiguityError("method " + to_string(ref) + " is ambiguous in " + unit.path);
    }
    return build_baseline(found, ref, tokenizer);
}

} // namespace focalctx
