#include "focalctx/cli.hpp"
#include "focalctx/context.hpp"
#include "focalctx/eval.hpp"
#include "focalctx/gateway.hpp"
#include "focalctx/harvest.hpp"
#include "focalctx/parser.hpp"
#include "test_support.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

namespace {

using namespace focalctx;
namespace t = focalctx::testing;

struct Verdict {
    bool pass = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fixed(double v, int digits)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

int cli(const std::vector<std::string>& args, std::string* out = nullptr)
{
    std::ostringstream o;
    std::ostringstream e;
    const int code = run_cli(args, o, e);
    if (out != nullptr) {
        *out = o.str();
    }
    return code;
}

// Sorts the lines between two headers, the one place where ordering may differ.
std::string sort_section(const std::string& text, const std::string& from, const std::string& to)
{
    const std::size_t a = text.find(from);
    const std::size_t b = text.find(to);
    if (a == std::string::npos || b == std::string::npos || b < a) {
        return text;
    }
    const std::size_t start = a + from.size();
    std::vector<std::string> lines;
    std::istringstream in(text.substr(start, b - start));
    for (std::string line; std::getline(in, line);) {
        lines.push_back(line);
    }
    std::sort(lines.begin(), lines.end());
    std::string middle;
    for (const std::string& l : lines) {
        middle += l + "\n";
    }
    return text.substr(0, start) + middle + text.substr(b);
}

ProjectIndex guava_index()
{
    return build_index(parse_project(t::data_dir() / "guava").units, default_builtin_table_path());
}

Verdict focal_prompt_reproduction()
{
    const auto start = std::chrono::steady_clock::now();
    std::string context;
    const int code = cli({"context", "--project", (t::data_dir() / "guava").string(), "--class", "DoubleUtils",
                          "--method", "ensureNonNegative", "--arity", "1"},
                         &context);
    const FocalMethodRef ref{"", "DoubleUtils", "ensureNonNegative", 1};
    const ProjectIndex index = guava_index();
    const FocalContext ctx = extract_context(index, ref);
    const PromptArtifact prompt = build_ours(ctx, ref);
    const double elapsed = seconds_since(start);

    const std::set<std::string> expected = {"void com.google.common.base.Preconditions.checkArgument(boolean)",
                                            "double java.lang.Math.max(double, double)",
                                            "boolean java.lang.Double.isNaN(double)"};
    const std::set<std::string> got(ctx.invoked_signatures.begin(), ctx.invoked_signatures.end());
    const bool cli_lines = std::all_of(expected.begin(), expected.end(), [&](const std::string& s) {
        return context.find("\n" + s + "\n") != std::string::npos;
    });
    const std::string reference = sort_section(t::read_file(t::data_dir() / "listings/listing2_prompt.txt"),
                                             "SIGNATURES-OF-METHOD-CALLS-WITHIN-FOCAL-METHOD:\n",
                                             "FIELDS-USED-WITHIN-FOCAL-METHOD:\n");
    const bool exact = prompt.text == reference;
    return {code == kExitOk && got == expected && cli_lines && exact && elapsed < 1.0,
            "signatures " + std::string(got == expected ? "match" : "differ") + ", prompt " +
                (exact ? "byte-exact after signature sort" : "differs") + ", " + std::to_string(prompt.token_count) +
                " tokens, " + fixed(elapsed, 3) + " s"};
}

Verdict employee_context()
{
    const auto start = std::chrono::steady_clock::now();
    std::string out;
    const int code = cli({"context", "--project", (t::data_dir() / "employee").string(), "--class", "Employee",
                          "--method", "getEmail"},
                         &out);
    const double elapsed = seconds_since(start);
    const bool golden = out == t::read_file(t::golden_dir() / "employee_getEmail_context.txt");
    const bool signature = out.find("\njava.lang.String Employee.getUnknownEmail(java.lang.Integer)\n") != std::string::npos;
    const bool declaring = out.find("Declaring-Class-of-Method:\nEmployee\n") != std::string::npos;
    return {code == kExitOk && golden && signature && declaring && elapsed < 1.0,
            std::string("golden ") + (golden ? "byte-exact" : "differs") + ", getUnknownEmail(Integer) " +
                (signature ? "present" : "missing") + ", declaring class " + (declaring ? "Employee" : "missing") +
                ", " + fixed(elapsed, 3) + " s"};
}

Verdict reply_harvest()
{
    PromptArtifact prompt;
    prompt.text = t::read_file(t::golden_dir() / "ensureNonNegative_ours_prompt.txt");
    prompt.token_count = count_tokens(prompt.text);
    const HarvestOutcome h = harvest(t::read_file(t::data_dir() / "listings/listing3_reply.txt"), prompt);
    return {h.classification == Classification::TestsGenerated && h.test_method_count == 1 && h.assertion_count == 3,
            std::string(to_string(h.classification)) + ", " + std::to_string(h.test_method_count) + " test method, " +
                std::to_string(h.assertion_count) + " assertions"};
}

const StrategySummary* find_summary(const EvaluationReport& r, Strategy s)
{
    for (const StrategySummary& x : r.strategies) {
        if (x.strategy == s) {
            return &x;
        }
    }
    return nullptr;
}

struct DemoRun {
    EvaluationReport report;
    double seconds = 0;
    std::size_t classes = 0;
};

DemoRun demo_run()
{
    const auto start = std::chrono::steady_clock::now();
    const EvalConfig cfg = load_eval_config(t::demo_dir() / "config.json");
    DemoRun run{run_evaluation(cfg).report, 0, 0};
    run.seconds = seconds_since(start);
    std::set<std::string> classes;
    for (const CorpusEntry& e : load_corpus(cfg.corpus)) {
        classes.insert(e.focal.class_name);
    }
    run.classes = classes.size();
    return run;
}

Verdict directional_tables(const DemoRun& run)
{
    const StrategySummary* base = find_summary(run.report, Strategy::Baseline);
    const StrategySummary* ours = find_summary(run.report, Strategy::Ours);
    if (base == nullptr || ours == nullptr) {
        return {false, "a strategy is missing from the report"};
    }
    const bool pass = base->total_methods >= 20 && run.classes == 2 && ours->methods_with_tests > base->methods_with_tests &&
                      base->regurgitation >= 1 && run.seconds < 30.0;
    return {pass, std::to_string(base->total_methods) + " methods from " + std::to_string(run.classes) +
                      " classes, tests generated Ours " + std::to_string(ours->methods_with_tests) + " vs Baseline " +
                      std::to_string(base->methods_with_tests) + ", Baseline regurgitation " +
                      std::to_string(base->regurgitation) + ", " + fixed(run.seconds, 2) + " s"};
}

Verdict token_ratio(const DemoRun& run)
{
    const StrategySummary* base = find_summary(run.report, Strategy::Baseline);
    const StrategySummary* ours = find_summary(run.report, Strategy::Ours);
    if (base == nullptr || ours == nullptr || base->tokens.mean == 0.0) {
        return {false, "no token statistics"};
    }
    const double ratio = ours->tokens.mean / base->tokens.mean;
    auto stats = [](const char* name, const Stats& s) {
        return std::string(name) + " mean " + fixed(s.mean, 2) + " std " + fixed(s.std_dev, 2) + " median " +
               fixed(s.median, 0);
    };
    return {ratio < 0.5, "ratio " + fixed(ratio, 3) + "; " + stats("Baseline", base->tokens) + "; " +
                             stats("Ours", ours->tokens)};
}

Verdict resolver_oracle()
{
    const t::OracleResult r = t::check_resolver_oracle(t::data_dir() / "resolver_oracle");
    std::string detail = std::to_string(r.agreed) + "/" + std::to_string(r.annotations) + " annotations agree over " +
                         std::to_string(r.call_sites) + " call sites";
    if (!r.mismatches.empty()) {
        detail += "; first mismatch: " + r.mismatches.front();
    }
    return {r.perfect() && r.call_sites >= 30, detail};
}

Verdict determinism()
{
    const auto dir = t::scratch_dir("acceptance_run");
    const std::vector<std::string> args = {"evaluate", "--config", (t::demo_dir() / "config.json").string(),
                                           "--output-dir", dir.string()};
    const int ca = cli(args);
    const auto ta = t::read_tree(dir, {"run_metadata.json"});
    const int cb = cli(args);
    const auto tb = t::read_tree(dir, {"run_metadata.json"});
    std::size_t differing = 0;
    for (const auto& [path, text] : ta) {
        auto it = tb.find(path);
        differing += it == tb.end() || it->second != text;
    }
    differing += tb.size() > ta.size() ? tb.size() - ta.size() : 0;
    return {ca == kExitOk && cb == kExitOk && ta == tb && !ta.empty(),
            std::to_string(ta.size()) + " files compared across two consecutive runs, " +
                std::to_string(differing) + " differ (run_metadata.json excluded)"};
}

Verdict truncation()
{
    std::string text;
    for (std::size_t i = 0; count_tokens(text) < 5295; ++i) {
        text += "token" + std::to_string(i % 97) + " += f(x); ";
    }
    while (count_tokens(text) > 5295) {
        text.pop_back();
    }
    PromptArtifact prompt;
    prompt.text = text;
    prompt.token_count = count_tokens(text);
    Gateway gateway(make_echo_backend(), GenerationConfig{});
    const CompletionResult r = gateway.complete(prompt);
    const std::size_t sent = r.raw_text ? count_tokens(*r.raw_text) : 0;
    return {prompt.token_count == 5295 && r.truncated_input && r.input_tokens == 1023 && sent == 1023,
            std::to_string(prompt.token_count) + " tokens in, " + std::to_string(sent) +
                " sent, truncated_input=" + (r.truncated_input ? "true" : "false")};
}

} // namespace

int main()
{
    std::vector<std::pair<std::string, std::function<Verdict()>>> criteria;
    DemoRun demo;
    bool demo_ready = false;
    auto demo_once = [&]() -> const DemoRun& {
        if (!demo_ready) {
            demo = demo_run();
            demo_ready = true;
        }
        return demo;
    };
    criteria.emplace_back("Focal method prompt", focal_prompt_reproduction);
    criteria.emplace_back("Employee context", employee_context);
    criteria.emplace_back("Reply harvesting", reply_harvest);
    criteria.emplace_back("Generation outcomes", [&] { return directional_tables(demo_once()); });
    criteria.emplace_back("Token ratio", [&] { return token_ratio(demo_once()); });
    criteria.emplace_back("Resolver oracle", resolver_oracle);
    criteria.emplace_back("Determinism", determinism);
    criteria.emplace_back("Truncation contract", truncation);

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        failed += v.pass ? 0 : 1;
        std::cout << (v.pass ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first << ": " << v.detail
                  << "\n";
    }
    return failed == 0 ? 0 : 1;
}
