#include "focalctx/cli.hpp"

#include "focalctx/errors.hpp"
#include "focalctx/eval.hpp"
#include "focalctx/hashing.hpp"
#include "focalctx/parser.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <optional>
#include <sstream>

namespace focalctx {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Options {
    std::string project;
    std::string corpus;
    std::string strategy = "ours";
    std::string backend;
    std::string config;
    std::string format = "text";
    std::string output_dir;
    std::string class_name;
    std::string method;
    std::string path;
    std::string builtins;
    std::string replay_file;
    std::string index_cache;
    std::string tokenizer{kDefaultTokenizer};
    std::vector<std::string> ignore;
    std::optional<long long> arity;
    std::optional<long long> threshold;
    unsigned jobs = 1;
};

std::string read_text(const fs::path& path, std::string_view what)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read " + std::string(what) + " " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void require_dir(const std::string& project)
{
    if (project.empty()) {
        throw ConfigError("--project is required");
    }
    if (!fs::is_directory(project)) {
        throw IoError("project directory not found: " + project);
    }
}

ProjectIndex load_index(const Options& o)
{
    require_dir(o.project);
    ProjectParseOptions po;
    po.jobs = std::max(1u, o.jobs);
    if (!o.ignore.empty()) {
        po.ignore_dirs = o.ignore;
    }
    ProjectParse parsed = parse_project(o.project, po);
    return o.builtins.empty() ? build_index(std::move(parsed.units), default_builtin_table_path())
                              : build_index(std::move(parsed.units), fs::path(o.builtins));
}

FocalMethodRef ref_from(const Options& o)
{
    if (o.class_name.empty() || o.method.empty()) {
        throw ConfigError("--class and --method are required");
    }
    if (o.arity && *o.arity < 0) {
        throw ConfigError("--arity must be >= 0");
    }
    FocalMethodRef ref;
    ref.unit_path = o.path;
    ref.class_name = o.class_name;
    ref.method_name = o.method;
    if (o.arity) {
        ref.arity = static_cast<std::size_t>(*o.arity);
    }
    return ref;
}

struct FileCounts {
    std::string sha256;
    std::size_t classes = 0;
    std::size_t methods = 0;
    std::size_t diagnostics = 0;
};

FileCounts count_unit(const CompilationUnitModel& unit, std::size_t diagnostics)
{
    FileCounts c;
    for_each_class(unit, [&](const ClassModel& cls) {
        ++c.classes;
        c.methods += cls.methods.size();
    });
    c.diagnostics = diagnostics;
    return c;
}

int cmd_analyze(const Options& o, std::ostream& out, std::ostream& err)
{
    require_dir(o.project);
    const std::vector<std::string> ignore =
        o.ignore.empty() ? ProjectParseOptions{}.ignore_dirs : o.ignore;
    const std::vector<fs::path> files = list_source_files(o.project, ignore);

    std::map<std::string, FileCounts> cache;
    if (!o.index_cache.empty() && fs::exists(o.index_cache)) {
        try {
            const json doc = json::parse(read_text(o.index_cache, "index cache"));
            for (const auto& [path, entry] : doc.at("files").items()) {
                cache[path] = {entry.at("sha256").get<std::string>(), entry.at("classes").get<std::size_t>(),
                               entry.at("methods").get<std::size_t>(), entry.at("diagnostics").get<std::size_t>()};
            }
        } catch (const json::exception&) {
            err << "warning: ignoring unreadable index cache " << o.index_cache << '\n';
            cache.clear();
        }
    }

    std::map<std::string, FileCounts> fresh;
    FileCounts total;
    std::size_t reused = 0;
    for (const fs::path& file : files) {
        const std::string rel = fs::relative(file, o.project).generic_string();
        const std::string source = read_text(file, "source file");
        const std::string sha = sha256_hex(source);
        FileCounts counts;
        if (auto hit = cache.find(rel); hit != cache.end() && hit->second.sha256 == sha) {
            counts = hit->second;
            ++reused;
        } else {
            try {
                const ParseResult r = parse_unit(source, rel);
                counts = count_unit(r.unit, r.diagnostics.size());
                for (const ParseDiagnostic& d : r.diagnostics) {
                    err << rel << ':' << d.location.line << ':' << d.location.column << ": "
                        << (d.severity == ParseDiagnostic::Severity::Error ? "error" : "warning") << ": "
                        << d.message << '\n';
                }
            } catch (const ParseError& e) {
                counts.diagnostics = 1;
                err << rel << ": error: " << e.what() << '\n';
            }
            counts.sha256 = sha;
        }
        fresh[rel] = counts;
        total.classes += counts.classes;
        total.methods += counts.methods;
        total.diagnostics += counts.diagnostics;
    }

    out << files.size() << " files, " << total.classes << " classes, " << total.methods << " methods, "
        << total.diagnostics << " diagnostics\n";

    if (!o.index_cache.empty()) {
        json doc;
        doc["version"] = 1;
        doc["files"] = json::object();
        for (const auto& [path, c] : fresh) {
            doc["files"][path] = {{"sha256", c.sha256},
                                  {"classes", c.classes},
                                  {"methods", c.methods},
                                  {"diagnostics", c.diagnostics}};
        }
        std::ofstream cache_out(o.index_cache, std::ios::binary | std::ios::trunc);
        if (!cache_out) {
            throw IoError("cannot write index cache " + o.index_cache);
        }
        cache_out << doc.dump(2) << '\n';
        err << "index cache: " << reused << " of " << files.size() << " files unchanged\n";
    }
    return kExitOk;
}

int cmd_context(const Options& o, std::ostream& out, std::ostream& err)
{
    const ProjectIndex index = load_index(o);
    const FocalContext ctx = extract_context(index, ref_from(o));
    out << render_context(ctx);
    err << "calls: " << ctx.resolution_stats.resolved << " resolved, " << ctx.resolution_stats.ambiguous
        << " ambiguous, " << ctx.resolution_stats.unresolved << " unresolved\n";
    return kExitOk;
}

int cmd_prompt(const Options& o, std::ostream& out, std::ostream& err)
{
    require_tokenizer(o.tokenizer);
    const Strategy strategy = parse_strategy(o.strategy);
    const ProjectIndex index = load_index(o);
    const FocalMethodRef ref = ref_from(o);
    const LocatedMethod located = locate_method(index, ref);
    const PromptArtifact prompt = strategy == Strategy::Ours
                                      ? build_ours(extract_context(index, located), ref, o.tokenizer)
                                      : build_baseline(located, ref, o.tokenizer);
    if (o.format == "json") {
        json doc = {{"strategy", std::string(to_string(prompt.strategy))},
                    {"tokenizer", prompt.tokenizer},
                    {"token_count", prompt.token_count},
                    {"focal", to_string(ref)},
                    {"text", prompt.text}};
        out << doc.dump(2, ' ', false, json::error_handler_t::replace) << '\n';
    } else if (o.format == "text") {
        out << prompt.text << '\n';
        err << "tokens: " << prompt.token_count << " (" << prompt.tokenizer << ")\n";
    } else {
        throw ConfigError("prompt --format must be text or json");
    }
    return kExitOk;
}

// Flags override the config file.
void apply_overrides(EvalConfig& cfg, const Options& o)
{
    if (!o.project.empty()) {
        cfg.project_root = o.project;
    }
    if (!o.corpus.empty()) {
        cfg.corpus = o.corpus;
    }
    if (!o.backend.empty()) {
        cfg.backend.kind = o.backend;
    }
    if (o.threshold) {
        cfg.backend.threshold = *o.threshold;
    }
    if (!o.replay_file.empty()) {
        cfg.backend.replay_file = o.replay_file;
    }
    if (!o.output_dir.empty()) {
        cfg.output_dir = o.output_dir;
    }
    if (!o.builtins.empty()) {
        cfg.builtins = o.builtins;
    }
    if (!o.ignore.empty()) {
        cfg.ignore_dirs = o.ignore;
    }
    if (o.jobs > 1) {
        cfg.jobs = o.jobs;
    }
}

EvalConfig base_config(const Options& o)
{
    return o.config.empty() ? EvalConfig{} : load_eval_config(o.config);
}

fs::path run_dir(const EvalConfig& cfg)
{
    return cfg.output_dir.empty() ? fs::path("runs") / "latest" : cfg.output_dir;
}

int cmd_generate(const Options& o, std::ostream& out, std::ostream& err)
{
    EvalConfig cfg = base_config(o);
    apply_overrides(cfg, o);
    cfg.strategies = {parse_strategy(o.strategy)};
    if (o.tokenizer != kDefaultTokenizer) {
        cfg.tokenizer = o.tokenizer;
    }
    require_dir(cfg.project_root.string());

    std::vector<CorpusEntry> corpus;
    const bool single = !o.class_name.empty() || !o.method.empty();
    if (single) {
        corpus.push_back({ref_from(o), {}});
    } else if (!cfg.corpus.empty()) {
        corpus = load_corpus(cfg.corpus);
    } else {
        throw ConfigError("generate needs --corpus or --class and --method");
    }

    cfg.validate();
    const EvaluationRun run = run_evaluation(cfg, corpus, make_backend(cfg.backend));
    // A single ref named on the command line is a user error when it cannot be used.
    if (single && !run.report.skipped.empty()) {
        err << "error: " << run.report.skipped.front().reason << '\n';
        return kExitUserError;
    }
    const fs::path dir = run_dir(cfg);
    write_run_directory(dir, cfg, run);
    for (const GenerationRecord& r : run.report.records) {
        out << to_string(r.entry.focal) << '\t' << to_string(r.strategy) << '\t'
            << to_string(r.outcome.classification) << "\ttests=" << r.outcome.test_method_count << '\n';
    }
    for (const SkippedEntry& s : run.report.skipped) {
        err << "skipped " << to_string(s.entry.focal) << ": " << s.reason << '\n';
    }
    err << "run directory: " << dir.string() << '\n';
    return kExitOk;
}

int cmd_evaluate(const Options& o, std::ostream& out, std::ostream& err)
{
    if (o.config.empty()) {
        throw ConfigError("evaluate needs --config");
    }
    const ReportFormat format = parse_report_format(o.format);
    EvalConfig cfg = load_eval_config(o.config);
    apply_overrides(cfg, o);
    if (cfg.corpus.empty()) {
        throw ConfigError("config is missing \"corpus\"");
    }
    require_dir(cfg.project_root.string());
    const EvaluationRun run = run_evaluation(cfg);
    const fs::path dir = run_dir(cfg);
    write_run_directory(dir, cfg, run);
    out << render_report(run.report, format);
    err << "run directory: " << dir.string() << '\n';
    return kExitOk;
}

void add_ref_options(CLI::App* cmd, Options& o)
{
    cmd->add_option("--class", o.class_name, "Focal class, qualified or simple name");
    cmd->add_option("--method", o.method, "Focal method name");
    cmd->add_option("--arity", o.arity, "Parameter count, to pick one overload");
    cmd->add_option("--path", o.path, "Source file of the class, relative to the project root");
}

void add_project_options(CLI::App* cmd, Options& o)
{
    cmd->add_option("--project", o.project, "Project root directory");
    cmd->add_option("--builtins", o.builtins, "Builtin signature table (defaults to the bundled one)");
    cmd->add_option("--ignore", o.ignore, "Directory names to skip (repeatable)");
    cmd->add_option("--jobs", o.jobs, "Parallel workers")->check(CLI::PositiveNumber);
}

void add_backend_options(CLI::App* cmd, Options& o)
{
    cmd->add_option("--backend", o.backend, "echo, contextual, replay or remote");
    cmd->add_option("--threshold", o.threshold, "Token threshold of the contextual backend");
    cmd->add_option("--replay-file", o.replay_file, "Replay records for the replay backend");
    cmd->add_option("--config", o.config, "JSON config file");
    cmd->add_option("--output-dir", o.output_dir, "Run directory (default runs/latest)");
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Focal-method context extraction, prompt building and test generation"};
    app.require_subcommand(1);
    Options o;

    CLI::App* analyze = app.add_subcommand("analyze", "Parse a project and summarize it");
    add_project_options(analyze, o);
    analyze->add_option("--index-cache", o.index_cache, "JSON cache of per-file counts, keyed by content hash");

    CLI::App* context = app.add_subcommand("context", "Print the static-analysis context of a focal method");
    add_project_options(context, o);
    add_ref_options(context, o);

    CLI::App* prompt = app.add_subcommand("prompt", "Print the prompt for a focal method");
    add_project_options(prompt, o);
    add_ref_options(prompt, o);
    prompt->add_option("--strategy", o.strategy, "ours or baseline");
    prompt->add_option("--tokenizer", o.tokenizer, "Token counting scheme");
    prompt->add_option("--format", o.format, "text or json");

    CLI::App* generate = app.add_subcommand("generate", "Generate tests and write a run directory");
    add_project_options(generate, o);
    add_ref_options(generate, o);
    add_backend_options(generate, o);
    generate->add_option("--corpus", o.corpus, "Corpus file");
    generate->add_option("--strategy", o.strategy, "ours or baseline");
    generate->add_option("--tokenizer", o.tokenizer, "Token counting scheme");

    CLI::App* evaluate = app.add_subcommand("evaluate", "Run both strategies over a corpus and print the report");
    add_project_options(evaluate, o);
    add_backend_options(evaluate, o);
    evaluate->add_option("--corpus", o.corpus, "Corpus file");
    evaluate->add_option("--format", o.format, "text, csv or json");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitUserError;
    }

    try {
        if (analyze->parsed()) {
            return cmd_analyze(o, out, err);
        }
        if (context->parsed()) {
            return cmd_context(o, out, err);
        }
        if (prompt->parsed()) {
            return cmd_prompt(o, out, err);
        }
        if (generate->parsed()) {
            return cmd_generate(o, out, err);
        }
        if (evaluate->parsed()) {
            return cmd_evaluate(o, out, err);
        }
    } catch (const AmbiguityError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUserError;
    } catch (const LookupError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUserError;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUserError;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUserError;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kExitInternalError;
    }
    return kExitInternalError;
}

} // namespace focalctx
