#include "focalctx/eval.hpp"

#include "focalctx/errors.hpp"
#include "focalctx/hashing.hpp"
#include "focalctx/parser.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

namespace focalctx {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::vector<std::string_view> split(std::string_view text, char sep)
{
    std::vector<std::string_view> parts;
    std::size_t pos = 0;
    while (true) {
        const std::size_t at = text.find(sep, pos);
        parts.push_back(text.substr(pos, at == std::string_view::npos ? at : at - pos));
        if (at == std::string_view::npos) {
            return parts;
        }
        pos = at + 1;
    }
}

std::string_view trim(std::string_view s)
{
    const std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string read_file(const fs::path& path, std::string_view what)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read " + std::string(what) + " " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, std::string_view content)
{
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
}

std::string fixed(double value, int digits)
{
    std::ostringstream out;
    out << std::fixed << std::setprecision(digits) << value;
    return out.str();
}

std::string_view to_string(StdDevKind kind)
{
    return kind == StdDevKind::Sample ? "sample" : "population";
}

StdDevKind parse_std_dev(std::string_view text)
{
    if (text == "sample") {
        return StdDevKind::Sample;
    }
    if (text == "population") {
        return StdDevKind::Population;
    }
    throw ConfigError("std_dev must be \"sample\" or \"population\"");
}

fs::path resolve_path(const fs::path& base, const std::string& value)
{
    const fs::path p(value);
    if (p.empty() || p.is_absolute()) {
        return p;
    }
    return (base / p).lexically_normal();
}

void reject_unknown(const json& obj, std::initializer_list<std::string_view> known, std::string_view where)
{
    if (!obj.is_object()) {
        throw ConfigError(std::string(where) + " must be a JSON object");
    }
    for (const auto& [key, value] : obj.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw ConfigError("unknown key '" + key + "' in " + std::string(where));
        }
    }
}

std::vector<Strategy> normalized(std::vector<Strategy> strategies)
{
    std::sort(strategies.begin(), strategies.end());
    strategies.erase(std::unique(strategies.begin(), strategies.end()), strategies.end());
    return strategies;
}

} // namespace

std::vector<CorpusEntry> parse_corpus(std::string_view text)
{
    std::vector<CorpusEntry> entries;
    int line_no = 0;
    for (std::string_view raw : split(text, '\n')) {
        ++line_no;
        const std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const std::vector<std::string_view> fields = split(raw.ends_with('\r') ? raw.substr(0, raw.size() - 1) : raw, '\t');
        const std::string where = "corpus line " + std::to_string(line_no);
        if (fields.size() < 3 || fields.size() > 5) {
            throw ConfigError(where + ": expected path, class, method, arity and tags separated by tabs");
        }
        CorpusEntry e;
        e.focal.unit_path = std::string(trim(fields[0]));
        e.focal.class_name = std::string(trim(fields[1]));
        e.focal.method_name = std::string(trim(fields[2]));
        if (e.focal.class_name.empty() || e.focal.method_name.empty()) {
            throw ConfigError(where + ": class and method are required");
        }
        if (fields.size() > 3) {
            const std::string_view arity = trim(fields[3]);
            if (!arity.empty() && arity != "-") {
                std::size_t value = 0;
                const auto [end, ec] = std::from_chars(arity.data(), arity.data() + arity.size(), value);
                if (ec != std::errc() || end != arity.data() + arity.size()) {
                    throw ConfigError(where + ": arity must be a non-negative integer or '-'");
                }
                e.focal.arity = value;
            }
        }
        if (fields.size() > 4) {
            for (std::string_view tag : split(fields[4], ',')) {
                if (!trim(tag).empty()) {
                    e.tags.emplace_back(trim(tag));
                }
            }
        }
        entries.push_back(std::move(e));
    }
    return entries;
}

std::vector<CorpusEntry> load_corpus(const fs::path& path)
{
    return parse_corpus(read_file(path, "corpus"));
}

std::shared_ptr<Backend> make_backend(const BackendConfig& config)
{
    if (config.kind == "echo") {
        return make_echo_backend();
    }
    if (config.kind == "contextual") {
        return mock_contextual_backend(ContextualProfile{config.threshold});
    }
    if (config.kind == "replay") {
        if (config.replay_file.empty()) {
            throw ConfigError("replay backend needs backend.replay_file");
        }
        return make_replay_backend(load_replay(config.replay_file));
    }
    if (config.kind == "remote") {
        return make_remote_backend(config.remote);
    }
    throw ConfigError("unknown backend '" + config.kind + "' (expected echo, contextual, replay or remote)");
}

void EvalConfig::validate() const
{
    if (strategies.empty()) {
        throw ConfigError("config needs at least one strategy");
    }
    if (!(regurgitation_threshold > 0.0 && regurgitation_threshold <= 1.0)) {
        throw ConfigError("regurgitation_threshold must be in (0, 1]");
    }
    if (jobs == 0) {
        throw ConfigError("jobs must be >= 1");
    }
    if (max_in_flight == 0) {
        throw ConfigError("max_in_flight must be >= 1");
    }
    generation.validate();
    retry.validate();
    require_tokenizer(tokenizer);
    if (backend.kind == "contextual") {
        ContextualProfile{backend.threshold}.validate();
    }
}

EvalConfig parse_eval_config(const json& doc, const fs::path& base_dir)
{
    EvalConfig cfg;
    try {
        reject_unknown(doc,
                       {"project", "corpus", "strategies", "backend", "generation", "retry", "tokenizer",
                        "regurgitation_threshold", "output_dir", "builtins", "ignore_dirs", "jobs",
                        "max_in_flight", "std_dev"},
                       "config");
        if (doc.contains("project")) {
            cfg.project_root = resolve_path(base_dir, doc.at("project").get<std::string>());
        }
        if (doc.contains("corpus")) {
            cfg.corpus = resolve_path(base_dir, doc.at("corpus").get<std::string>());
        }
        if (doc.contains("strategies")) {
            cfg.strategies.clear();
            for (const json& s : doc.at("strategies")) {
                cfg.strategies.push_back(parse_strategy(s.get<std::string>()));
            }
        }
        if (doc.contains("backend")) {
            const json& b = doc.at("backend");
            reject_unknown(b, {"kind", "threshold", "replay_file", "url", "path", "auth_header", "auth_prefix", "auth_env"},
                           "backend");
            cfg.backend.kind = b.value("kind", cfg.backend.kind);
            cfg.backend.threshold = b.value("threshold", cfg.backend.threshold);
            if (b.contains("replay_file")) {
                cfg.backend.replay_file = resolve_path(base_dir, b.at("replay_file").get<std::string>());
            }
            cfg.backend.remote.url = b.value("url", cfg.backend.remote.url);
            cfg.backend.remote.path = b.value("path", cfg.backend.remote.path);
            cfg.backend.remote.auth_header = b.value("auth_header", cfg.backend.remote.auth_header);
            cfg.backend.remote.auth_prefix = b.value("auth_prefix", cfg.backend.remote.auth_prefix);
            cfg.backend.remote.auth_env = b.value("auth_env", cfg.backend.remote.auth_env);
        }
        if (doc.contains("generation")) {
            const json& g = doc.at("generation");
            reject_unknown(g, {"model_id", "max_input_tokens", "context_length", "temperature", "top_k", "top_p",
                               "request_timeout", "truncation"},
                           "generation");
            GenerationConfig& gen = cfg.generation;
            gen.model_id = g.value("model_id", gen.model_id);
            gen.max_input_tokens = g.value("max_input_tokens", gen.max_input_tokens);
            gen.context_length = g.value("context_length", gen.context_length);
            gen.temperature = g.value("temperature", gen.temperature);
            gen.top_k = g.value("top_k", gen.top_k);
            gen.top_p = g.value("top_p", gen.top_p);
            gen.request_timeout = g.value("request_timeout", gen.request_timeout);
            if (g.contains("truncation")) {
                gen.truncation = parse_truncation_mode(g.at("truncation").get<std::string>());
            }
        }
        if (doc.contains("retry")) {
            const json& r = doc.at("retry");
            reject_unknown(r, {"max_retries", "initial_backoff"}, "retry");
            cfg.retry.max_retries = r.value("max_retries", cfg.retry.max_retries);
            cfg.retry.initial_backoff = r.value("initial_backoff", cfg.retry.initial_backoff);
        }
        cfg.tokenizer = doc.value("tokenizer", cfg.tokenizer);
        cfg.regurgitation_threshold = doc.value("regurgitation_threshold", cfg.regurgitation_threshold);
        if (doc.contains("output_dir")) {
            cfg.output_dir = resolve_path(base_dir, doc.at("output_dir").get<std::string>());
        }
        if (doc.contains("builtins")) {
            cfg.builtins = resolve_path(base_dir, doc.at("builtins").get<std::string>());
        }
        if (doc.contains("ignore_dirs")) {
            cfg.ignore_dirs = doc.at("ignore_dirs").get<std::vector<std::string>>();
        }
        const long long jobs = doc.value("jobs", 1LL);
        if (jobs < 1) {
            throw ConfigError("jobs must be >= 1");
        }
        cfg.jobs = static_cast<unsigned>(jobs);
        const long long in_flight = doc.value("max_in_flight", 1LL);
        if (in_flight < 1) {
            throw ConfigError("max_in_flight must be >= 1");
        }
        cfg.max_in_flight = static_cast<std::size_t>(in_flight);
        if (doc.contains("std_dev")) {
            cfg.std_dev = parse_std_dev(doc.at("std_dev").get<std::string>());
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

EvalConfig load_eval_config(const fs::path& path)
{
    const std::string text = read_file(path, "config");
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    }
    return parse_eval_config(doc, path.parent_path().empty() ? fs::path(".") : path.parent_path());
}

json to_json(const EvalConfig& cfg)
{
    json doc;
    doc["project"] = cfg.project_root.string();
    doc["corpus"] = cfg.corpus.string();
    doc["strategies"] = json::array();
    for (Strategy s : cfg.strategies) {
        doc["strategies"].push_back(std::string(to_string(s)));
    }
    doc["backend"] = {{"kind", cfg.backend.kind},
                      {"threshold", cfg.backend.threshold},
                      {"replay_file", cfg.backend.replay_file.string()},
                      {"url", cfg.backend.remote.url},
                      {"path", cfg.backend.remote.path},
                      {"auth_header", cfg.backend.remote.auth_header},
                      {"auth_prefix", cfg.backend.remote.auth_prefix},
                      {"auth_env", cfg.backend.remote.auth_env}};
    doc["generation"] = {{"model_id", cfg.generation.model_id},
                         {"max_input_tokens", cfg.generation.max_input_tokens},
                         {"context_length", cfg.generation.context_length},
                         {"temperature", cfg.generation.temperature},
                         {"top_k", cfg.generation.top_k},
                         {"top_p", cfg.generation.top_p},
                         {"request_timeout", cfg.generation.request_timeout},
                         {"truncation", std::string(to_string(cfg.generation.truncation))}};
    doc["retry"] = {{"max_retries", cfg.retry.max_retries}, {"initial_backoff", cfg.retry.initial_backoff}};
    doc["tokenizer"] = cfg.tokenizer;
    doc["regurgitation_threshold"] = cfg.regurgitation_threshold;
    doc["output_dir"] = cfg.output_dir.string();
    doc["builtins"] = cfg.builtins.string();
    doc["ignore_dirs"] = cfg.ignore_dirs;
    doc["jobs"] = cfg.jobs;
    doc["max_in_flight"] = cfg.max_in_flight;
    doc["std_dev"] = std::string(to_string(cfg.std_dev));
    return doc;
}

Stats compute_stats(std::vector<double> values, StdDevKind kind)
{
    Stats s;
    if (values.empty()) {
        return s;
    }
    const double n = static_cast<double>(values.size());
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    s.mean = sum / n;
    double squares = 0.0;
    for (double v : values) {
        squares += (v - s.mean) * (v - s.mean);
    }
    if (kind == StdDevKind::Population) {
        s.std_dev = std::sqrt(squares / n);
    } else if (values.size() > 1) {
        s.std_dev = std::sqrt(squares / (n - 1.0));
    }
    std::sort(values.begin(), values.end());
    s.median = values[(values.size() - 1) / 2];
    return s;
}

namespace {

EvaluationReport aggregate(std::vector<GenerationRecord> records, StdDevKind kind)
{
    std::stable_sort(records.begin(), records.end(), [](const GenerationRecord& a, const GenerationRecord& b) {
        return std::tie(a.entry_index, a.strategy) < std::tie(b.entry_index, b.strategy);
    });
    EvaluationReport report;
    report.std_dev = kind;
    for (Strategy strategy : {Strategy::Baseline, Strategy::Ours}) {
        StrategySummary sum;
        sum.strategy = strategy;
        std::vector<double> tokens;
        std::vector<double> times;
        for (const GenerationRecord& r : records) {
            if (r.strategy != strategy) {
                continue;
            }
            ++sum.total_methods;
            switch (r.outcome.classification) {
            case Classification::TestsGenerated:
                ++sum.methods_with_tests;
                break;
            case Classification::Regurgitation:
                ++sum.regurgitation;
                break;
            case Classification::NoTest:
                ++sum.no_test;
                break;
            }
            sum.truncated += r.truncated ? 1 : 0;
            sum.test_methods += r.outcome.test_method_count;
            sum.assertions += r.outcome.assertion_count;
            tokens.push_back(static_cast<double>(r.prompt_tokens));
            times.push_back(r.latency);
        }
        if (sum.total_methods == 0) {
            continue;
        }
        sum.tokens = compute_stats(std::move(tokens), kind);
        sum.time = compute_stats(std::move(times), kind);
        report.strategies.push_back(sum);
    }
    report.records = std::move(records);
    return report;
}

struct Task {
    std::size_t entry_index;
    LocatedMethod located;
    Strategy strategy;
};

} // namespace

EvaluationReport summarize(std::vector<GenerationRecord> records, StdDevKind kind)
{
    if (records.empty()) {
        throw ConfigError("cannot summarize an empty record list");
    }
    return aggregate(std::move(records), kind);
}

EvaluationRun run_evaluation(const EvalConfig& config)
{
    config.validate();
    if (config.corpus.empty()) {
        throw ConfigError("config needs a corpus");
    }
    return run_evaluation(config, make_backend(config.backend));
}

EvaluationRun run_evaluation(const EvalConfig& config, std::shared_ptr<Backend> backend)
{
    if (config.corpus.empty()) {
        throw ConfigError("config needs a corpus");
    }
    return run_evaluation(config, load_corpus(config.corpus), std::move(backend));
}

EvaluationRun run_evaluation(const EvalConfig& config, const std::vector<CorpusEntry>& corpus,
                             std::shared_ptr<Backend> backend)
{
    config.validate();
    if (config.project_root.empty()) {
        throw ConfigError("config needs a project root");
    }
    if (corpus.empty()) {
        throw ConfigError("corpus has no entries");
    }
    ProjectParseOptions parse_options;
    parse_options.ignore_dirs = config.ignore_dirs;
    parse_options.jobs = config.jobs;
    ProjectParse parsed = parse_project(config.project_root, parse_options);
    const ProjectIndex index = config.builtins.empty()
                                   ? build_index(std::move(parsed.units), default_builtin_table_path())
                                   : build_index(std::move(parsed.units), config.builtins);

    EvaluationRun run;
    std::vector<Task> tasks;
    const std::vector<Strategy> strategies = normalized(config.strategies);
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        LocatedMethod located;
        try {
            located = locate_method(index, corpus[i].focal);
        } catch (const LookupError& e) {
            run.report.skipped.push_back({corpus[i], i, e.what()});
            continue;
        } catch (const AmbiguityError& e) {
            run.report.skipped.push_back({corpus[i], i, e.what()});
            continue;
        }
        if (located.method->partial) {
            run.report.skipped.push_back({corpus[i], i, "method body was only partially parsed"});
            continue;
        }
        if (!located.method->body_source) {
            run.report.skipped.push_back({corpus[i], i, "method has no body"});
            continue;
        }
        for (Strategy s : strategies) {
            tasks.push_back({i, located, s});
        }
    }

    Gateway gateway(std::move(backend), config.generation, config.retry, config.max_in_flight);
    std::vector<GenerationRecord> records(tasks.size());
    std::vector<std::string> raw(tasks.size());
    run.wall_times.assign(tasks.size(), {0.0, 0.0});
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr failure;

    auto worker = [&] {
        while (true) {
            const std::size_t t = next.fetch_add(1);
            if (t >= tasks.size()) {
                return;
            }
            try {
                const Task& task = tasks[t];
                const CorpusEntry& entry = corpus[task.entry_index];
                const auto start = std::chrono::steady_clock::now();
                const PromptArtifact prompt =
                    task.strategy == Strategy::Ours
                        ? build_ours(extract_context(index, task.located), entry.focal, config.tokenizer)
                        : build_baseline(task.located, entry.focal, config.tokenizer);
                const double build_seconds =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
                const CompletionResult result = gateway.complete(prompt);

                GenerationRecord& rec = records[t];
                rec.entry = entry;
                rec.entry_index = task.entry_index;
                rec.strategy = task.strategy;
                rec.prompt_tokens = prompt.token_count;
                rec.truncated = result.truncated_input;
                rec.latency = result.latency;
                rec.backend_id = result.backend_id;
                if (result.raw_text) {
                    rec.outcome = harvest(*result.raw_text, prompt, config.regurgitation_threshold);
                    rec.raw_response_ref = sha256_hex(*result.raw_text);
                    raw[t] = *result.raw_text;
                } else {
                    rec.error = result.error->kind + ": " + result.error->message;
                    rec.outcome.classification = Classification::NoTest;
                    rec.outcome.evidence = "backend error after " + std::to_string(result.attempts) +
                                           " attempt(s): " + result.error->message;
                }
                run.wall_times[t] = {build_seconds, result.wall_seconds};
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next.store(tasks.size());
                return;
            }
        }
    };
    const unsigned workers = std::max(1u, std::min<unsigned>(config.jobs, static_cast<unsigned>(tasks.size())));
    std::vector<std::thread> threads;
    for (unsigned w = 1; w < workers; ++w) {
        threads.emplace_back(worker);
    }
    worker();
    for (std::thread& th : threads) {
        th.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    for (std::size_t t = 0; t < tasks.size(); ++t) {
        if (!records[t].raw_response_ref.empty()) {
            run.responses[records[t].raw_response_ref] = raw[t];
        }
    }
    std::vector<SkippedEntry> skipped = std::move(run.report.skipped);
    run.report = aggregate(std::move(records), config.std_dev);
    run.report.skipped = std::move(skipped);
    run.report.backend_id = gateway.backend_id();
    run.report.model_id = config.generation.model_id;
    run.report.tokenizer = config.tokenizer;
    run.report.regurgitation_threshold = config.regurgitation_threshold;
    return run;
}

ReportFormat parse_report_format(std::string_view text)
{
    if (text == "text" || text == "table-text") {
        return ReportFormat::Text;
    }
    if (text == "csv") {
        return ReportFormat::Csv;
    }
    if (text == "json") {
        return ReportFormat::Json;
    }
    throw ConfigError("unknown report format '" + std::string(text) + "' (expected text, csv or json)");
}

namespace {

// Left-aligned first column, right-aligned others.
std::string render_table(const std::vector<std::vector<std::string>>& rows)
{
    std::vector<std::size_t> widths;
    for (const auto& row : rows) {
        widths.resize(std::max(widths.size(), row.size()), 0);
        for (std::size_t c = 0; c < row.size(); ++c) {
            widths[c] = std::max(widths[c], row[c].size());
        }
    }
    std::ostringstream out;
    for (const auto& row : rows) {
        std::string line;
        for (std::size_t c = 0; c < row.size(); ++c) {
            const std::size_t pad = widths[c] - row[c].size();
            if (c == 0) {
                line += row[c] + std::string(pad, ' ');
            } else {
                line += "  " + std::string(pad, ' ') + row[c];
            }
        }
        out << line << '\n';
    }
    return out.str();
}

std::string render_text(const EvaluationReport& r)
{
    std::ostringstream out;
    out << "Unit test generation report\n";
    out << "Backend: " << r.backend_id << "  Model: " << r.model_id << '\n';
    out << "Tokenizer: " << r.tokenizer << "  Regurgitation threshold: " << fixed(r.regurgitation_threshold, 2)
        << '\n';
    out << "Std. Dev.: " << (r.std_dev == StdDevKind::Sample ? "sample (n-1)" : "population (n)")
        << "  Median: lower middle for even counts\n\n";

    out << "For how many were unit tests generated?\n";
    std::vector<std::vector<std::string>> rows = {{"Strategy", r.model_id}};
    for (const StrategySummary& s : r.strategies) {
        rows.push_back({std::string(display_name(s.strategy)),
                        std::to_string(s.methods_with_tests) + "/" + std::to_string(s.total_methods)});
    }
    out << render_table(rows) << '\n';

    out << "Outcome breakdown\n";
    rows = {{"Strategy", "Total", "Tests generated", "Regurgitation", "No test", "Truncated", "Test methods",
             "Assertions"}};
    for (const StrategySummary& s : r.strategies) {
        rows.push_back({std::string(display_name(s.strategy)), std::to_string(s.total_methods),
                        std::to_string(s.methods_with_tests), std::to_string(s.regurgitation),
                        std::to_string(s.no_test), std::to_string(s.truncated), std::to_string(s.test_methods),
                        std::to_string(s.assertions)});
    }
    out << render_table(rows) << '\n';

    out << "Tokens in input\n";
    rows = {{"Strategy", "Mean", "Std. Dev.", "Median"}};
    for (const StrategySummary& s : r.strategies) {
        rows.push_back({std::string(display_name(s.strategy)), fixed(s.tokens.mean, 2), fixed(s.tokens.std_dev, 2),
                        fixed(s.tokens.median, 2)});
    }
    out << render_table(rows) << '\n';

    out << "Time Taken in Seconds (model latency)\n";
    rows = {{"Strategy", "Mean", "Std. Dev.", "Median"}};
    for (const StrategySummary& s : r.strategies) {
        rows.push_back({std::string(display_name(s.strategy)), fixed(s.time.mean, 3), fixed(s.time.std_dev, 3),
                        fixed(s.time.median, 3)});
    }
    out << render_table(rows) << '\n';

    out << "Skipped entries: " << r.skipped.size() << '\n';
    for (const SkippedEntry& s : r.skipped) {
        out << "  " << to_string(s.entry.focal) << ": " << s.reason << '\n';
    }
    return out.str();
}

std::string render_csv(const EvaluationReport& r)
{
    std::ostringstream out;
    out << "schema_version,strategy,backend,model,total_methods,methods_with_tests,regurgitation,no_test,"
           "truncated,test_methods,assertions,tokens_mean,tokens_std_dev,tokens_median,time_mean,time_std_dev,"
           "time_median\n";
    auto quoted = [](const std::string& s) {
        if (s.find_first_of(",\"\n") == std::string::npos) {
            return s;
        }
        std::string q = "\"";
        for (char c : s) {
            q += c == '"' ? std::string("\"\"") : std::string(1, c);
        }
        return q + "\"";
    };
    for (const StrategySummary& s : r.strategies) {
        out << r.schema_version << ',' << display_name(s.strategy) << ',' << quoted(r.backend_id) << ','
            << quoted(r.model_id) << ',' << s.total_methods << ',' << s.methods_with_tests << ','
            << s.regurgitation << ',' << s.no_test << ',' << s.truncated << ',' << s.test_methods << ','
            << s.assertions << ',' << fixed(s.tokens.mean, 4) << ',' << fixed(s.tokens.std_dev, 4) << ','
            << fixed(s.tokens.median, 4) << ',' << fixed(s.time.mean, 6) << ',' << fixed(s.time.std_dev, 6) << ','
            << fixed(s.time.median, 6) << '\n';
    }
    return out.str();
}

json entry_to_json(const CorpusEntry& e)
{
    json j;
    j["path"] = e.focal.unit_path;
    j["class"] = e.focal.class_name;
    j["method"] = e.focal.method_name;
    j["arity"] = e.focal.arity ? json(*e.focal.arity) : json(nullptr);
    j["tags"] = e.tags;
    return j;
}

CorpusEntry entry_from_json(const json& j)
{
    CorpusEntry e;
    e.focal.unit_path = j.at("path").get<std::string>();
    e.focal.class_name = j.at("class").get<std::string>();
    e.focal.method_name = j.at("method").get<std::string>();
    if (!j.at("arity").is_null()) {
        e.focal.arity = j.at("arity").get<std::size_t>();
    }
    e.tags = j.at("tags").get<std::vector<std::string>>();
    return e;
}

json stats_to_json(const Stats& s)
{
    return {{"mean", s.mean}, {"std_dev", s.std_dev}, {"median", s.median}};
}

Stats stats_from_json(const json& j)
{
    return {j.at("mean").get<double>(), j.at("std_dev").get<double>(), j.at("median").get<double>()};
}

json record_to_json(const GenerationRecord& r)
{
    json j;
    j["entry_index"] = r.entry_index;
    j["entry"] = entry_to_json(r.entry);
    j["strategy"] = std::string(to_string(r.strategy));
    j["prompt_tokens"] = r.prompt_tokens;
    j["truncated"] = r.truncated;
    j["latency"] = r.latency;
    j["backend"] = r.backend_id;
    j["raw_response_ref"] = r.raw_response_ref;
    j["error"] = r.error ? json(*r.error) : json(nullptr);
    j["outcome"] = {{"classification", std::string(to_string(r.outcome.classification))},
                    {"test_method_count", r.outcome.test_method_count},
                    {"assertion_count", r.outcome.assertion_count},
                    {"test_class_names", r.outcome.test_class_names},
                    {"test_units", r.outcome.test_units},
                    {"evidence", r.outcome.evidence}};
    return j;
}

GenerationRecord record_from_json(const json& j)
{
    GenerationRecord r;
    r.entry_index = j.at("entry_index").get<std::size_t>();
    r.entry = entry_from_json(j.at("entry"));
    r.strategy = parse_strategy(j.at("strategy").get<std::string>());
    r.prompt_tokens = j.at("prompt_tokens").get<std::size_t>();
    r.truncated = j.at("truncated").get<bool>();
    r.latency = j.at("latency").get<double>();
    r.backend_id = j.at("backend").get<std::string>();
    r.raw_response_ref = j.at("raw_response_ref").get<std::string>();
    if (!j.at("error").is_null()) {
        r.error = j.at("error").get<std::string>();
    }
    const json& o = j.at("outcome");
    r.outcome.classification = parse_classification(o.at("classification").get<std::string>());
    r.outcome.test_method_count = o.at("test_method_count").get<std::size_t>();
    r.outcome.assertion_count = o.at("assertion_count").get<std::size_t>();
    r.outcome.test_class_names = o.at("test_class_names").get<std::vector<std::string>>();
    r.outcome.test_units = o.at("test_units").get<std::vector<std::string>>();
    r.outcome.evidence = o.at("evidence").get<std::string>();
    return r;
}

std::string dump(const json& j, int indent)
{
    return j.dump(indent, ' ', false, json::error_handler_t::replace);
}

} // namespace

json report_to_json(const EvaluationReport& r)
{
    json doc;
    doc["schema_version"] = r.schema_version;
    doc["backend"] = r.backend_id;
    doc["model_id"] = r.model_id;
    doc["tokenizer"] = r.tokenizer;
    doc["regurgitation_threshold"] = r.regurgitation_threshold;
    doc["std_dev"] = std::string(to_string(r.std_dev));
    doc["strategies"] = json::array();
    for (const StrategySummary& s : r.strategies) {
        doc["strategies"].push_back({{"strategy", std::string(to_string(s.strategy))},
                                     {"total_methods", s.total_methods},
                                     {"methods_with_tests", s.methods_with_tests},
                                     {"regurgitation", s.regurgitation},
                                     {"no_test", s.no_test},
                                     {"truncated", s.truncated},
                                     {"test_methods", s.test_methods},
                                     {"assertions", s.assertions},
                                     {"tokens", stats_to_json(s.tokens)},
                                     {"time", stats_to_json(s.time)}});
    }
    doc["records"] = json::array();
    for (const GenerationRecord& rec : r.records) {
        doc["records"].push_back(record_to_json(rec));
    }
    doc["skipped"] = json::array();
    for (const SkippedEntry& s : r.skipped) {
        doc["skipped"].push_back(
            {{"entry_index", s.entry_index}, {"entry", entry_to_json(s.entry)}, {"reason", s.reason}});
    }
    return doc;
}

EvaluationReport report_from_json(const json& doc)
{
    try {
        EvaluationReport r;
        r.schema_version = doc.at("schema_version").get<int>();
        if (r.schema_version != kReportSchemaVersion) {
            throw ConfigError("unsupported report schema_version " + std::to_string(r.schema_version));
        }
        r.backend_id = doc.at("backend").get<std::string>();
        r.model_id = doc.at("model_id").get<std::string>();
        r.tokenizer = doc.at("tokenizer").get<std::string>();
        r.regurgitation_threshold = doc.at("regurgitation_threshold").get<double>();
        r.std_dev = parse_std_dev(doc.at("std_dev").get<std::string>());
        for (const json& s : doc.at("strategies")) {
            StrategySummary sum;
            sum.strategy = parse_strategy(s.at("strategy").get<std::string>());
            sum.total_methods = s.at("total_methods").get<std::size_t>();
            sum.methods_with_tests = s.at("methods_with_tests").get<std::size_t>();
            sum.regurgitation = s.at("regurgitation").get<std::size_t>();
            sum.no_test = s.at("no_test").get<std::size_t>();
            sum.truncated = s.at("truncated").get<std::size_t>();
            sum.test_methods = s.at("test_methods").get<std::size_t>();
            sum.assertions = s.at("assertions").get<std::size_t>();
            sum.tokens = stats_from_json(s.at("tokens"));
            sum.time = stats_from_json(s.at("time"));
            r.strategies.push_back(sum);
        }
        for (const json& rec : doc.at("records")) {
            r.records.push_back(record_from_json(rec));
        }
        for (const json& s : doc.at("skipped")) {
            r.skipped.push_back({entry_from_json(s.at("entry")), s.at("entry_index").get<std::size_t>(),
                                 s.at("reason").get<std::string>()});
        }
        return r;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("not a report document: ") + e.what());
    }
}

std::string render_report(const EvaluationReport& report, ReportFormat format)
{
    switch (format) {
    case ReportFormat::Text:
        return render_text(report);
    case ReportFormat::Csv:
        return render_csv(report);
    case ReportFormat::Json:
        return dump(report_to_json(report), 2) + "\n";
    }
    return {};
}

std::string render_records_jsonl(const EvaluationReport& report)
{
    std::string out;
    for (const GenerationRecord& r : report.records) {
        out += dump(record_to_json(r), -1);
        out += '\n';
    }
    return out;
}

std::map<std::string, std::string> harvested_files(const EvaluationReport& report)
{
    std::map<std::string, std::string> files;
    for (const GenerationRecord& r : report.records) {
        std::ostringstream dir;
        dir << "tests/" << std::setw(3) << std::setfill('0') << r.entry_index << '-'
            << simple_name_of(r.entry.focal.class_name) << '.' << r.entry.focal.method_name << '/'
            << to_string(r.strategy) << '/';
        for (std::size_t i = 0; i < r.outcome.test_units.size(); ++i) {
            std::string name = r.outcome.test_class_names[i];
            if (name.empty()) {
                name = "Harvested" + std::to_string(i + 1);
            }
            std::string path = dir.str() + name + ".java";
            if (files.count(path) != 0) {
                path = dir.str() + name + "_" + std::to_string(i + 1) + ".java";
            }
            std::string body = r.outcome.test_units[i];
            if (!body.empty() && body.back() != '\n') {
                body += '\n';
            }
            files[path] = std::move(body);
        }
    }
    return files;
}

void write_run_directory(const fs::path& dir, const EvalConfig& config, const EvaluationRun& run)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create run directory " + dir.string() + ": " + ec.message());
    }
    // Our own output subtrees from an earlier run in the same directory.
    fs::remove_all(dir / "responses", ec);
    fs::remove_all(dir / "tests", ec);

    write_file(dir / "config.json", dump(to_json(config), 2) + "\n");
    write_file(dir / "records.jsonl", render_records_jsonl(run.report));
    for (const auto& [sha, text] : run.responses) {
        write_file(dir / "responses" / (sha + ".txt"), text);
    }
    for (const auto& [rel, text] : harvested_files(run.report)) {
        write_file(dir / rel, text);
    }
    write_file(dir / "report.txt", render_report(run.report, ReportFormat::Text));
    write_file(dir / "report.csv", render_report(run.report, ReportFormat::Csv));
    write_file(dir / "report.json", render_report(run.report, ReportFormat::Json));

    json meta;
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    std::ostringstream stamp;
    stamp << std::put_time(&utc, "%Y-%m-%dT%H:%M:%SZ");
    meta["written_at"] = stamp.str();
    meta["records"] = json::array();
    for (std::size_t i = 0; i < run.report.records.size() && i < run.wall_times.size(); ++i) {
        const GenerationRecord& r = run.report.records[i];
        meta["records"].push_back({{"entry_index", r.entry_index},
                                   {"strategy", std::string(to_string(r.strategy))},
                                   {"prompt_build_seconds", run.wall_times[i].first},
                                   {"backend_wall_seconds", run.wall_times[i].second}});
    }
    write_file(dir / "run_metadata.json", dump(meta, 2) + "\n");
}

} // namespace focalctx
