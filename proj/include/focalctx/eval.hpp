#pragma once

#include "focalctx/context.hpp"
#include "focalctx/gateway.hpp"
#include "focalctx/harvest.hpp"
#include "focalctx/prompt.hpp"

#include <json.hpp>

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace focalctx {

inline constexpr int kReportSchemaVersion = 1;

struct CorpusEntry {
    FocalMethodRef focal;
    std::vector<std::string> tags;

    bool operator==(const CorpusEntry&) const = default;
};

/// Lines "path<TAB>class<TAB>method<TAB>arity<TAB>tags"; tags are
/// comma-separated and optional, arity "-" means any. '#' starts a comment
/// line. Throws ConfigError citing the line number.
std::vector<CorpusEntry> parse_corpus(std::string_view text);
std::vector<CorpusEntry> load_corpus(const std::filesystem::path& path);

struct BackendConfig {
    /// "echo", "contextual", "replay" or "remote".
    std::string kind = "contextual";
    long long threshold = 1023;
    std::filesystem::path replay_file;
    RemoteConfig remote;

    bool operator==(const BackendConfig& o) const
    {
        return kind == o.kind && threshold == o.threshold && replay_file == o.replay_file &&
               remote.url == o.remote.url && remote.path == o.remote.path &&
               remote.auth_header == o.remote.auth_header && remote.auth_prefix == o.remote.auth_prefix &&
               remote.auth_env == o.remote.auth_env;
    }
};

/// Builds the backend a config names. Throws ConfigError.
std::shared_ptr<Backend> make_backend(const BackendConfig& config);

enum class StdDevKind { Sample, Population };

struct EvalConfig {
    std::filesystem::path project_root;
    std::filesystem::path corpus;
    std::vector<Strategy> strategies = {Strategy::Baseline, Strategy::Ours};
    BackendConfig backend;
    GenerationConfig generation;
    RetryPolicy retry;
    std::string tokenizer{kDefaultTokenizer};
    double regurgitation_threshold = kDefaultRegurgitationThreshold;
    std::filesystem::path output_dir;
    std::filesystem::path builtins;
    std::vector<std::string> ignore_dirs = {"target", "build", "out"};
    unsigned jobs = 1;
    std::size_t max_in_flight = 1;
    StdDevKind std_dev = StdDevKind::Sample;

    void validate() const;
    bool operator==(const EvalConfig&) const = default;
};

/// Reads the JSON config; relative paths resolve against `base_dir`. Unknown
/// keys are rejected. "project" and "corpus" may be left to command-line flags.
EvalConfig parse_eval_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);
EvalConfig load_eval_config(const std::filesystem::path& path);
/// Snapshot with every key spelled out; paths as given.
nlohmann::json to_json(const EvalConfig& config);

struct GenerationRecord {
    CorpusEntry entry;
    std::size_t entry_index = 0;
    Strategy strategy = Strategy::Ours;
    /// Untruncated prompt size.
    std::size_t prompt_tokens = 0;
    bool truncated = false;
    double latency = 0.0;
    HarvestOutcome outcome;
    /// sha256 of the raw reply; empty when the backend failed.
    std::string raw_response_ref;
    std::string backend_id;
    std::optional<std::string> error;

    bool operator==(const GenerationRecord&) const = default;
};

struct SkippedEntry {
    CorpusEntry entry;
    std::size_t entry_index = 0;
    std::string reason;

    bool operator==(const SkippedEntry&) const = default;
};

struct Stats {
    double mean = 0.0;
    double std_dev = 0.0;
    double median = 0.0;

    bool operator==(const Stats&) const = default;
};

/// Mean, standard deviation and lower-middle median. Empty input gives zeros.
Stats compute_stats(std::vector<double> values, StdDevKind kind = StdDevKind::Sample);

struct StrategySummary {
    Strategy strategy = Strategy::Ours;
    std::size_t total_methods = 0;
    std::size_t methods_with_tests = 0;
    std::size_t regurgitation = 0;
    std::size_t no_test = 0;
    std::size_t truncated = 0;
    std::size_t test_methods = 0;
    std::size_t assertions = 0;
    Stats tokens;
    Stats time;

    bool operator==(const StrategySummary&) const = default;
};

struct EvaluationReport {
    int schema_version = kReportSchemaVersion;
    std::string backend_id;
    std::string model_id;
    std::string tokenizer;
    double regurgitation_threshold = kDefaultRegurgitationThreshold;
    StdDevKind std_dev = StdDevKind::Sample;
    /// Baseline first, then Ours; only strategies that have records.
    std::vector<StrategySummary> strategies;
    std::vector<GenerationRecord> records;
    std::vector<SkippedEntry> skipped;

    bool operator==(const EvaluationReport&) const = default;
};

/// Aggregates records per strategy. Throws ConfigError for an empty list.
EvaluationReport summarize(std::vector<GenerationRecord> records, StdDevKind kind = StdDevKind::Sample);

struct EvaluationRun {
    EvaluationReport report;
    /// Raw replies by sha256.
    std::map<std::string, std::string> responses;
    /// Per-record measured wall-clock seconds (prompt building, backend call),
    /// in record order. Kept out of the report so it stays deterministic.
    std::vector<std::pair<double, double>> wall_times;
};

/// Runs every corpus entry through every configured strategy. Throws
/// ConfigError for an empty corpus or bad config.
EvaluationRun run_evaluation(const EvalConfig& config);
/// Same, with an explicit backend instead of the configured one.
EvaluationRun run_evaluation(const EvalConfig& config, std::shared_ptr<Backend> backend);
/// Same, over explicit entries; `config.corpus` is not read.
EvaluationRun run_evaluation(const EvalConfig& config, const std::vector<CorpusEntry>& corpus,
                             std::shared_ptr<Backend> backend);

enum class ReportFormat { Text, Csv, Json };

/// "text" (alias "table-text"), "csv" or "json"; throws ConfigError.
ReportFormat parse_report_format(std::string_view text);

std::string render_report(const EvaluationReport& report, ReportFormat format);

nlohmann::json report_to_json(const EvaluationReport& report);
/// Throws ConfigError on a document that is not a report.
EvaluationReport report_from_json(const nlohmann::json& doc);

/// One JSON object per record, newline-terminated.
std::string render_records_jsonl(const EvaluationReport& report);

/// Relative paths of harvested test files ("tests/<n>-<Class>.<method>/<strategy>/<Name>.java") and their contents.
std::map<std::string, std::string> harvested_files(const EvaluationReport& report);

/// Writes config.json, records.jsonl, responses/, tests/, report.{txt,csv,json}
/// and run_metadata.json (the only file with timestamps) under `dir`.
void write_run_directory(const std::filesystem::path& dir, const EvalConfig& config, const EvaluationRun& run);

} // namespace focalctx
