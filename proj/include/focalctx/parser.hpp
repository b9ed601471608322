#pragma once

#include "focalctx/source_model.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace focalctx {

struct ParseDiagnostic {
    enum class Severity { Error, Warning };

    Severity severity = Severity::Error;
    std::string message;
    Position location;

    bool operator==(const ParseDiagnostic&) const = default;
};

struct ParseOptions {
    /// Tolerate unbalanced braces and unterminated comments by closing open
    /// declarations at end of input. Used for model output, which is often cut off.
    bool lenient = false;
};

struct ParseResult {
    CompilationUnitModel unit;
    std::vector<ParseDiagnostic> diagnostics;

    bool has_errors() const;
};

/// Parses one compilation unit. Declarations that fail to parse are dropped
/// with an error diagnostic; statement errors inside bodies are skipped with a
/// warning and the method is flagged `partial`. Throws ParseError when the
/// input is unusable as a whole (unbalanced top-level braces, unterminated
/// block comment) unless `options.lenient` is set.
ParseResult parse_unit(std::string_view source, std::string path, ParseOptions options = {});

struct ProjectParseOptions {
    std::vector<std::string> ignore_dirs = {"target", "build", "out"};
    unsigned jobs = 1;
};

struct FileFailure {
    std::string path;
    std::string message;
};

struct FileDiagnostics {
    std::string path;
    std::vector<ParseDiagnostic> diagnostics;
};

struct ProjectParse {
    /// Sorted by path; paths are relative to the project root.
    std::vector<CompilationUnitModel> units;
    std::vector<FileFailure> failures;
    std::vector<FileDiagnostics> diagnostics;
};

/// Every *.java file below `root`, skipping ignored directory names, sorted.
std::vector<std::filesystem::path> list_source_files(const std::filesystem::path& root,
                                                     const std::vector<std::string>& ignore_dirs);

/// Parses every source file under `root`. One bad file never aborts the run.
/// Throws IoError when `root` is missing or unreadable.
ProjectParse parse_project(const std::filesystem::path& root, const ProjectParseOptions& options = {});

} // namespace focalctx
