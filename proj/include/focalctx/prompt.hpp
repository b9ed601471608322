#pragma once

#include "focalctx/context.hpp"
#include "focalctx/tokenizer.hpp"

#include <cstddef>
#include <string>
#include <string_view>

namespace focalctx {

enum class Strategy { Baseline, Ours };

/// "baseline" / "ours".
std::string_view to_string(Strategy strategy);
/// "Baseline" / "Ours", as used in report rows.
std::string_view display_name(Strategy strategy);
/// Throws ConfigError for anything but "ours" or "baseline".
Strategy parse_strategy(std::string_view text);

struct PromptArtifact {
    Strategy strategy = Strategy::Ours;
    std::string text;
    /// Count of the untruncated text under `tokenizer`.
    std::size_t token_count = 0;
    std::string tokenizer{kDefaultTokenizer};
    FocalMethodRef focal_ref;

    bool operator==(const PromptArtifact&) const = default;
};

inline constexpr std::string_view kOursSystemPrompt =
    "Generate Java unit test(s) for the given Java focal method. Mock method calls and fields "
    "using Mockito library. Use the JUnit framework and try to obtain high branch coverage.";
inline constexpr std::string_view kBaselineSystemPrompt =
    "You are a coding assistant. You generate only source code.";

/// "[INST]\n<<SYS>>\n{system}\n<</SYS>>\n{body}[/INST]".
std::string wrap_instruction(std::string_view system, std::string_view body);

PromptArtifact build_ours(const FocalContext& ctx, const FocalMethodRef& ref,
                          std::string_view tokenizer = kDefaultTokenizer);

/// Name of the generated test class for the baseline framing, "<Class>1Test".
std::string baseline_test_class(const ClassModel& cls);

/// Full source file followed by an opened test-file header. Throws
/// LookupError when `ref` does not name a method of `unit`.
PromptArtifact build_baseline(const CompilationUnitModel& unit, const FocalMethodRef& ref,
                              std::string_view tokenizer = kDefaultTokenizer);
PromptArtifact build_baseline(const LocatedMethod& located, const FocalMethodRef& ref,
                              std::string_view tokenizer = kDefaultTokenizer);

} // namespace focalctx
