#pragma once

#include "focalctx/prompt.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace focalctx {

enum class Classification { TestsGenerated, Regurgitation, NoTest };

/// "tests_generated" / "regurgitation" / "no_test".
std::string_view to_string(Classification c);
/// Throws ConfigError for unknown names.
Classification parse_classification(std::string_view text);

inline constexpr double kDefaultRegurgitationThreshold = 0.8;

struct HarvestOutcome {
    Classification classification = Classification::NoTest;
    /// Code blocks that contain at least one test method.
    std::vector<std::string> test_units;
    /// Top-level class name of each test unit ("" when it had none).
    std::vector<std::string> test_class_names;
    std::size_t test_method_count = 0;
    std::size_t assertion_count = 0;
    std::string evidence;

    bool operator==(const HarvestOutcome&) const = default;
};

/// Bodies of ``` fenced blocks (an unterminated fence runs to the end), or the
/// whole text when there is no fence.
std::vector<std::string> extract_code_blocks(std::string_view raw);

/// Length of the longest common substring of `a` and `b`.
std::size_t longest_common_substring(std::string_view a, std::string_view b);

/// Classifies a model reply; regurgitation is checked before anything is parsed.
HarvestOutcome harvest(std::string_view raw, const PromptArtifact& prompt,
                       double regurgitation_threshold = kDefaultRegurgitationThreshold);

/// Methods annotated @Test, @ParameterizedTest or @RepeatedTest in `block`.
std::size_t count_test_methods(std::string_view block);

/// Calls whose callee starts with "assert" or is "verify". An unparseable block
/// counts 0 and, when `warning` is given, stores the reason there.
std::size_t count_assertions(std::string_view block, std::string* warning = nullptr);

} // namespace focalctx
