#include "focalctx/harvest.hpp"

#include "focalctx/errors.hpp"
#include "focalctx/parser.hpp"

#include <algorithm>
#include <cstdint>
#include <sstream>

namespace focalctx {

std::string_view to_string(Classification c)
{
    switch (c) {
    case Classification::TestsGenerated:
        return "tests_generated";
    case Classification::Regurgitation:
        return "regurgitation";
    case Classification::NoTest:
        return "no_test";
    }
    return "no_test";
}

Classification parse_classification(std::string_view text)
{
    for (Classification c : {Classification::TestsGenerated, Classification::Regurgitation, Classification::NoTest}) {
        if (to_string(c) == text) {
            return c;
        }
    }
    throw ConfigError("unknown classification '" + std::string(text) + "'");
}

std::vector<std::string> extract_code_blocks(std::string_view raw)
{
    std::vector<std::string> blocks;
    std::size_t pos = 0;
    while (true) {
        const std::size_t open = raw.find("```", pos);
        if (open == std::string_view::npos) {
            break;
        }
        std::size_t body = raw.find('\n', open);
        if (body == std::string_view::npos) {
            break;
        }
        ++body;
        const std::size_t close = raw.find("```", body);
        if (close == std::string_view::npos) {
            blocks.emplace_back(raw.substr(body));
            break;
        }
        blocks.emplace_back(raw.substr(body, close - body));
        pos = close + 3;
    }
    if (blocks.empty() && raw.find("```") == std::string_view::npos) {
        blocks.emplace_back(raw);
    }
    return blocks;
}

namespace {

// Suffix automaton over one string; transitions kept as small sorted lists.
class SuffixAutomaton {
public:
    explicit SuffixAutomaton(std::string_view text)
    {
        states_.reserve(2 * text.size() + 1);
        states_.push_back({});
        for (char ch : text) {
            extend(static_cast<unsigned char>(ch));
        }
    }

    std::size_t longest_match(std::string_view other) const
    {
        int state = 0;
        std::size_t len = 0;
        std::size_t best = 0;
        for (char ch : other) {
            const auto c = static_cast<unsigned char>(ch);
            while (state != 0 && next(state, c) < 0) {
                state = states_[state].link;
                len = static_cast<std::size_t>(states_[state].len);
            }
            const int to = next(state, c);
            if (to >= 0) {
                state = to;
                ++len;
            } else {
                state = 0;
                len = 0;
            }
            best = std::max(best, len);
        }
        return best;
    }

private:
    struct State {
        int len = 0;
        int link = -1;
        std::vector<std::pair<unsigned char, int>> next;
    };

    int next(int state, unsigned char c) const
    {
        for (const auto& [k, v] : states_[state].next) {
            if (k == c) {
                return v;
            }
        }
        return -1;
    }

    void set_next(int state, unsigned char c, int to)
    {
        for (auto& [k, v] : states_[state].next) {
            if (k == c) {
                v = to;
                return;
            }
        }
        states_[state].next.emplace_back(c, to);
    }

    void extend(unsigned char c)
    {
        const int cur = static_cast<int>(states_.size());
        states_.push_back({states_[last_].len + 1, -1, {}});
        int p = last_;
        while (p != -1 && next(p, c) < 0) {
            set_next(p, c, cur);
            p = states_[p].link;
        }
        if (p == -1) {
            states_[cur].link = 0;
        } else {
            const int q = next(p, c);
            if (states_[p].len + 1 == states_[q].len) {
                states_[cur].link = q;
            } else {
                const int clone = static_cast<int>(states_.size());
                State copy = states_[q];
                copy.len = states_[p].len + 1;
                states_.push_back(std::move(copy));
                while (p != -1 && next(p, c) == q) {
                    set_next(p, c, clone);
                    p = states_[p].link;
                }
                states_[q].link = clone;
                states_[cur].link = clone;
            }
        }
        last_ = cur;
    }

    std::vector<State> states_;
    int last_ = 0;
};

struct ParsedBlock {
    ParseResult result;
    bool usable = false;
};

ParsedBlock parse_block(std::string_view block)
{
    ParsedBlock out;
    try {
        out.result = parse_unit(block, "<harvest>", ParseOptions{true});
        if (out.result.unit.types.empty()) {
            const std::string wrapped = "class __Harvest__ {\n" + std::string(block) + "\n}\n";
            out.result = parse_unit(wrapped, "<harvest>", ParseOptions{true});
        }
        out.usable = !out.result.unit.types.empty();
    } catch (const Error&) {
        out.usable = false;
    }
    return out;
}

bool is_test_method(const MethodModel& m)
{
    return m.modifiers.has_annotation("Test") || m.modifiers.has_annotation("ParameterizedTest") ||
           m.modifiers.has_annotation("RepeatedTest");
}

std::size_t tests_in(const CompilationUnitModel& unit)
{
    std::size_t n = 0;
    for_each_class(unit, [&](const ClassModel& cls) {
        n += static_cast<std::size_t>(std::count_if(cls.methods.begin(), cls.methods.end(), is_test_method));
    });
    return n;
}

std::size_t assertions_in(const CompilationUnitModel& unit)
{
    std::size_t n = 0;
    for_each_class(unit, [&](const ClassModel& cls) {
        for (const MethodModel& m : cls.methods) {
            for (const CallSite& site : m.invocations) {
                if (site.callee_name.starts_with("assert") || site.callee_name == "verify") {
                    ++n;
                }
            }
        }
    });
    return n;
}

std::string format_ratio(double value)
{
    std::ostringstream out;
    out.precision(2);
    out << std::fixed << value;
    return out.str();
}

} // namespace

std::size_t longest_common_substring(std::string_view a, std::string_view b)
{
    if (a.empty() || b.empty()) {
        return 0;
    }
    return SuffixAutomaton(a).longest_match(b);
}

HarvestOutcome harvest(std::string_view raw, const PromptArtifact& prompt, double regurgitation_threshold)
{
    HarvestOutcome out;
    if (!raw.empty()) {
        const std::size_t common = longest_common_substring(prompt.text, raw);
        const double coverage = static_cast<double>(common) / static_cast<double>(raw.size());
        if (coverage >= regurgitation_threshold) {
            out.classification = Classification::Regurgitation;
            out.evidence = "reply repeats the prompt (longest common substring covers " +
                           format_ratio(coverage) + " of the reply)";
            return out;
        }
    }

    const std::vector<std::string> blocks = extract_code_blocks(raw);
    for (const std::string& block : blocks) {
        const ParsedBlock parsed = parse_block(block);
        if (!parsed.usable) {
            continue;
        }
        const std::size_t tests = tests_in(parsed.result.unit);
        if (tests == 0) {
            continue;
        }
        out.test_units.push_back(block);
        const std::string& name = parsed.result.unit.types.front().simple_name;
        out.test_class_names.push_back(name == "__Harvest__" ? std::string() : name);
        out.test_method_count += tests;
        out.assertion_count += assertions_in(parsed.result.unit);
    }
    if (out.test_method_count > 0) {
        out.classification = Classification::TestsGenerated;
        out.evidence = std::to_string(out.test_method_count) + " test method(s) in " +
                       std::to_string(out.test_units.size()) + " block(s)";
    } else {
        out.classification = Classification::NoTest;
        out.evidence = raw.empty() ? "empty reply"
                                   : "no test methods in " + std::to_string(blocks.size()) + " block(s)";
    }
    return out;
}

std::size_t count_test_methods(std::string_view block)
{
    const ParsedBlock parsed = parse_block(block);
    return parsed.usable ? tests_in(parsed.result.unit) : 0;
}

std::size_t count_assertions(std::string_view block, std::string* warning)
{
    const ParsedBlock parsed = parse_block(block);
    if (!parsed.usable) {
        if (warning != nullptr) {
            *warning = "block could not be parsed; counting 0 assertions";
        }
        return 0;
    }
    if (parsed.result.has_errors() && warning != nullptr) {
        *warning = "block has syntax errors; counting assertions in the parts that parsed";
    }
    return assertions_in(parsed.result.unit);
}

} // namespace focalctx
