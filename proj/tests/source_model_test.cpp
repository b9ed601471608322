#include "focalctx/errors.hpp"
#include "focalctx/parser.hpp"
#include "focalctx/source_model.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cctype>
#include <set>

namespace focalctx {
namespace {

const std::string kGuavaMath = "com/google/common/math/";

CompilationUnitModel parse_file(const std::filesystem::path& path)
{
    return parse_unit(testing::read_file(path), path.filename().string()).unit;
}

const MethodModel& method_named(const ClassModel& cls, const std::string& name)
{
    for (const MethodModel& m : cls.methods) {
        if (m.name == name) {
            return m;
        }
    }
    throw std::runtime_error("no method " + name);
}

// Counts identifiers directly followed by '(' in a method body, skipping
// literals, comments, keywords and constructor calls.
std::size_t count_call_expressions(const std::string& body)
{
    static const std::set<std::string> keywords = {"if", "for", "while", "switch", "catch", "synchronized",
                                                   "return", "this", "super", "throw", "new", "assert", "case"};
    std::size_t count = 0;
    std::string previous;
    std::size_t i = 0;
    while (i < body.size()) {
        const char c = body[i];
        if (c == '"' || c == '\'') {
            const char quote = c;
            for (++i; i < body.size() && body[i] != quote; ++i) {
                if (body[i] == '\\') {
                    ++i;
                }
            }
            ++i;
            previous.clear();
        } else if (body.compare(i, 2, "//") == 0) {
            i = body.find('\n', i);
        } else if (body.compare(i, 2, "/*") == 0) {
            i = body.find("*/", i) + 2;
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = i;
            while (i < body.size() && (std::isalnum(static_cast<unsigned char>(body[i])) || body[i] == '_')) {
                ++i;
            }
            const std::string word = body.substr(start, i - start);
            std::size_t j = i;
            while (j < body.size() && std::isspace(static_cast<unsigned char>(body[j]))) {
                ++j;
            }
            if (j < body.size() && body[j] == '(' && !keywords.count(word) && previous != "new") {
                ++count;
            }
            previous = word;
        } else {
            if (!std::isspace(static_cast<unsigned char>(c)) && c != '.') {
                previous.clear();
            }
            ++i;
        }
        if (i == std::string::npos) {
            break;
        }
    }
    return count;
}

TEST(SpanText, ExtractsSingleLine)
{
    const CompilationUnitModel unit = parse_unit("int x;", "X.java").unit;
    EXPECT_EQ(span_text(unit, {1, 1}), "int x;");
}

TEST(SpanText, ExtractsFocalMethodOfDoubleUtils)
{
    const CompilationUnitModel unit = parse_file(testing::data_dir() / "guava" / kGuavaMath / "DoubleUtils.java");
    const MethodModel& m = method_named(unit.types.at(0), "ensureNonNegative");
    EXPECT_EQ(strip_common_indent(span_text(unit, m.source_span)),
              "static double ensureNonNegative(double value) {\n"
              "    checkArgument(!isNaN(value));\n"
              "    return Math.max(value, 0.0);\n"
              "}");
}

TEST(SpanText, EmptyFileIsOutOfRange)
{
    const CompilationUnitModel unit = parse_unit("", "Empty.java").unit;
    EXPECT_THROW(span_text(unit, {1, 1}), RangeError);
}

TEST(SpanText, RejectsReversedAndTrailingSpans)
{
    const CompilationUnitModel unit = parse_unit("class A {\n}\n", "A.java").unit;
    EXPECT_THROW(span_text(unit, {2, 1}), RangeError);
    EXPECT_THROW(span_text(unit, {1, 3}), RangeError);
    EXPECT_THROW(span_text(unit, {0, 1}), RangeError);
    EXPECT_EQ(span_text(unit, {1, 2}), "class A {\n}");
}

TEST(LineCount, TrailingNewlineDoesNotOpenALine)
{
    EXPECT_EQ(line_count(""), 0);
    EXPECT_EQ(line_count("a"), 1);
    EXPECT_EQ(line_count("a\n"), 1);
    EXPECT_EQ(line_count("a\nb"), 2);
}

TEST(StripCommonIndent, IgnoresBlankLines)
{
    EXPECT_EQ(strip_common_indent("    a\n\n      b\n    c"), "a\n\n  b\nc");
    EXPECT_EQ(strip_common_indent("a\n  b"), "a\n  b");
}

TEST(ForEachClass, VisitsNestedClassesInDeclarationOrder)
{
    const CompilationUnitModel unit =
        parse_unit("class A { class B { class C {} } class D {} }\nclass E {}", "A.java").unit;
    std::vector<std::string> names;
    for_each_class(unit, [&](const ClassModel& c) { names.push_back(c.simple_name); });
    EXPECT_EQ(names, (std::vector<std::string>{"A", "B", "C", "D", "E"}));
}

class FixtureFiles : public ::testing::TestWithParam<std::string> {};

TEST_P(FixtureFiles, ParsingIsDeterministic)
{
    const std::string text = testing::read_file(testing::data_dir() / GetParam());
    const ParseResult a = parse_unit(text, GetParam());
    const ParseResult b = parse_unit(text, GetParam());
    EXPECT_EQ(a.unit, b.unit);
    EXPECT_EQ(a.diagnostics, b.diagnostics);
}

TEST_P(FixtureFiles, SiblingMethodSpansAreDisjoint)
{
    const CompilationUnitModel unit = parse_file(testing::data_dir() / GetParam());
    for_each_class(unit, [](const ClassModel& cls) {
        for (std::size_t i = 0; i < cls.methods.size(); ++i) {
            for (std::size_t j = i + 1; j < cls.methods.size(); ++j) {
                const SourceSpan a = cls.methods[i].source_span;
                const SourceSpan b = cls.methods[j].source_span;
                EXPECT_TRUE(a.end_line < b.start_line || b.end_line < a.start_line)
                    << cls.simple_name << "." << cls.methods[i].name << " overlaps " << cls.methods[j].name;
            }
        }
    });
}

TEST_P(FixtureFiles, InvocationCountMatchesBruteForceScan)
{
    const CompilationUnitModel unit = parse_file(testing::data_dir() / GetParam());
    for_each_class(unit, [](const ClassModel& cls) {
        for (const MethodModel& m : cls.methods) {
            const std::size_t expected = m.body_source ? count_call_expressions(*m.body_source) : 0;
            EXPECT_EQ(m.invocations.size(), expected) << cls.simple_name << "." << m.name;
        }
    });
}

INSTANTIATE_TEST_SUITE_P(Fixtures, FixtureFiles,
                         ::testing::Values("employee/Employee.java",
                                           "guava/com/google/common/math/DoubleUtils.java",
                                           "guava/com/google/common/math/MathPreconditions.java",
                                           "guava/com/google/common/math/IntMath.java",
                                           "resolver_oracle/org/example/shop/Item.java",
                                           "resolver_oracle/org/example/shop/Catalog.java",
                                           "resolver_oracle/org/example/shop/Category.java"));

} // namespace
} // namespace focalctx
