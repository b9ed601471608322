#include "focalctx/cli.hpp"
#include "focalctx/parser.hpp"
#include "test_support.hpp"

#include <json.hpp>

#include <gtest/gtest.h>

#include <sstream>

namespace focalctx {
namespace {

struct CliRun {
    int code;
    std::string out;
    std::string err;
};

CliRun cli(std::vector<std::string> args)
{
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string guava()
{
    return (testing::data_dir() / "guava").string();
}

TEST(CliAnalyze, SummarizesTheFixture)
{
    const ProjectParse p = parse_project(guava());
    std::size_t classes = 0;
    std::size_t methods = 0;
    for (const CompilationUnitModel& u : p.units) {
        for_each_class(u, [&](const ClassModel& c) {
            ++classes;
            methods += c.methods.size();
        });
    }
    const CliRun r = cli({"analyze", "--project", guava()});
    EXPECT_EQ(r.code, kExitOk);
    EXPECT_EQ(r.out, std::to_string(p.units.size()) + " files, " + std::to_string(classes) + " classes, " +
                         std::to_string(methods) + " methods, 0 diagnostics\n");
    EXPECT_EQ(r.out, "3 files, 3 classes, 47 methods, 0 diagnostics\n");
}

TEST(CliAnalyze, EmptyDirectory)
{
    const CliRun r = cli({"analyze", "--project", testing::scratch_dir("cli_empty").string()});
    EXPECT_EQ(r.code, kExitOk);
    EXPECT_TRUE(r.out.starts_with("0 files"));
}

TEST(CliAnalyze, MissingDirectoryExitsOne)
{
    const CliRun r = cli({"analyze", "--project", (testing::data_dir() / "nowhere").string()});
    EXPECT_EQ(r.code, kExitUserError);
    EXPECT_TRUE(r.out.empty());
    EXPECT_FALSE(r.err.empty());
}

TEST(CliAnalyze, IndexCacheIsReusedAndStable)
{
    const auto dir = testing::scratch_dir("cli_cache");
    const std::string cache = (dir / "index.json").string();
    const CliRun first = cli({"analyze", "--project", guava(), "--index-cache", cache});
    const std::string saved = testing::read_file(cache);
    const CliRun second = cli({"analyze", "--project", guava(), "--index-cache", cache});
    EXPECT_EQ(first.out, second.out);
    EXPECT_EQ(saved, testing::read_file(cache));
    EXPECT_EQ(nlohmann::json::parse(saved).at("version"), 1);
}

TEST(CliContext, PrintsOnlyResolvedSignatures)
{
    const CliRun r = cli({"context", "--project", guava(), "--class", "DoubleUtils", "--method", "ensureNonNegative",
                          "--arity", "1"});
    EXPECT_EQ(r.code, kExitOk);
    for (const char* line : {"\nvoid com.google.common.base.Preconditions.checkArgument(boolean)\n",
                             "\ndouble java.lang.Math.max(double, double)\n",
                             "\nboolean java.lang.Double.isNaN(double)\n"}) {
        EXPECT_NE(r.out.find(line), std::string::npos) << line;
    }
    EXPECT_EQ(r.out.find("calls:"), std::string::npos);
    EXPECT_NE(r.err.find("3 resolved"), std::string::npos);
}

TEST(CliContext, EmployeeMatchesGolden)
{
    const CliRun r = cli({"context", "--project", (testing::data_dir() / "employee").string(), "--class", "Employee",
                          "--method", "getEmail"});
    EXPECT_EQ(r.out, testing::read_file(testing::golden_dir() / "employee_getEmail_context.txt"));
}

TEST(CliContext, UnknownMethodExitsOne)
{
    const CliRun r = cli({"context", "--project", guava(), "--class", "DoubleUtils", "--method", "nope"});
    EXPECT_EQ(r.code, kExitUserError);
    EXPECT_NE(r.err.find("not found"), std::string::npos);
}

TEST(CliContext, OverloadWithoutArityListsCandidates)
{
    const CliRun r = cli({"context", "--project", guava(), "--class", "MathPreconditions", "--method", "checkPositive"});
    EXPECT_EQ(r.code, kExitUserError);
    EXPECT_NE(r.err.find("checkPositive(java.lang.String, int)"), std::string::npos);
    EXPECT_NE(r.err.find("checkPositive(java.lang.String, long)"), std::string::npos);
    EXPECT_TRUE(r.out.empty());
}

TEST(CliPrompt, TextAndJsonAgree)
{
    const std::vector<std::string> base = {"prompt", "--project", guava(), "--class", "DoubleUtils", "--method",
                                           "ensureNonNegative", "--strategy", "ours"};
    const CliRun text = cli(base);
    EXPECT_EQ(text.out, testing::read_file(testing::golden_dir() / "ensureNonNegative_ours_prompt.txt") + "\n");
    std::vector<std::string> json_args = base;
    json_args.insert(json_args.end(), {"--format", "json"});
    const nlohmann::json doc = nlohmann::json::parse(cli(json_args).out);
    EXPECT_EQ(doc.at("token_count"), 186);
    EXPECT_EQ(doc.at("text").get<std::string>() + "\n", text.out);
}

TEST(CliPrompt, BadStrategyExitsOne)
{
    EXPECT_EQ(cli({"prompt", "--project", guava(), "--class", "DoubleUtils", "--method", "ensureNonNegative",
                   "--strategy", "fancy"})
                  .code,
              kExitUserError);
}

TEST(CliGenerate, ReplayBackendHarvestsRecordedTest)
{
    const auto dir = testing::scratch_dir("cli_replay");
    const CliRun r = cli({"generate", "--project", guava(), "--class", "DoubleUtils", "--method", "ensureNonNegative",
                          "--arity", "1", "--strategy", "ours", "--backend", "replay", "--replay-file",
                          (testing::demo_dir() / "replay.jsonl").string(), "--output-dir", dir.string()});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_NE(r.out.find("tests_generated"), std::string::npos);
    const std::string test = testing::read_file(dir / "tests/000-DoubleUtils.ensureNonNegative/ours/DoubleUtilsTest.java");
    EXPECT_NE(test.find("public class DoubleUtilsTest"), std::string::npos);
}

TEST(CliGenerate, EchoBackendReportsRegurgitation)
{
    const auto dir = testing::scratch_dir("cli_echo");
    const CliRun r = cli({"generate", "--project", guava(), "--class", "DoubleUtils", "--method", "ensureNonNegative",
                          "--strategy", "ours", "--backend", "echo", "--output-dir", dir.string()});
    EXPECT_EQ(r.code, kExitOk);
    EXPECT_EQ(r.out, "DoubleUtils.ensureNonNegative\tours\tregurgitation\ttests=0\n");
}

TEST(CliGenerate, CorpusOfTwoWritesTwoRecords)
{
    const auto dir = testing::scratch_dir("cli_corpus");
    testing::write_file(dir / "corpus.tsv", "# two entries\n"
                                            "com/google/common/math/DoubleUtils.java\tDoubleUtils\tscaleNormalize\t1\n"
                                            "com/google/common/math/DoubleUtils.java\tDoubleUtils\tnextDown\t1\n");
    const CliRun r = cli({"generate", "--project", guava(), "--corpus", (dir / "corpus.tsv").string(), "--strategy",
                          "baseline", "--backend", "contextual", "--output-dir", (dir / "run").string()});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const std::string records = testing::read_file(dir / "run/records.jsonl");
    EXPECT_EQ(std::count(records.begin(), records.end(), '\n'), 2);
}

TEST(CliGenerate, FailedGenerationsStillExitZero)
{
    const auto dir = testing::scratch_dir("cli_miss");
    testing::write_file(dir / "empty.jsonl", "");
    const CliRun r = cli({"generate", "--project", guava(), "--class", "DoubleUtils", "--method", "nextDown",
                          "--backend", "replay", "--replay-file", (dir / "empty.jsonl").string(), "--output-dir",
                          (dir / "run").string()});
    EXPECT_EQ(r.code, kExitOk);
    EXPECT_NE(r.out.find("no_test"), std::string::npos);
}

TEST(CliGenerate, UnknownSingleMethodExitsOne)
{
    const auto dir = testing::scratch_dir("cli_unknown");
    const CliRun r = cli({"generate", "--project", guava(), "--class", "DoubleUtils", "--method", "nope", "--backend",
                          "echo", "--output-dir", (dir / "run").string()});
    EXPECT_EQ(r.code, kExitUserError);
    EXPECT_NE(r.err.find("not found"), std::string::npos);
    EXPECT_FALSE(std::filesystem::exists(dir / "run"));
}

TEST(CliGenerate, RepeatedRunsAreIdempotent)
{
    const auto dir = testing::scratch_dir("cli_idem");
    const std::vector<std::string> args = {"generate", "--project", guava(), "--class", "IntMath", "--method", "gcd",
                                           "--backend", "contextual", "--output-dir", dir.string()};
    const CliRun a = cli(args);
    const auto first = testing::read_tree(dir, {"run_metadata.json"});
    const CliRun b = cli(args);
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(first, testing::read_tree(dir, {"run_metadata.json"}));
}

TEST(CliEvaluate, DemoConfigPrintsBothRows)
{
    const auto dir = testing::scratch_dir("cli_eval");
    const CliRun r = cli({"evaluate", "--config", (testing::demo_dir() / "config.json").string(), "--output-dir",
                          dir.string()});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_EQ(r.out, testing::read_file(testing::demo_dir() / "golden/contextual_report.txt"));
    EXPECT_EQ(testing::read_file(dir / "report.txt"), r.out);
}

TEST(CliEvaluate, JsonOutputParsesBack)
{
    const auto dir = testing::scratch_dir("cli_eval_json");
    const CliRun r = cli({"evaluate", "--config", (testing::demo_dir() / "replay_config.json").string(), "--format",
                          "json", "--output-dir", dir.string()});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const nlohmann::json doc = nlohmann::json::parse(r.out);
    EXPECT_EQ(doc.at("strategies").size(), 1u);
    EXPECT_EQ(doc, nlohmann::json::parse(testing::read_file(dir / "report.json")));
}

TEST(CliEvaluate, ConfigWithoutCorpusExitsOne)
{
    const auto dir = testing::scratch_dir("cli_nocorpus");
    testing::write_file(dir / "config.json", "{\"project\": \"" + guava() + "\"}");
    const CliRun r = cli({"evaluate", "--config", (dir / "config.json").string()});
    EXPECT_EQ(r.code, kExitUserError);
    EXPECT_NE(r.err.find("corpus"), std::string::npos);
}

TEST(CliEvaluate, MalformedConfigExitsOne)
{
    const auto dir = testing::scratch_dir("cli_badconfig");
    testing::write_file(dir / "config.json", "{\"project\": ");
    EXPECT_EQ(cli({"evaluate", "--config", (dir / "config.json").string()}).code, kExitUserError);
}

TEST(Cli, UnknownSubcommandOrFlagExitsOne)
{
    EXPECT_EQ(cli({"frobnicate"}).code, kExitUserError);
    EXPECT_EQ(cli({"analyze", "--bogus"}).code, kExitUserError);
    EXPECT_EQ(cli({}).code, kExitUserError);
}

TEST(Cli, HelpExitsZero)
{
    const CliRun r = cli({"--help"});
    EXPECT_EQ(r.code, kExitOk);
    EXPECT_NE(r.out.find("evaluate"), std::string::npos);
}

} // namespace
} // namespace focalctx
