#include "focalctx/errors.hpp"
#include "focalctx/tokenizer.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <random>

namespace focalctx {
namespace {

TEST(CountTokens, TrivialInputs)
{
    EXPECT_EQ(count_tokens(""), 0u);
    EXPECT_EQ(count_tokens("a b c"), 3u);
    EXPECT_EQ(count_tokens("  \n\t "), 0u);
}

TEST(CountTokens, WordsPunctuationAndLongRuns)
{
    EXPECT_EQ(count_tokens("abcdefgh"), 1u);
    EXPECT_EQ(count_tokens("abcdefghi"), 3u);
    EXPECT_EQ(count_tokens("ensureNonNegative"), 5u);
    EXPECT_EQ(count_tokens("a+b"), 3u);
    EXPECT_EQ(count_tokens("f(x);"), 5u);
    EXPECT_EQ(count_tokens("caf\xc3\xa9"), 1u);
}

TEST(CountTokens, ReferencePromptIsFrozen)
{
    // Frozen from the reference counter in tests/oracle/approx_llama.py.
    EXPECT_EQ(count_tokens(testing::read_file(testing::data_dir() / "listings/listing2_prompt.txt")), 186u);
}

TEST(CountTokens, WhitespaceScheme)
{
    EXPECT_EQ(count_tokens("f(x); g(y)", "whitespace"), 2u);
    EXPECT_EQ(tokenizer_schemes(), (std::vector<std::string>{"approx-llama", "whitespace"}));
}

TEST(CountTokens, UnknownSchemeIsAConfigError)
{
    EXPECT_THROW(count_tokens("x", "gpt-9"), ConfigError);
    EXPECT_THROW(require_tokenizer(""), ConfigError);
}

TEST(Tokenize, SpansPointIntoTheText)
{
    const std::string text = "int  x=abcdefghij;";
    const std::vector<TokenSpan> spans = tokenize(text);
    std::vector<std::string> pieces;
    for (const TokenSpan& s : spans) {
        pieces.push_back(text.substr(s.begin, s.end - s.begin));
    }
    EXPECT_EQ(pieces, (std::vector<std::string>{"int", "x", "=", "abcd", "efgh", "ij", ";"}));
}

TEST(TruncationMode, ParsesNames)
{
    EXPECT_EQ(parse_truncation_mode("tail"), TruncationMode::Tail);
    EXPECT_EQ(parse_truncation_mode("head"), TruncationMode::Head);
    EXPECT_EQ(to_string(TruncationMode::Head), "head");
    EXPECT_THROW(parse_truncation_mode("middle"), ConfigError);
}

TEST(Truncate, FittingTextIsUnchanged)
{
    EXPECT_EQ(truncate_to_tokens("a b c", 3, TruncationMode::Tail), "a b c");
    EXPECT_EQ(truncate_to_tokens("a b c", 10, TruncationMode::Head), "a b c");
}

TEST(Truncate, TailKeepsTheEnd)
{
    EXPECT_EQ(truncate_to_tokens("one two three four", 2, TruncationMode::Tail), "three four");
    EXPECT_EQ(truncate_to_tokens("one two three four", 2, TruncationMode::Head), "one two");
}

TEST(Truncate, CutInsideLongWordStaysExact)
{
    const std::string kept = truncate_to_tokens("x abcdefghijkl", 2, TruncationMode::Tail);
    EXPECT_EQ(count_tokens(kept), 2u);
    EXPECT_EQ(kept, "efgh ijkl");
    EXPECT_EQ(count_tokens(truncate_to_tokens("abcdefghijkl y", 2, TruncationMode::Head)), 2u);
}

std::string random_source(std::mt19937& rng, std::size_t words)
{
    static const std::vector<std::string> vocab = {"a", "int", "return", "ensureNonNegative", "(", ")", "{", "}",
                                                   ";", "x1", "checkArgumentNotNull", "+=", "\n", "    ", "\xc3\xa9t\xc3\xa9",
                                                   "veryLongIdentifierName_42", "0.0", "//", "\"s\""};
    std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1);
    std::bernoulli_distribution space(0.4);
    std::string out;
    for (std::size_t i = 0; i < words; ++i) {
        out += vocab[pick(rng)];
        if (space(rng)) {
            out += ' ';
        }
    }
    return out;
}

TEST(Truncate, ExactCountForEveryLimitInBothModes)
{
    std::mt19937 rng(20240917);
    for (int round = 0; round < 40; ++round) {
        const std::string text = random_source(rng, 60);
        const std::size_t total = count_tokens(text);
        for (std::size_t limit = 0; limit < total; ++limit) {
            for (TruncationMode mode : {TruncationMode::Tail, TruncationMode::Head}) {
                const std::string cut = truncate_to_tokens(text, limit, mode);
                ASSERT_EQ(count_tokens(cut), limit) << "limit " << limit << " of " << total << ": " << text;
            }
        }
    }
}

TEST(Truncate, TailModePreservesTheTailAndHeadModeTheHead)
{
    std::mt19937 rng(7);
    for (int round = 0; round < 40; ++round) {
        const std::string text = random_source(rng, 200) + " final tail marker";
        const std::size_t limit = count_tokens(text) / 2;
        const std::string tail = truncate_to_tokens(text, limit, TruncationMode::Tail);
        EXPECT_TRUE(tail.ends_with(" final tail marker"));
        const std::string head = truncate_to_tokens("opening words " + text, limit, TruncationMode::Head);
        EXPECT_TRUE(head.starts_with("opening words "));
    }
}

TEST(Truncate, LargePromptCutsToModelLimit)
{
    std::mt19937 rng(5295);
    std::string text;
    while (count_tokens(text) < 5295) {
        text += random_source(rng, 1) + " ";
    }
    EXPECT_EQ(count_tokens(truncate_to_tokens(text, 1023, TruncationMode::Tail)), 1023u);
}

} // namespace
} // namespace focalctx
