#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace focalctx {

inline constexpr std::string_view kDefaultTokenizer = "approx-llama";

/// One token as a byte range of the counted text.
struct TokenSpan {
    std::size_t begin = 0;
    std::size_t end = 0;

    bool operator==(const TokenSpan&) const = default;
};

/// Registered scheme ids, sorted.
std::vector<std::string> tokenizer_schemes();

/// Throws ConfigError for an unknown scheme.
void require_tokenizer(std::string_view scheme);

/// "approx-llama": whitespace separates tokens; a run of word characters
/// (ASCII letters, digits, '_', any byte >= 0x80) is one token when at most 8
/// bytes long, otherwise one token per 4-byte chunk; every other byte is one
/// token. "whitespace": maximal non-whitespace runs.
std::vector<TokenSpan> tokenize(std::string_view text, std::string_view scheme = kDefaultTokenizer);

std::size_t count_tokens(std::string_view text, std::string_view scheme = kDefaultTokenizer);

enum class TruncationMode { Tail, Head };

TruncationMode parse_truncation_mode(std::string_view text);
std::string_view to_string(TruncationMode mode);

/// Keeps exactly `limit` tokens from the tail (or head) of `text`, so that
/// count_tokens of the result equals `limit` whenever the input had more.
/// Returns the input unchanged when it already fits.
std::string truncate_to_tokens(std::string_view text, std::size_t limit, TruncationMode mode,
                               std::string_view scheme = kDefaultTokenizer);

} // namespace focalctx
