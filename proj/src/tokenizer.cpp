#include "focalctx/tokenizer.hpp"

#include "focalctx/errors.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace focalctx {

namespace {

constexpr std::size_t kWholeWordMax = 8;
constexpr std::size_t kPieceLen = 4;

bool is_space(unsigned char c)
{
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_word(unsigned char c)
{
    return std::isalnum(c) || c == '_' || c >= 0x80;
}

std::vector<TokenSpan> approx_llama(std::string_view text)
{
    std::vector<TokenSpan> out;
    std::size_t i = 0;
    while (i < text.size()) {
        const auto c = static_cast<unsigned char>(text[i]);
        if (is_space(c)) {
            ++i;
        } else if (is_word(c)) {
            std::size_t j = i;
            while (j < text.size() && is_word(static_cast<unsigned char>(text[j]))) {
                ++j;
            }
            if (j - i <= kWholeWordMax) {
                out.push_back({i, j});
            } else {
                for (std::size_t k = i; k < j; k += kPieceLen) {
                    out.push_back({k, std::min(k + kPieceLen, j)});
                }
            }
            i = j;
        } else {
            out.push_back({i, i + 1});
            ++i;
        }
    }
    return out;
}

std::vector<TokenSpan> whitespace(std::string_view text)
{
    std::vector<TokenSpan> out;
    std::size_t i = 0;
    while (i < text.size()) {
        if (is_space(static_cast<unsigned char>(text[i]))) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < text.size() && !is_space(static_cast<unsigned char>(text[j]))) {
            ++j;
        }
        out.push_back({i, j});
        i = j;
    }
    return out;
}

using Scheme = std::vector<TokenSpan> (*)(std::string_view);

struct Entry {
    std::string_view id;
    Scheme fn;
};

constexpr auto kSchemes = std::to_array<Entry>({
    {"approx-llama", &approx_llama},
    {"whitespace", &whitespace},
});

Scheme find_scheme(std::string_view scheme)
{
    for (const Entry& e : kSchemes) {
        if (e.id == scheme) {
            return e.fn;
        }
    }
    throw ConfigError("unknown tokenizer scheme '" + std::string(scheme) + "'");
}

bool glued(std::string_view text, const TokenSpan& a, const TokenSpan& b)
{
    return a.end == b.begin && is_word(static_cast<unsigned char>(text[a.end - 1])) &&
           is_word(static_cast<unsigned char>(text[b.begin]));
}

// Text of tokens [first, last). When the cut splits a long word and the kept
// part is short enough to count as a single token again, a space separates
// its two pieces so the result keeps exactly last - first tokens.
std::string slice_tokens(std::string_view text, const std::vector<TokenSpan>& tokens, std::size_t first,
                         std::size_t last)
{
    std::size_t run_begin = first;
    std::size_t run_end = first;
    if (first > 0 && glued(text, tokens[first - 1], tokens[first])) {
        run_end = first + 1;
        while (run_end < last && glued(text, tokens[run_end - 1], tokens[run_end])) {
            ++run_end;
        }
    } else if (last < tokens.size() && glued(text, tokens[last - 1], tokens[last])) {
        run_end = last;
        run_begin = last - 1;
        while (run_begin > first && glued(text, tokens[run_begin - 1], tokens[run_begin])) {
            --run_begin;
        }
    }
    const std::size_t from = tokens[first].begin;
    const std::size_t to = tokens[last - 1].end;
    const bool split = run_end - run_begin >= 2 && tokens[run_end - 1].end - tokens[run_begin].begin <= kWholeWordMax;
    if (!split) {
        return std::string(text.substr(from, to - from));
    }
    const std::size_t at = tokens[run_begin].end;
    std::string out(text.substr(from, at - from));
    out.push_back(' ');
    out.append(text.substr(at, to - at));
    return out;
}

} // namespace

std::vector<std::string> tokenizer_schemes()
{
    std::vector<std::string> ids;
    for (const Entry& e : kSchemes) {
        ids.emplace_back(e.id);
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

void require_tokenizer(std::string_view scheme)
{
    find_scheme(scheme);
}

std::vector<TokenSpan> tokenize(std::string_view text, std::string_view scheme)
{
    return find_scheme(scheme)(text);
}

std::size_t count_tokens(std::string_view text, std::string_view scheme)
{
    return tokenize(text, scheme).size();
}

TruncationMode parse_truncation_mode(std::string_view text)
{
    if (text == "tail") {
        return TruncationMode::Tail;
    }
    if (text == "head") {
        return TruncationMode::Head;
    }
    throw ConfigError("unknown truncation mode '" + std::string(text) + "' (expected head or tail)");
}

std::string_view to_string(TruncationMode mode)
{
    return mode == TruncationMode::Tail ? "tail" : "head";
}

std::string truncate_to_tokens(std::string_view text, std::size_t limit, TruncationMode mode,
                               std::string_view scheme)
{
    const std::vector<TokenSpan> tokens = tokenize(text, scheme);
    if (tokens.size() <= limit) {
        return std::string(text);
    }
    if (limit == 0) {
        return {};
    }
    if (mode == TruncationMode::Tail) {
        return slice_tokens(text, tokens, tokens.size() - limit, tokens.size());
    }
    return slice_tokens(text, tokens, 0, limit);
}

} // namespace focalctx
