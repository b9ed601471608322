#include "focalctx/gateway.hpp"

#include "focalctx/errors.hpp"
#include "focalctx/hashing.hpp"

#include <json.hpp>

#include <cctype>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

namespace focalctx {

using json = nlohmann::json;

void GenerationConfig::validate() const
{
    if (!(temperature >= 0.0)) {
        throw ConfigError("temperature must be >= 0");
    }
    if (!(top_p > 0.0 && top_p <= 1.0)) {
        throw ConfigError("top_p must be in (0, 1]");
    }
    if (top_k < 0) {
        throw ConfigError("top_k must be >= 0");
    }
    if (max_input_tokens >= context_length) {
        throw ConfigError("max_input_tokens must be smaller than context_length");
    }
    if (!(request_timeout > 0.0)) {
        throw ConfigError("request_timeout must be positive");
    }
}

void RetryPolicy::validate() const
{
    if (max_retries < 0) {
        throw ConfigError("max_retries must be >= 0");
    }
    if (!(initial_backoff >= 0.0)) {
        throw ConfigError("initial_backoff must be >= 0");
    }
}

double simulated_latency(std::size_t input_tokens, std::size_t output_tokens)
{
    return 0.001 * static_cast<double>(input_tokens) + 0.005 * static_cast<double>(output_tokens);
}

namespace {

class EchoBackend final : public Backend {
public:
    std::string id() const override { return "echo"; }
    bool offline() const override { return true; }

    BackendReply complete(const BackendRequest& request) override
    {
        const std::string_view scheme = request.prompt.tokenizer;
        return {std::string(request.input),
                simulated_latency(count_tokens(request.input, scheme), count_tokens(request.input, scheme))};
    }
};

class ContextualBackend final : public Backend {
public:
    explicit ContextualBackend(ContextualProfile profile) : profile_(profile) {}

    std::string id() const override { return "contextual"; }
    bool offline() const override { return true; }

    BackendReply complete(const BackendRequest& request) override
    {
        const std::string_view scheme = request.prompt.tokenizer;
        std::string text;
        if (static_cast<long long>(request.prompt.token_count) > profile_.threshold) {
            text = std::string(request.input);
        } else {
            text = synthesize_test_reply(request.prompt.text);
        }
        const double latency = simulated_latency(count_tokens(request.input, scheme), count_tokens(text, scheme));
        return {std::move(text), latency};
    }

private:
    ContextualProfile profile_;
};

class ReplayBackend final : public Backend {
public:
    explicit ReplayBackend(ReplayTable table) : table_(std::move(table)) {}

    std::string id() const override { return "replay"; }
    bool offline() const override { return true; }

    BackendReply complete(const BackendRequest& request) override
    {
        const std::string key = sha256_hex(request.prompt.text);
        const auto it = table_.find(key);
        if (it == table_.end()) {
            throw BackendFailure("no replay record for prompt " + key);
        }
        const std::string_view scheme = request.prompt.tokenizer;
        return {it->second,
                simulated_latency(count_tokens(request.input, scheme), count_tokens(it->second, scheme))};
    }

private:
    ReplayTable table_;
};

std::string line_after(std::string_view text, std::string_view marker)
{
    const std::size_t at = text.find(marker);
    if (at == std::string_view::npos) {
        return {};
    }
    const std::size_t begin = at + marker.size();
    const std::size_t end = text.find('\n', begin);
    return std::string(text.substr(begin, end == std::string_view::npos ? end : end - begin));
}

bool is_ident(std::string_view s)
{
    if (s.empty() || std::isdigit(static_cast<unsigned char>(s.front()))) {
        return false;
    }
    for (char c : s) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '$') {
            return false;
        }
    }
    return true;
}

// Identifier directly before the first '(' of `text`.
std::string name_before_paren(std::string_view text)
{
    const std::size_t paren = text.find('(');
    if (paren == std::string_view::npos) {
        return {};
    }
    std::size_t end = paren;
    while (end > 0 && text[end - 1] == ' ') {
        --end;
    }
    std::size_t begin = end;
    while (begin > 0 && (std::isalnum(static_cast<unsigned char>(text[begin - 1])) || text[begin - 1] == '_' ||
                         text[begin - 1] == '$')) {
        --begin;
    }
    return std::string(text.substr(begin, end - begin));
}

} // namespace

std::shared_ptr<Backend> make_echo_backend()
{
    return std::make_shared<EchoBackend>();
}

void ContextualProfile::validate() const
{
    if (threshold < 0) {
        throw ConfigError("contextual backend threshold must be >= 0");
    }
}

std::shared_ptr<Backend> mock_contextual_backend(const ContextualProfile& profile)
{
    profile.validate();
    return std::make_shared<ContextualBackend>(profile);
}

std::string synthesize_test_reply(std::string_view prompt_text)
{
    std::string cls = line_after(prompt_text, "Declaring-Class-of-Method:\n");
    std::string method;
    if (const std::size_t focal = prompt_text.find("FOCAL-METHOD-BEGIN\n"); focal != std::string_view::npos) {
        method = name_before_paren(prompt_text.substr(focal + 19));
    }
    // The baseline header's doc comment comes last; earlier links belong to the focal file.
    if (const std::size_t link = prompt_text.rfind("Test class of {@link "); link != std::string_view::npos) {
        const std::string target = line_after(prompt_text.substr(link), "{@link ");
        const std::size_t close = target.find_first_of("}#");
        if (cls.empty() && close != std::string::npos) {
            cls = target.substr(0, close);
        }
        if (method.empty()) {
            if (const std::size_t second = prompt_text.find('#', link); second != std::string_view::npos) {
                method = name_before_paren(prompt_text.substr(second + 1));
            }
        }
    }
    if (!is_ident(cls)) {
        cls = "Focal";
    }
    if (!is_ident(method)) {
        method = "focalMethod";
    }
    std::string test_name = method;
    test_name[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(test_name[0])));

    std::ostringstream out;
    out << "```java\n"
        << "import static org.junit.jupiter.api.Assertions.*;\n\n"
        << "import org.junit.jupiter.api.Test;\n\n"
        << "public class " << cls << "Test {\n\n"
        << "    @Test\n"
        << "    public void test" << test_name << "() {\n"
        << "        assertNotNull(" << cls << ".class);\n"
        << "    }\n"
        << "}\n"
        << "```\n";
    return out.str();
}

ReplayTable parse_replay(std::string_view text)
{
    ReplayTable table;
    std::size_t pos = 0;
    int line_no = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        const std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
            continue;
        }
        try {
            const json record = json::parse(line);
            table[record.at("prompt_sha256").get<std::string>()] = record.at("response").get<std::string>();
        } catch (const json::exception& e) {
            throw ConfigError("replay line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return table;
}

ReplayTable load_replay(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read replay file " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_replay(buf.str());
}

std::string replay_line(std::string_view prompt_text, std::string_view response)
{
    json record;
    record["prompt_sha256"] = sha256_hex(prompt_text);
    record["response"] = std::string(response);
    return record.dump(-1, ' ', false, json::error_handler_t::replace);
}

std::shared_ptr<Backend> make_replay_backend(ReplayTable table)
{
    return std::make_shared<ReplayBackend>(std::move(table));
}

ChatMessages split_instruction(std::string_view text)
{
    constexpr std::string_view kOpen = "<<SYS>>\n";
    constexpr std::string_view kClose = "\n<</SYS>>\n";
    constexpr std::string_view kEnd = "[/INST]";
    const std::size_t open = text.find(kOpen);
    const std::size_t close = open == std::string_view::npos ? open : text.find(kClose, open);
    if (open == std::string_view::npos || close == std::string_view::npos) {
        return {"", std::string(text)};
    }
    ChatMessages m;
    m.system = std::string(text.substr(open + kOpen.size(), close - open - kOpen.size()));
    std::string_view user = text.substr(close + kClose.size());
    if (user.ends_with(kEnd)) {
        user.remove_suffix(kEnd.size());
    }
    m.user = std::string(user);
    return m;
}

Gateway::Gateway(std::shared_ptr<Backend> backend, GenerationConfig config, RetryPolicy retry,
                 std::size_t max_in_flight, Sleeper sleeper)
    : backend_(std::move(backend)), config_(std::move(config)), retry_(retry),
      max_in_flight_(max_in_flight), sleeper_(std::move(sleeper))
{
    if (!backend_) {
        throw ConfigError("gateway needs a backend");
    }
    config_.validate();
    retry_.validate();
    if (max_in_flight_ == 0) {
        throw ConfigError("max_in_flight must be >= 1");
    }
    if (!sleeper_) {
        sleeper_ = [](double seconds) {
            std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
        };
    }
}

CompletionResult Gateway::complete(const PromptArtifact& prompt)
{
    CompletionResult result;
    result.backend_id = backend_->id();

    std::string input = prompt.text;
    if (prompt.token_count > config_.max_input_tokens) {
        input = truncate_to_tokens(prompt.text, config_.max_input_tokens, config_.truncation, prompt.tokenizer);
        result.truncated_input = true;
    }
    result.input_tokens = count_tokens(input, prompt.tokenizer);

    {
        std::unique_lock lock(mutex_);
        slot_free_.wait(lock, [&] { return in_flight_ < max_in_flight_; });
        ++in_flight_;
    }
    struct SlotRelease {
        Gateway& gateway;
        ~SlotRelease()
        {
            {
                std::lock_guard lock(gateway.mutex_);
                --gateway.in_flight_;
            }
            gateway.slot_free_.notify_one();
        }
    } release{*this};
    const auto start = std::chrono::steady_clock::now();
    const BackendRequest request{prompt, input, config_};
    double backoff = retry_.initial_backoff;
    while (true) {
        ++result.attempts;
        try {
            BackendReply reply = backend_->complete(request);
            result.raw_text = std::move(reply.text);
            result.wall_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            result.latency = reply.simulated_latency.value_or(result.wall_seconds);
            break;
        } catch (const TransportError& e) {
            if (result.attempts > retry_.max_retries) {
                result.error = BackendError{"transport", e.what(), result.attempts};
            } else {
                sleeper_(backoff);
                backoff *= 2.0;
                continue;
            }
        } catch (const BackendFailure& e) {
            result.error = BackendError{"backend", e.what(), result.attempts};
        }
        result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        result.latency = backend_->offline() ? 0.0 : result.wall_seconds;
        break;
    }
    return result;
}

} // namespace focalctx
