#pragma once

#include "focalctx/prompt.hpp"
#include "focalctx/tokenizer.hpp"

#include <condition_variable>
#include <filesystem>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace focalctx {

struct GenerationConfig {
    std::size_t max_input_tokens = 1023;
    std::size_t context_length = 4096;
    double temperature = 0.0;
    int top_k = 50;
    double top_p = 0.95;
    std::string model_id = "codellama-34b-instruct";
    /// Seconds.
    double request_timeout = 120.0;
    TruncationMode truncation = TruncationMode::Tail;

    /// Throws ConfigError on violated invariants.
    void validate() const;
    bool operator==(const GenerationConfig&) const = default;
};

struct RetryPolicy {
    int max_retries = 2;
    /// Seconds before the first retry; doubled for each further one.
    double initial_backoff = 1.0;

    void validate() const;
    bool operator==(const RetryPolicy&) const = default;
};

struct BackendError {
    /// "transport" (retries exhausted) or "backend" (not retryable).
    std::string kind;
    std::string message;
    int attempts = 0;

    bool operator==(const BackendError&) const = default;
};

struct CompletionResult {
    /// Absent exactly when `error` is present.
    std::optional<std::string> raw_text;
    /// Model latency in seconds; simulated for offline backends.
    double latency = 0.0;
    /// Measured wall-clock seconds around the backend call, retries included.
    double wall_seconds = 0.0;
    std::string backend_id;
    bool truncated_input = false;
    std::size_t input_tokens = 0;
    int attempts = 0;
    std::optional<BackendError> error;
};

/// Failure worth retrying: connection problems, timeouts, 429 and 5xx.
class TransportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Failure that retrying cannot fix: replay miss, malformed reply, 4xx.
class BackendFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct BackendRequest {
    const PromptArtifact& prompt;
    /// Text actually sent, after truncation.
    std::string_view input;
    const GenerationConfig& config;
};

struct BackendReply {
    std::string text;
    /// Deterministic latency for offline backends; wall-clock is used otherwise.
    std::optional<double> simulated_latency;
};

class Backend {
public:
    virtual ~Backend() = default;
    virtual std::string id() const = 0;
    /// Offline backends report simulated latency, so failures cost 0 s.
    virtual bool offline() const { return false; }
    /// Throws TransportError or BackendFailure.
    virtual BackendReply complete(const BackendRequest& request) = 0;
};

/// Latency charged by offline backends: 1 ms per input token, 5 ms per output token.
double simulated_latency(std::size_t input_tokens, std::size_t output_tokens);

/// Replies with the received input.
std::shared_ptr<Backend> make_echo_backend();

struct ContextualProfile {
    /// Prompts whose untruncated token count exceeds this are regurgitated.
    long long threshold = 1023;

    void validate() const;
};

/// Deterministic stand-in for a model: above the threshold it returns the
/// input it received, otherwise a minimal fenced test class for the focal
/// class named in the prompt.
std::shared_ptr<Backend> mock_contextual_backend(const ContextualProfile& profile);

/// The reply the contextual backend synthesizes for a prompt.
std::string synthesize_test_reply(std::string_view prompt_text);

/// Replay records, keyed by sha256 of the untruncated prompt text.
using ReplayTable = std::map<std::string, std::string>;

/// Line-delimited JSON objects {"prompt_sha256": ..., "response": ...}.
ReplayTable parse_replay(std::string_view text);
ReplayTable load_replay(const std::filesystem::path& path);
std::string replay_line(std::string_view prompt_text, std::string_view response);

std::shared_ptr<Backend> make_replay_backend(ReplayTable table);

struct RemoteConfig {
    /// Scheme, host and optional port, e.g. "http://localhost:8080".
    std::string url;
    std::string path = "/v1/chat/completions";
    std::string auth_header = "Authorization";
    std::string auth_prefix = "Bearer ";
    /// Name of the environment variable holding the key; empty for no auth.
    std::string auth_env;
};

/// Chat-completion client. Throws ConfigError when `auth_env` names an unset variable.
std::shared_ptr<Backend> make_remote_backend(const RemoteConfig& config);

struct ChatMessages {
    std::string system;
    std::string user;
};

/// Splits an "[INST] <<SYS>> ... <</SYS>> ... [/INST]" prompt; text without a
/// system block becomes the user message as is.
ChatMessages split_instruction(std::string_view text);

/// Sends prompts to one backend with truncation, retries and an in-flight cap.
class Gateway {
public:
    using Sleeper = std::function<void(double seconds)>;

    Gateway(std::shared_ptr<Backend> backend, GenerationConfig config, RetryPolicy retry = {},
            std::size_t max_in_flight = 1, Sleeper sleeper = {});

    CompletionResult complete(const PromptArtifact& prompt);

    const GenerationConfig& config() const { return config_; }
    std::string backend_id() const { return backend_->id(); }

private:
    std::shared_ptr<Backend> backend_;
    GenerationConfig config_;
    RetryPolicy retry_;
    std::size_t max_in_flight_;
    Sleeper sleeper_;
    std::mutex mutex_;
    std::condition_variable slot_free_;
    std::size_t in_flight_ = 0;
};

} // namespace focalctx
