#include "focalctx/errors.hpp"
#include "focalctx/gateway.hpp"

#include <httplib.h>
#include <json.hpp>

#include <cmath>
#include <cstdlib>

namespace focalctx {

using json = nlohmann::json;

namespace {

class RemoteBackend final : public Backend {
public:
    RemoteBackend(RemoteConfig config, std::string secret) : config_(std::move(config)), secret_(std::move(secret)) {}

    std::string id() const override { return "remote"; }

    BackendReply complete(const BackendRequest& request) override
    {
        const GenerationConfig& cfg = request.config;
        const ChatMessages messages = split_instruction(request.input);

        json body;
        body["model"] = cfg.model_id;
        body["messages"] = json::array();
        if (!messages.system.empty()) {
            body["messages"].push_back({{"role", "system"}, {"content", messages.system}});
        }
        body["messages"].push_back({{"role", "user"}, {"content", messages.user}});
        body["temperature"] = cfg.temperature;
        body["top_k"] = cfg.top_k;
        body["top_p"] = cfg.top_p;
        const std::size_t input_tokens = count_tokens(request.input, request.prompt.tokenizer);
        body["max_tokens"] = cfg.context_length > input_tokens ? cfg.context_length - input_tokens : 1;

        httplib::Client client(config_.url);
        const auto seconds = static_cast<time_t>(cfg.request_timeout);
        const auto micros = static_cast<time_t>((cfg.request_timeout - static_cast<double>(seconds)) * 1e6);
        client.set_connection_timeout(seconds, micros);
        client.set_read_timeout(seconds, micros);
        client.set_write_timeout(seconds, micros);

        httplib::Headers headers;
        if (!config_.auth_env.empty()) {
            headers.emplace(config_.auth_header, config_.auth_prefix + secret_);
        }
        const std::string payload = body.dump(-1, ' ', false, json::error_handler_t::replace);
        const httplib::Result res = client.Post(config_.path, headers, payload, "application/json");
        if (!res) {
            throw TransportError("request to " + config_.url + config_.path +
                                 " failed: " + httplib::to_string(res.error()));
        }
        if (res->status == 429 || res->status >= 500) {
            throw TransportError("HTTP " + std::to_string(res->status));
        }
        if (res->status != 200) {
            throw BackendFailure("HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200));
        }
        try {
            const json reply = json::parse(res->body);
            const json& choice = reply.at("choices").at(0);
            if (choice.contains("message")) {
                return {choice.at("message").at("content").get<std::string>(), std::nullopt};
            }
            return {choice.at("text").get<std::string>(), std::nullopt};
        } catch (const json::exception& e) {
            throw BackendFailure(std::string("malformed completion reply: ") + e.what());
        }
    }

private:
    RemoteConfig config_;
    std::string secret_;
};

} // namespace

std::shared_ptr<Backend> make_remote_backend(const RemoteConfig& config)
{
    if (config.url.empty()) {
        throw ConfigError("remote backend needs backend.url");
    }
    std::string secret;
    if (!config.auth_env.empty()) {
        const char* value = std::getenv(config.auth_env.c_str());
        if (value == nullptr || *value == '\0') {
            throw ConfigError("environment variable " + config.auth_env + " (backend.auth_env) is not set");
        }
        secret = value;
    }
    return std::make_shared<RemoteBackend>(config, std::move(secret));
}

} // namespace focalctx
