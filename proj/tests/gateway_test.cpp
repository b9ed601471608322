#include "focalctx/errors.hpp"
#include "focalctx/gateway.hpp"
#include "focalctx/harvest.hpp"
#include "focalctx/parser.hpp"
#include "test_support.hpp"

#include <httplib.h>
#include <json.hpp>

#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>
#include <random>
#include <thread>

namespace focalctx {
namespace {

using json = nlohmann::json;

PromptArtifact artifact(std::string text, Strategy strategy = Strategy::Ours)
{
    PromptArtifact p;
    p.strategy = strategy;
    p.text = std::move(text);
    p.token_count = count_tokens(p.text);
    p.focal_ref = {"", "DoubleUtils", "ensureNonNegative", 1};
    return p;
}

RemoteConfig remote_at(const std::string& url)
{
    RemoteConfig config;
    config.url = url;
    return config;
}

PromptArtifact reference_prompt()
{
    return artifact(testing::read_file(testing::golden_dir() / "ensureNonNegative_ours_prompt.txt"));
}

PromptArtifact baseline_prompt()
{
    return artifact(testing::read_file(testing::golden_dir() / "ensureNonNegative_baseline_prompt.txt"),
                    Strategy::Baseline);
}

std::string synthetic_prompt(std::size_t tokens)
{
    std::mt19937 rng(tokens);
    std::uniform_int_distribution<int> len(1, 12);
    std::string text;
    while (count_tokens(text) < tokens) {
        text += std::string(static_cast<std::size_t>(len(rng)), 'x') + "; ";
    }
    while (count_tokens(text) > tokens) {
        text.pop_back();
    }
    return text;
}

// Throws `failures` transport errors, then echoes.
class FlakyBackend : public Backend {
public:
    explicit FlakyBackend(int failures, bool fatal = false) : failures_(failures), fatal_(fatal) {}
    std::string id() const override { return "flaky"; }
    BackendReply complete(const BackendRequest& request) override
    {
        ++calls;
        if (calls <= failures_) {
            if (fatal_) {
                throw BackendFailure("bad request");
            }
            throw TransportError("connection reset");
        }
        return {std::string(request.input), std::nullopt};
    }
    int calls = 0;

private:
    int failures_;
    bool fatal_;
};

class RecordingSleeper {
public:
    Gateway::Sleeper fn()
    {
        return [this](double s) { slept.push_back(s); };
    }
    std::vector<double> slept;
};

TEST(EchoBackend, RepliesWithThePrompt)
{
    Gateway gw(make_echo_backend(), {});
    const PromptArtifact p = reference_prompt();
    const CompletionResult r = gw.complete(p);
    ASSERT_TRUE(r.raw_text.has_value());
    EXPECT_EQ(*r.raw_text, p.text);
    EXPECT_FALSE(r.truncated_input);
    EXPECT_EQ(r.input_tokens, 186u);
    EXPECT_EQ(r.backend_id, "echo");
    EXPECT_EQ(r.attempts, 1);
    EXPECT_DOUBLE_EQ(r.latency, simulated_latency(186, 186));
}

TEST(Truncation, OversizedPromptIsCutToTheInputLimit)
{
    const PromptArtifact p = artifact(synthetic_prompt(5295));
    ASSERT_EQ(p.token_count, 5295u);
    Gateway gw(make_echo_backend(), {});
    const CompletionResult r = gw.complete(p);
    EXPECT_TRUE(r.truncated_input);
    EXPECT_EQ(r.input_tokens, 1023u);
    EXPECT_EQ(count_tokens(*r.raw_text), 1023u);
    EXPECT_TRUE(p.text.ends_with(r.raw_text->substr(r.raw_text->size() - 200)));
}

TEST(Truncation, HeadModeKeepsTheStart)
{
    const PromptArtifact p = artifact(synthetic_prompt(3000));
    GenerationConfig cfg;
    cfg.truncation = TruncationMode::Head;
    Gateway gw(make_echo_backend(), cfg);
    const CompletionResult r = gw.complete(p);
    EXPECT_EQ(count_tokens(*r.raw_text), 1023u);
    EXPECT_TRUE(p.text.starts_with(r.raw_text->substr(0, 200)));
}

TEST(ReplayBackend, ReturnsTheRecordedReply)
{
    Gateway gw(make_replay_backend(load_replay(testing::demo_dir() / "replay.jsonl")), {});
    const CompletionResult r = gw.complete(reference_prompt());
    ASSERT_TRUE(r.raw_text.has_value()) << r.error->message;
    EXPECT_EQ(*r.raw_text, testing::read_file(testing::data_dir() / "listings/listing3_reply.txt"));
    EXPECT_NE(r.raw_text->find("public class DoubleUtilsTest"), std::string::npos);
}

TEST(ReplayBackend, MissIsANonRetryableFailure)
{
    RecordingSleeper sleeper;
    Gateway gw(make_replay_backend({}), {}, {}, 1, sleeper.fn());
    const CompletionResult r = gw.complete(reference_prompt());
    EXPECT_FALSE(r.raw_text.has_value());
    ASSERT_TRUE(r.error.has_value());
    EXPECT_EQ(r.error->kind, "backend");
    EXPECT_EQ(r.attempts, 1);
    EXPECT_EQ(r.latency, 0.0);
    EXPECT_TRUE(sleeper.slept.empty());
}

TEST(ReplayBackend, LinesRoundTripAndBadLinesAreRejected)
{
    const std::string line = replay_line("prompt text", "reply\ntext");
    const ReplayTable t = parse_replay(line + "\n\n");
    ASSERT_EQ(t.size(), 1u);
    EXPECT_EQ(t.begin()->second, "reply\ntext");
    EXPECT_EQ(json::parse(line).at("prompt_sha256").get<std::string>().size(), 64u);
    EXPECT_THROW(parse_replay("{not json}\n"), ConfigError);
    EXPECT_THROW(parse_replay("{\"response\": \"x\"}\n"), ConfigError);
}

TEST(ContextualBackend, RegurgitatesLongPromptsAndAnswersShortOnes)
{
    Gateway gw(mock_contextual_backend({1023}), {});
    const PromptArtifact base = baseline_prompt();
    const CompletionResult b = gw.complete(base);
    EXPECT_EQ(harvest(*b.raw_text, base).classification, Classification::Regurgitation);

    const CompletionResult o = gw.complete(reference_prompt());
    EXPECT_NE(o.raw_text->find("@Test"), std::string::npos);
    EXPECT_NE(o.raw_text->find("class DoubleUtilsTest"), std::string::npos);
}

TEST(ContextualBackend, ZeroThresholdAlwaysRegurgitates)
{
    Gateway gw(mock_contextual_backend({0}), {});
    for (const PromptArtifact& p : {reference_prompt(), artifact("tiny prompt")}) {
        EXPECT_EQ(harvest(*gw.complete(p).raw_text, p).classification, Classification::Regurgitation);
    }
}

TEST(ContextualBackend, NegativeThresholdIsAConfigError)
{
    EXPECT_THROW(mock_contextual_backend({-1}), ConfigError);
}

TEST(ContextualBackend, IsDeterministic)
{
    Gateway a(mock_contextual_backend({1023}), {});
    Gateway b(mock_contextual_backend({1023}), {});
    for (const PromptArtifact& p : {reference_prompt(), baseline_prompt()}) {
        const CompletionResult x = a.complete(p);
        const CompletionResult y = b.complete(p);
        EXPECT_EQ(*x.raw_text, *y.raw_text);
        EXPECT_EQ(x.latency, y.latency);
    }
}

TEST(SynthesizedReply, NamesTheFocalClassAndMethod)
{
    const std::string reply = synthesize_test_reply(reference_prompt().text);
    EXPECT_NE(reply.find("public class DoubleUtilsTest {"), std::string::npos);
    EXPECT_NE(reply.find("public void testEnsureNonNegative()"), std::string::npos);
    EXPECT_NE(synthesize_test_reply("no markers").find("class FocalTest"), std::string::npos);
}

TEST(Retry, TransportErrorsAreRetriedWithDoublingBackoff)
{
    auto backend = std::make_shared<FlakyBackend>(2);
    RecordingSleeper sleeper;
    Gateway gw(backend, {}, {2, 1.0}, 1, sleeper.fn());
    const CompletionResult r = gw.complete(artifact("a b"));
    EXPECT_TRUE(r.raw_text.has_value());
    EXPECT_EQ(r.attempts, 3);
    EXPECT_EQ(sleeper.slept, (std::vector<double>{1.0, 2.0}));
}

TEST(Retry, ExhaustedRetriesBecomeATransportError)
{
    auto backend = std::make_shared<FlakyBackend>(10);
    RecordingSleeper sleeper;
    Gateway gw(backend, {}, {2, 0.5}, 1, sleeper.fn());
    const CompletionResult r = gw.complete(artifact("a b"));
    ASSERT_TRUE(r.error.has_value());
    EXPECT_EQ(r.error->kind, "transport");
    EXPECT_EQ(r.error->attempts, 3);
    EXPECT_EQ(backend->calls, 3);
    EXPECT_EQ(sleeper.slept, (std::vector<double>{0.5, 1.0}));
    EXPECT_GE(r.latency, 0.0);
    EXPECT_GE(r.wall_seconds, 0.0);
}

TEST(Retry, BackendFailuresAreNotRetried)
{
    auto backend = std::make_shared<FlakyBackend>(1, true);
    RecordingSleeper sleeper;
    Gateway gw(backend, {}, {}, 1, sleeper.fn());
    const CompletionResult r = gw.complete(artifact("a b"));
    EXPECT_EQ(r.error->kind, "backend");
    EXPECT_EQ(backend->calls, 1);
    EXPECT_TRUE(sleeper.slept.empty());
}

class SlowBackend : public Backend {
public:
    std::string id() const override { return "slow"; }
    BackendReply complete(const BackendRequest& request) override
    {
        const int now = ++active;
        int seen = peak.load();
        while (now > seen && !peak.compare_exchange_weak(seen, now)) {
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
        --active;
        return {std::string(request.input), std::nullopt};
    }
    std::atomic<int> active{0};
    std::atomic<int> peak{0};
};

TEST(InFlightCap, NeverExceedsTheLimit)
{
    auto backend = std::make_shared<SlowBackend>();
    Gateway gw(backend, {}, {}, 2);
    const PromptArtifact p = artifact("a b");
    std::vector<std::thread> threads;
    for (int i = 0; i < 8; ++i) {
        threads.emplace_back([&] { gw.complete(p); });
    }
    for (std::thread& t : threads) {
        t.join();
    }
    EXPECT_LE(backend->peak.load(), 2);
    EXPECT_GE(backend->peak.load(), 1);
}

TEST(Config, ValidationRejectsBadValues)
{
    GenerationConfig ok;
    EXPECT_NO_THROW(ok.validate());
    auto bad = [](auto mutate) {
        GenerationConfig c;
        mutate(c);
        EXPECT_THROW(c.validate(), ConfigError);
    };
    bad([](GenerationConfig& c) { c.temperature = -0.1; });
    bad([](GenerationConfig& c) { c.top_p = 0.0; });
    bad([](GenerationConfig& c) { c.top_k = -1; });
    bad([](GenerationConfig& c) { c.max_input_tokens = 4096; });
    bad([](GenerationConfig& c) { c.request_timeout = 0.0; });
    EXPECT_THROW((RetryPolicy{-1, 1.0}.validate()), ConfigError);
}

TEST(SplitInstruction, SeparatesSystemAndUser)
{
    const ChatMessages m = split_instruction(wrap_instruction("be terse", "body\n"));
    EXPECT_EQ(m.system, "be terse");
    EXPECT_EQ(m.user, "body\n");
    const ChatMessages plain = split_instruction("just text");
    EXPECT_EQ(plain.system, "");
    EXPECT_EQ(plain.user, "just text");
}

// Chat-completion endpoint on a loopback port.
class LocalServer {
public:
    LocalServer()
    {
        server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
            ++hits;
            last_body = req.body;
            last_auth = req.get_header_value("Authorization");
            if (hits <= fail_first) {
                res.status = fail_status;
                return;
            }
            const json doc = json::parse(req.body);
            res.set_content(json{{"choices", {{{"message", {{"content", "echo:" + doc["messages"].back()["content"].get<std::string>()}}}}}}}.dump(),
                            "application/json");
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~LocalServer()
    {
        server_.stop();
        thread_.join();
    }
    std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

    std::atomic<int> hits{0};
    int fail_first = 0;
    int fail_status = 503;
    std::string last_body;
    std::string last_auth;

private:
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
};

TEST(RemoteBackend, SendsChatPayloadWithAuthFromEnvironment)
{
    LocalServer server;
    ::setenv("FOCALCTX_TEST_KEY", "s3cret", 1);
    RemoteConfig rc;
    rc.url = server.url();
    rc.auth_env = "FOCALCTX_TEST_KEY";
    Gateway gw(make_remote_backend(rc), {});
    const CompletionResult r = gw.complete(reference_prompt());
    ASSERT_TRUE(r.raw_text.has_value()) << r.error->message;
    EXPECT_TRUE(r.raw_text->starts_with("echo:FOCAL-METHOD-BEGIN"));
    EXPECT_EQ(r.backend_id, "remote");
    EXPECT_EQ(server.last_auth, "Bearer s3cret");
    const json body = json::parse(server.last_body);
    EXPECT_EQ(body["model"], "codellama-34b-instruct");
    EXPECT_EQ(body["messages"][0]["role"], "system");
    EXPECT_EQ(body["messages"][0]["content"], std::string(kOursSystemPrompt));
    EXPECT_EQ(body["messages"][1]["role"], "user");
    EXPECT_EQ(body["temperature"], 0.0);
    EXPECT_EQ(body["max_tokens"], 4096 - 186);
}

TEST(RemoteBackend, ServerErrorsAreRetried)
{
    LocalServer server;
    server.fail_first = 2;
    RecordingSleeper sleeper;
    Gateway gw(make_remote_backend(remote_at(server.url())), {}, {}, 1, sleeper.fn());
    const CompletionResult r = gw.complete(artifact("hello"));
    EXPECT_EQ(*r.raw_text, "echo:hello");
    EXPECT_EQ(r.attempts, 3);
    EXPECT_EQ(server.hits.load(), 3);
}

TEST(RemoteBackend, ClientErrorsAreNotRetried)
{
    LocalServer server;
    server.fail_first = 100;
    server.fail_status = 400;
    RecordingSleeper sleeper;
    Gateway gw(make_remote_backend(remote_at(server.url())), {}, {}, 1, sleeper.fn());
    const CompletionResult r = gw.complete(artifact("hello"));
    ASSERT_TRUE(r.error.has_value());
    EXPECT_EQ(r.error->kind, "backend");
    EXPECT_EQ(server.hits.load(), 1);
}

TEST(RemoteBackend, UnreachableHostIsATransportError)
{
    std::string url;
    {
        LocalServer gone;
        url = gone.url();
    }
    RecordingSleeper sleeper;
    GenerationConfig cfg;
    cfg.request_timeout = 2.0;
    Gateway gw(make_remote_backend(remote_at(url)), cfg, {1, 0.0}, 1, sleeper.fn());
    const CompletionResult r = gw.complete(artifact("hello"));
    ASSERT_TRUE(r.error.has_value());
    EXPECT_EQ(r.error->kind, "transport");
    EXPECT_EQ(r.attempts, 2);
}

TEST(RemoteBackend, MissingSecretIsAConfigError)
{
    ::unsetenv("FOCALCTX_UNSET_KEY");
    RemoteConfig rc;
    rc.url = "http://127.0.0.1:1";
    rc.auth_env = "FOCALCTX_UNSET_KEY";
    EXPECT_THROW(make_remote_backend(rc), ConfigError);
    EXPECT_THROW(make_remote_backend(RemoteConfig{}), ConfigError);
}

} // namespace
} // namespace focalctx
