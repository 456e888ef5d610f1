#pragma once

#include <condition_variable>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "credence/errors.hpp"

namespace credence {

// Stage tags stamped into every pipeline request. They are request metadata:
// the mock routes on them, the live wire protocol never sees them.
namespace stage {
inline constexpr const char* genesis = "genesis";
inline constexpr const char* planner = "planner";
inline constexpr const char* reviewer = "reviewer";
inline constexpr const char* quantify = "quantify";
inline constexpr const char* refiner = "refiner";
inline constexpr const char* belief = "belief";
inline constexpr const char* credibility = "credibility";
inline constexpr const char* analyst = "analyst";
inline constexpr const char* intent_classify = "intent_classify";
inline constexpr const char* advice_question = "advice_question";
inline constexpr const char* suggestion = "suggestion";
inline constexpr const char* suggestion_compare = "suggestion_compare";
} // namespace stage

enum class MessageRole { system, user, assistant };

struct ChatMessage {
    MessageRole role = MessageRole::user;
    std::string content;
};

struct ChatRequest {
    std::string model_id;
    std::vector<ChatMessage> messages;
    double temperature = 0.0;
    std::optional<int> max_tokens;
    std::string stage; // metadata only, lives outside the prompt text

    static ChatRequest user_prompt(std::string model_id, std::string stage, std::string prompt);
};

enum class FinishReason { stop, length, error };

struct ChatResponse {
    std::string content;
    FinishReason finish_reason = FinishReason::stop;
    std::int64_t latency_ms = 0;
};

enum class BackendMode { http, mock };

struct BackendConfig {
    BackendMode mode = BackendMode::mock;
    std::string base_url;
    std::string api_key_env;
    int max_parallel = 4;
    int retry_max = 5;
    int retry_base_delay_ms = 500;
    int timeout_sec = 120;
    std::uint64_t mock_seed = 0;
    std::string mock_script; // optional path to a script file

    void validate() const; // throws PreconditionError

    static BackendConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

// Scripted mock responses: a JSON object mapping stage name -> list of
// response strings, or -> {"policy": "cycle"|"sample", "responses": [...]}.
// A "default" entry answers stages without their own entry.
class MockScript {
public:
    struct Entry {
        enum class Policy { cycle, sample };
        Policy policy = Policy::cycle;
        std::vector<std::string> responses;
    };

    MockScript() = default;
    static MockScript load(const std::string& path);
    static MockScript from_json(const nlohmann::json& j);

    bool empty() const { return entries_.empty(); }
    const Entry* find(const std::string& stage) const;

private:
    std::map<std::string, Entry> entries_;
};

// Response text for the k-th request of a stage under a script.
// Throws UnknownStage when the script has no entry for the stage and no default.
std::string script_lookup(const MockScript& script, const std::string& stage,
                          std::uint64_t occurrence, std::uint64_t seed);

// Stage-aware synthetic response used by the mock when no script entry
// applies. Pure function of (seed, stage, occurrence, request content), so
// replays are byte-identical.
std::string mock_synthesize(const ChatRequest& req, std::uint64_t occurrence, std::uint64_t seed);

// Backoff delay before retry attempt `attempt` (0-based): base * 2^attempt
// plus an additive jitter in [0, base). Monotone in `attempt` for any jitter.
std::int64_t backoff_delay_ms(int attempt, int base_delay_ms, std::uint64_t jitter);

// Bounded-concurrency gate shared by all callers of one backend.
class Limiter {
public:
    explicit Limiter(int max_parallel);
    void acquire();
    void release();

private:
    std::mutex mu_;
    std::condition_variable cv_;
    int available_;
};

// Uniform gateway for chat completions. A single Backend is shareable across
// concurrent callers; at most max_parallel requests are in flight at once.
// Responses are immutable values.
class Backend {
public:
    explicit Backend(BackendConfig cfg);

    ChatResponse complete(const ChatRequest& req);

    const BackendConfig& config() const { return cfg_; }

private:
    ChatResponse complete_http(const ChatRequest& req);
    ChatResponse complete_mock(const ChatRequest& req);

    BackendConfig cfg_;
    MockScript script_;
    Limiter limiter_;
    std::mutex mock_mu_;
    std::map<std::string, std::uint64_t> stage_counts_;
    std::mutex rng_mu_;
    std::uint64_t rng_state_;
};

// One-shot convenience over a freshly constructed Backend.
ChatResponse complete(const BackendConfig& cfg, const ChatRequest& req);

} // namespace credence
