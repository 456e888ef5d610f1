#include "credence/backend.hpp"

#include <cctype>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <random>
#include <thread>

#include <httplib.h>

#include "credence/textutil.hpp"

namespace credence {

namespace {

const char* role_name(MessageRole r) {
    switch (r) {
    case MessageRole::system: return "system";
    case MessageRole::user: return "user";
    case MessageRole::assistant: return "assistant";
    }
    return "user";
}

void validate_request(const ChatRequest& req) {
    if (req.messages.empty()) throw PreconditionError("ChatRequest.messages must be non-empty");
    if (req.temperature < 0) throw PreconditionError("ChatRequest.temperature must be >= 0");
    if (req.max_tokens && *req.max_tokens <= 0)
        throw PreconditionError("ChatRequest.max_tokens must be positive");
}

// Splits "scheme://host[:port][/prefix]" into the client base and path prefix.
std::pair<std::string, std::string> split_base_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        throw PreconditionError("base_url must include a scheme: " + url);
    auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, ""};
    std::string prefix = url.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    return {url.substr(0, path_start), prefix};
}

std::uint64_t xorshift64(std::uint64_t& s) {
    s ^= s << 13;
    s ^= s >> 7;
    s ^= s << 17;
    return s;
}

// Small fixed vocabulary for synthetic mock text.
const char* kMockWords[] = {
    "local",    "officials", "report",   "signal",   "coverage", "network",  "study",
    "sources",  "update",    "analysts", "regional", "claims",   "figures",  "survey",
    "records",  "outage",    "impact",   "residents", "service",  "measured", "observers",
    "briefing", "statement", "response", "findings", "expected", "confirmed", "pending",
    "alleged",  "estimate",  "industry", "partial"};
constexpr std::size_t kMockWordCount = sizeof(kMockWords) / sizeof(kMockWords[0]);

std::string pseudo_sentence(std::uint64_t h, int words) {
    std::string out;
    for (int i = 0; i < words; ++i) {
        h = fnv1a_mix(h, static_cast<std::uint64_t>(i) + 0x9e37ULL);
        std::string w = kMockWords[h % kMockWordCount];
        if (i == 0) w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
        if (!out.empty()) out += ' ';
        out += w;
    }
    out += '.';
    return out;
}

std::string json_quote(const std::string& s) { return nlohmann::json(s).dump(); }

// Recovers the requested comment count from the planner prompt ("please post
// <word> social media comments"); falls back to 3.
int planner_count_from_prompt(const std::string& prompt) {
    const std::string marker = "please post ";
    auto pos = prompt.find(marker);
    if (pos == std::string::npos) return 3;
    pos += marker.size();
    auto end = prompt.find(' ', pos);
    if (end == std::string::npos) return 3;
    const std::string word = prompt.substr(pos, end - pos);
    for (int n = 1; n <= 12; ++n)
        if (word == number_word(n)) return n;
    try {
        const int n = std::stoi(word);
        if (n > 0) return n;
    } catch (...) {
    }
    return 3;
}

} // namespace

ChatRequest ChatRequest::user_prompt(std::string model_id, std::string stage, std::string prompt) {
    ChatRequest req;
    req.model_id = std::move(model_id);
    req.stage = std::move(stage);
    req.messages.push_back({MessageRole::user, std::move(prompt)});
    return req;
}

void BackendConfig::validate() const {
    if (max_parallel < 1) throw PreconditionError("max_parallel must be >= 1");
    if (retry_max < 0) throw PreconditionError("retry_max must be >= 0");
    if (retry_base_delay_ms < 1) throw PreconditionError("retry_base_delay_ms must be >= 1");
    if (mode == BackendMode::http) {
        if (base_url.empty()) throw PreconditionError("http mode requires base_url");
        split_base_url(base_url);
    }
}

BackendConfig BackendConfig::from_json(const nlohmann::json& j) {
    BackendConfig cfg;
    const std::string mode = j.value("mode", "mock");
    if (mode == "http")
        cfg.mode = BackendMode::http;
    else if (mode == "mock")
        cfg.mode = BackendMode::mock;
    else
        throw PreconditionError("unknown backend mode: " + mode);
    cfg.base_url = j.value("base_url", "");
    cfg.api_key_env = j.value("api_key_env", "");
    cfg.max_parallel = j.value("max_parallel", cfg.max_parallel);
    cfg.retry_max = j.value("retry_max", cfg.retry_max);
    cfg.retry_base_delay_ms = j.value("retry_base_delay_ms", cfg.retry_base_delay_ms);
    cfg.timeout_sec = j.value("timeout_sec", cfg.timeout_sec);
    cfg.mock_seed = j.value("mock_seed", cfg.mock_seed);
    cfg.mock_script = j.value("mock_script", "");
    cfg.validate();
    return cfg;
}

nlohmann::json BackendConfig::to_json() const {
    nlohmann::json j;
    j["mode"] = mode == BackendMode::http ? "http" : "mock";
    j["base_url"] = base_url;
    j["api_key_env"] = api_key_env;
    j["max_parallel"] = max_parallel;
    j["retry_max"] = retry_max;
    j["retry_base_delay_ms"] = retry_base_delay_ms;
    j["timeout_sec"] = timeout_sec;
    j["mock_seed"] = mock_seed;
    j["mock_script"] = mock_script;
    return j;
}

MockScript MockScript::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open mock script: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("invalid mock script JSON: " + std::string(e.what()));
    }
    return from_json(j);
}

MockScript MockScript::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ParseError("mock script must be a JSON object");
    MockScript script;
    for (const auto& [stage, value] : j.items()) {
        Entry entry;
        const nlohmann::json* responses = &value;
        if (value.is_object()) {
            const std::string policy = value.value("policy", "cycle");
            if (policy == "sample")
                entry.policy = Entry::Policy::sample;
            else if (policy != "cycle")
                throw ParseError("unknown script policy: " + policy);
            if (!value.contains("responses"))
                throw ParseError("script entry for '" + stage + "' missing responses");
            responses = &value.at("responses");
        }
        if (!responses->is_array())
            throw ParseError("script entry for '" + stage + "' must be a list of strings");
        for (const auto& r : *responses) {
            if (!r.is_string())
                throw ParseError("script entry for '" + stage + "' must contain only strings");
            entry.responses.push_back(r.get<std::string>());
        }
        if (entry.responses.empty())
            throw ParseError("script entry for '" + stage + "' must be non-empty");
        script.entries_.emplace(stage, std::move(entry));
    }
    return script;
}

const MockScript::Entry* MockScript::find(const std::string& stage) const {
    auto it = entries_.find(stage);
    return it == entries_.end() ? nullptr : &it->second;
}

std::string script_lookup(const MockScript& script, const std::string& stage,
                          std::uint64_t occurrence, std::uint64_t seed) {
    const MockScript::Entry* entry = script.find(stage);
    if (!entry) entry = script.find("default");
    if (!entry) throw UnknownStage("mock script has no entry for stage '" + stage + "' and no default");
    std::size_t idx;
    if (entry->policy == MockScript::Entry::Policy::cycle) {
        idx = static_cast<std::size_t>(occurrence % entry->responses.size());
    } else {
        std::uint64_t h = fnv1a(stage, seed);
        h = fnv1a_mix(h, occurrence);
        idx = static_cast<std::size_t>(h % entry->responses.size());
    }
    return entry->responses[idx];
}

std::string mock_synthesize(const ChatRequest& req, std::uint64_t occurrence, std::uint64_t seed) {
    std::uint64_t h = fnv1a(req.stage, seed ^ 0x51ed270b2f6e69c5ULL);
    h = fnv1a_mix(h, occurrence);
    for (const auto& m : req.messages) h = fnv1a(m.content, h);
    const std::string& stage_name = req.stage;
    const std::string prompt = req.messages.empty() ? std::string() : req.messages.back().content;

    if (stage_name == stage::genesis) {
        return pseudo_sentence(h, 14);
    }
    if (stage_name == stage::planner) {
        const int count = planner_count_from_prompt(prompt);
        std::string out = "[";
        for (int i = 0; i < count; ++i) {
            if (i) out += ", ";
            out += json_quote(pseudo_sentence(fnv1a_mix(h, 100 + i), 9));
        }
        out += "]";
        return out;
    }
    if (stage_name == stage::reviewer) {
        return "The evidence " + pseudo_sentence(fnv1a_mix(h, 7), 10) +
               " It lacks verifiable attribution and independent corroboration.";
    }
    if (stage_name == stage::refiner) {
        std::string out;
        if ((h >> 8) % 3 == 0) out += "According to BBC, ";
        out += pseudo_sentence(fnv1a_mix(h, 11), 12);
        if ((h >> 16) % 3 == 0) out += " The account was first aired in 2023.";
        return out;
    }
    if (stage_name == stage::quantify || stage_name == stage::credibility ||
        stage_name == stage::suggestion_compare) {
        return std::to_string(1 + static_cast<int>(h % 5));
    }
    if (stage_name == stage::belief) {
        nlohmann::json j;
        j["score"] = 1 + static_cast<int>(h % 5);
        j["reason"] = pseudo_sentence(fnv1a_mix(h, 13), 8);
        return j.dump();
    }
    if (stage_name == stage::analyst) {
        return "Warning: this evidence " + pseudo_sentence(fnv1a_mix(h, 17), 9) +
               " It appears intended to lend credibility to the claim.";
    }
    if (stage_name == stage::intent_classify) {
        const std::uint64_t bucket = h % 10;
        if (bucket < 2) return "Label: Direct Support";
        if (bucket < 9) return "Label: Indirect Support";
        return "Label: Other";
    }
    if (stage_name == stage::advice_question) {
        std::string core = pseudo_sentence(fnv1a_mix(h, 19), 6);
        core.pop_back(); // drop the period
        core[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(core[0])));
        return "Should I " + core + "?";
    }
    if (stage_name == stage::suggestion) {
        return "Consider " + pseudo_sentence(fnv1a_mix(h, 23), 10);
    }
    return pseudo_sentence(h, 10);
}

std::int64_t backoff_delay_ms(int attempt, int base_delay_ms, std::uint64_t jitter) {
    const int capped = attempt < 20 ? attempt : 20;
    const std::int64_t base = static_cast<std::int64_t>(base_delay_ms) << capped;
    return base + static_cast<std::int64_t>(jitter % static_cast<std::uint64_t>(base_delay_ms));
}

Limiter::Limiter(int max_parallel) : available_(max_parallel) {}

void Limiter::acquire() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return available_ > 0; });
    --available_;
}

void Limiter::release() {
    {
        std::lock_guard lock(mu_);
        ++available_;
    }
    cv_.notify_one();
}

namespace {
struct LimiterGuard {
    explicit LimiterGuard(Limiter& l) : limiter(l) { limiter.acquire(); }
    ~LimiterGuard() { limiter.release(); }
    Limiter& limiter;
};
} // namespace

namespace {
int checked_parallel(const BackendConfig& cfg) {
    cfg.validate();
    return cfg.max_parallel;
}
} // namespace

Backend::Backend(BackendConfig cfg)
    : cfg_(std::move(cfg)), limiter_(checked_parallel(cfg_)), rng_state_(0) {
    if (cfg_.mode == BackendMode::mock && !cfg_.mock_script.empty())
        script_ = MockScript::load(cfg_.mock_script);
    std::random_device rd;
    rng_state_ = (static_cast<std::uint64_t>(rd()) << 32) ^ rd() ^ 0x6a09e667f3bcc909ULL;
}

ChatResponse Backend::complete(const ChatRequest& req) {
    validate_request(req);
    if (cfg_.mode == BackendMode::mock) return complete_mock(req);
    return complete_http(req);
}

ChatResponse Backend::complete_mock(const ChatRequest& req) {
    std::uint64_t occurrence;
    {
        std::lock_guard lock(mock_mu_);
        occurrence = stage_counts_[req.stage]++;
    }
    ChatResponse resp;
    if (!script_.empty())
        resp.content = script_lookup(script_, req.stage, occurrence, cfg_.mock_seed);
    else
        resp.content = mock_synthesize(req, occurrence, cfg_.mock_seed);
    resp.finish_reason = FinishReason::stop;
    resp.latency_ms = 0;
    return resp;
}

ChatResponse Backend::complete_http(const ChatRequest& req) {
    const auto [client_base, prefix] = split_base_url(cfg_.base_url);

    nlohmann::json body;
    body["model"] = req.model_id;
    auto msgs = nlohmann::json::array();
    for (const auto& m : req.messages)
        msgs.push_back({{"role", role_name(m.role)}, {"content", m.content}});
    body["messages"] = std::move(msgs);
    body["temperature"] = req.temperature;
    if (req.max_tokens) body["max_tokens"] = *req.max_tokens;
    const std::string payload = body.dump();

    std::string api_key;
    if (!cfg_.api_key_env.empty()) {
        if (const char* v = std::getenv(cfg_.api_key_env.c_str())) api_key = v;
    }

    const auto started = std::chrono::steady_clock::now();
    auto elapsed_ms = [&] {
        return std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::steady_clock::now() - started)
            .count();
    };

    std::string last_cause = "no attempt made";
    for (int attempt = 0; attempt <= cfg_.retry_max; ++attempt) {
        if (attempt > 0) {
            std::uint64_t jitter;
            {
                std::lock_guard lock(rng_mu_);
                jitter = xorshift64(rng_state_);
            }
            const auto delay = backoff_delay_ms(attempt - 1, cfg_.retry_base_delay_ms, jitter);
            std::this_thread::sleep_for(std::chrono::milliseconds(delay));
        }

        httplib::Result result;
        {
            LimiterGuard guard(limiter_);
            httplib::Client client(client_base);
            client.set_connection_timeout(cfg_.timeout_sec, 0);
            client.set_read_timeout(cfg_.timeout_sec, 0);
            client.set_write_timeout(cfg_.timeout_sec, 0);
            httplib::Headers headers;
            if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + api_key);
            result = client.Post(prefix + "/chat/completions", headers, payload, "application/json");
        }

        if (!result) {
            last_cause = "transport error: " + httplib::to_string(result.error());
            continue;
        }
        const int status = result->status;
        if (status == 200) {
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(result->body);
            } catch (const nlohmann::json::exception&) {
                throw MalformedResponse("response body is not JSON");
            }
            if (!j.contains("choices") || !j["choices"].is_array() || j["choices"].empty())
                throw MalformedResponse("response has no choices");
            const auto& choice = j["choices"][0];
            if (!choice.contains("message") || !choice["message"].contains("content") ||
                !choice["message"]["content"].is_string())
                throw MalformedResponse("response choice missing message content");
            ChatResponse resp;
            resp.content = choice["message"]["content"].get<std::string>();
            const std::string reason = choice.value("finish_reason", "stop");
            resp.finish_reason = reason == "length" ? FinishReason::length : FinishReason::stop;
            const auto ms = elapsed_ms();
            resp.latency_ms = ms > 0 ? ms : 1;
            return resp;
        }
        if (status == 401 || status == 403)
            throw AuthError("authentication rejected (HTTP " + std::to_string(status) + ")");
        if (status == 429 || status >= 500) {
            last_cause = "HTTP " + std::to_string(status);
            continue;
        }
        throw BackendError("unexpected HTTP status " + std::to_string(status) + ": " +
                           result->body.substr(0, 200));
    }
    throw ExhaustedRetries("gave up after " + std::to_string(cfg_.retry_max) + " retries",
                           last_cause);
}

ChatResponse complete(const BackendConfig& cfg, const ChatRequest& req) {
    Backend backend(cfg);
    return backend.complete(req);
}

} // namespace credence
