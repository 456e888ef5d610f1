#include <doctest.h>

#include <atomic>
#include <thread>
#include <vector>

#include <httplib.h>

#include "credence/backend.hpp"
#include "support.hpp"

using namespace credence;
using testsupport::TempDir;

namespace {

ChatRequest req_for(const std::string& stage_name, const std::string& prompt = "hello") {
    return ChatRequest::user_prompt("test-model", stage_name, prompt);
}

} // namespace

TEST_CASE("mock backend is deterministic for a fixed seed") {
    BackendConfig cfg;
    cfg.mode = BackendMode::mock;
    cfg.mock_seed = 42;

    Backend a(cfg);
    Backend b(cfg);
    for (int i = 0; i < 10; ++i) {
        const auto ra = a.complete(req_for(stage::reviewer, "evidence " + std::to_string(i)));
        const auto rb = b.complete(req_for(stage::reviewer, "evidence " + std::to_string(i)));
        CHECK(ra.content == rb.content);
        CHECK(ra.latency_ms == 0);
    }

    Backend c(cfg);
    cfg.mock_seed = 43;
    Backend d(cfg);
    CHECK(c.complete(req_for(stage::reviewer)).content !=
          d.complete(req_for(stage::reviewer)).content);
}

TEST_CASE("mock synthesizer output parses per stage") {
    BackendConfig cfg;
    cfg.mock_seed = 5;
    Backend backend(cfg);

    const auto planner = backend.complete(req_for(
        stage::planner, "please post three social media comments"));
    CHECK(planner.content.front() == '[');
    CHECK(planner.content.back() == ']');

    const auto belief = backend.complete(req_for(stage::belief));
    const auto j = nlohmann::json::parse(belief.content);
    const int score = j.at("score").get<int>();
    CHECK(score >= 1);
    CHECK(score <= 5);

    const auto quantify = backend.complete(req_for(stage::quantify));
    CHECK(quantify.content.size() == 1);
    CHECK(quantify.content[0] >= '1');
    CHECK(quantify.content[0] <= '5');
}

TEST_CASE("scripted mock routes by stage") {
    TempDir dir;
    const auto cfg = testsupport::scripted_config(
        dir, {{"reviewer", {"fixed judgment text"}}, {"default", {"OK"}}});
    Backend backend(cfg);

    CHECK(backend.complete(req_for(stage::reviewer)).content == "fixed judgment text");
    CHECK(backend.complete(req_for(stage::reviewer, "other prompt")).content ==
          "fixed judgment text");
    // stage without an entry falls to the default
    CHECK(backend.complete(req_for(stage::planner)).content == "OK");
}

TEST_CASE("scripted sequences index by per-stage occurrence and cycle") {
    TempDir dir;
    const auto cfg =
        testsupport::scripted_config(dir, {{"quantify", {"1", "2", "3"}}});
    Backend backend(cfg);
    CHECK(backend.complete(req_for(stage::quantify)).content == "1");
    CHECK(backend.complete(req_for(stage::quantify)).content == "2");
    CHECK(backend.complete(req_for(stage::quantify)).content == "3");
    CHECK(backend.complete(req_for(stage::quantify)).content == "1"); // cycles
}

TEST_CASE("script without entry or default raises UnknownStage") {
    TempDir dir;
    const auto cfg = testsupport::scripted_config(dir, {{"reviewer", {"x"}}});
    Backend backend(cfg);
    CHECK_THROWS_AS((void)backend.complete(req_for(stage::planner)), UnknownStage);
}

TEST_CASE("sample policy picks a seeded deterministic entry") {
    TempDir dir;
    nlohmann::json script;
    script["quantify"] = {{"policy", "sample"}, {"responses", {"1", "2", "3", "4", "5"}}};
    const auto cfg = testsupport::scripted_config(dir, script, 99);

    Backend a(cfg);
    Backend b(cfg);
    for (int i = 0; i < 8; ++i)
        CHECK(a.complete(req_for(stage::quantify)).content ==
              b.complete(req_for(stage::quantify)).content);
}

TEST_CASE("request validation") {
    BackendConfig cfg;
    Backend backend(cfg);
    ChatRequest empty;
    empty.model_id = "m";
    CHECK_THROWS_AS((void)backend.complete(empty), PreconditionError);

    auto bad_temp = req_for(stage::belief);
    bad_temp.temperature = -1.0;
    CHECK_THROWS_AS((void)backend.complete(bad_temp), PreconditionError);
}

TEST_CASE("config validation") {
    BackendConfig cfg;
    cfg.mode = BackendMode::http;
    CHECK_THROWS_AS(cfg.validate(), PreconditionError); // no base_url
    cfg.base_url = "http://localhost:1234/v1";
    CHECK_NOTHROW(cfg.validate());
    cfg.max_parallel = 0;
    CHECK_THROWS_AS(cfg.validate(), PreconditionError);
}

TEST_CASE("backoff delays are monotone and jittered within a base step") {
    for (std::uint64_t jitter : {0ULL, 17ULL, 499ULL, 123456789ULL}) {
        std::int64_t prev = -1;
        for (int attempt = 0; attempt < 8; ++attempt) {
            const auto d = backoff_delay_ms(attempt, 500, jitter);
            CHECK(d >= 500LL << attempt);
            CHECK(d < (500LL << attempt) + 500);
            CHECK(d > prev);
            prev = d;
        }
    }
    // monotone even across different jitter draws per attempt
    std::mt19937_64 rng(1);
    std::int64_t prev = -1;
    for (int attempt = 0; attempt < 10; ++attempt) {
        const auto d = backoff_delay_ms(attempt, 250, rng());
        CHECK(d >= prev);
        prev = d;
    }
}

// --- live-wire tests against a local stub server ---

namespace {

struct StubServer {
    httplib::Server server;
    std::thread thread;
    int port = 0;

    explicit StubServer(httplib::Server::Handler handler) {
        server.Post("/v1/chat/completions", std::move(handler));
        port = server.bind_to_any_port("127.0.0.1");
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }
    ~StubServer() {
        server.stop();
        thread.join();
    }
    std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port) + "/v1"; }
};

std::string ok_body(const std::string& content) {
    nlohmann::json j;
    j["choices"] = {{{"message", {{"content", content}}}, {"finish_reason", "stop"}}};
    return j.dump();
}

BackendConfig http_config(const StubServer& stub, int retry_max = 3) {
    BackendConfig cfg;
    cfg.mode = BackendMode::http;
    cfg.base_url = stub.base_url();
    cfg.retry_max = retry_max;
    cfg.retry_base_delay_ms = 10;
    cfg.timeout_sec = 5;
    return cfg;
}

} // namespace

TEST_CASE("http 429 then 200 succeeds after one retry") {
    std::atomic<int> calls{0};
    StubServer stub([&](const httplib::Request&, httplib::Response& res) {
        if (calls.fetch_add(1) == 0) {
            res.status = 429;
            res.set_content("slow down", "text/plain");
        } else {
            res.set_content(ok_body("recovered"), "application/json");
        }
    });

    Backend backend(http_config(stub));
    const auto resp = backend.complete(req_for(stage::belief));
    CHECK(resp.content == "recovered");
    CHECK(resp.latency_ms > 0);
    CHECK(calls.load() == 2);
}

TEST_CASE("http 401 raises AuthError without retrying") {
    std::atomic<int> calls{0};
    StubServer stub([&](const httplib::Request&, httplib::Response& res) {
        calls.fetch_add(1);
        res.status = 401;
    });
    Backend backend(http_config(stub));
    CHECK_THROWS_AS((void)backend.complete(req_for(stage::belief)), AuthError);
    CHECK(calls.load() == 1);
}

TEST_CASE("persistent 500 exhausts retries") {
    std::atomic<int> calls{0};
    StubServer stub([&](const httplib::Request&, httplib::Response& res) {
        calls.fetch_add(1);
        res.status = 500;
    });
    Backend backend(http_config(stub, 2));
    CHECK_THROWS_AS((void)backend.complete(req_for(stage::belief)), ExhaustedRetries);
    CHECK(calls.load() == 3); // initial attempt + 2 retries
}

TEST_CASE("missing content field raises MalformedResponse") {
    StubServer stub([&](const httplib::Request&, httplib::Response& res) {
        res.set_content("{\"choices\": [{\"message\": {}}]}", "application/json");
    });
    Backend backend(http_config(stub));
    CHECK_THROWS_AS((void)backend.complete(req_for(stage::belief)), MalformedResponse);
}

TEST_CASE("api key from the configured env var reaches the wire") {
    std::string seen_auth;
    StubServer stub([&](const httplib::Request& req, httplib::Response& res) {
        seen_auth = req.get_header_value("Authorization");
        res.set_content(ok_body("ok"), "application/json");
    });
    setenv("CREDENCE_TEST_KEY", "sk-fixture", 1);
    auto cfg = http_config(stub);
    cfg.api_key_env = "CREDENCE_TEST_KEY";
    Backend backend(cfg);
    (void)backend.complete(req_for(stage::belief));
    CHECK(seen_auth == "Bearer sk-fixture");
    unsetenv("CREDENCE_TEST_KEY");
}

TEST_CASE("at most max_parallel requests are in flight") {
    std::atomic<int> in_flight{0};
    std::atomic<int> peak{0};
    StubServer stub([&](const httplib::Request&, httplib::Response& res) {
        const int now = in_flight.fetch_add(1) + 1;
        int expected = peak.load();
        while (now > expected && !peak.compare_exchange_weak(expected, now)) {
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(30));
        in_flight.fetch_sub(1);
        res.set_content(ok_body("done"), "application/json");
    });

    auto cfg = http_config(stub);
    cfg.max_parallel = 2;
    Backend backend(cfg);

    std::vector<std::thread> callers;
    callers.reserve(8);
    for (int i = 0; i < 8; ++i)
        callers.emplace_back([&] { (void)backend.complete(req_for(stage::belief)); });
    for (auto& t : callers) t.join();

    CHECK(peak.load() <= 2);
    CHECK(peak.load() >= 1);
}
