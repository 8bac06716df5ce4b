#pragma once

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <map>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "vlbench/common.hpp"
#include "vlbench/qbank.hpp"
#include "vlbench/rng.hpp"
#include "vlbench/trial.hpp"

namespace vlbench {

struct BackendRequest {
    TrialPlan plan;
    const QuestionItem* question = nullptr;
    std::string prompt;
    bool image_attached = false;
    const std::vector<std::uint8_t>* image_png = nullptr;  // null when no image
};

struct BackendResponse {
    std::string text;
    double latency_seconds = 0;
    double cost_dollars = 0;
    int prompt_tokens = 0;
    int completion_tokens = 0;
    std::int64_t timestamp_ms = 0;
    std::string error;  // non-empty on transport failure
};

class Backend {
public:
    virtual ~Backend() = default;
    virtual std::string id() const = 0;
    virtual BackendResponse complete(const BackendRequest& req) = 0;
    // Thrown-through BackendUnavailable aborts a run; a response with a
    // non-empty error is recorded per trial and the run continues.
};

namespace backend_detail {

inline int rough_token_count(const std::string& s) {
    return static_cast<int>(s.size() / 4) + 1;
}

inline BackendResponse make_mock(const BackendRequest& req, std::string text, double latency) {
    BackendResponse r;
    r.text = std::move(text);
    r.latency_seconds = latency;
    r.cost_dollars = 0.01;
    r.prompt_tokens = rough_token_count(req.prompt) + (req.image_attached ? 256 : 0);
    r.completion_tokens = rough_token_count(r.text);
    r.timestamp_ms = 0;  // mocks are deterministic end to end
    return r;
}

inline std::string letter_reply(int displayed_index) {
    std::string s = "(";
    s += static_cast<char>('a' + displayed_index);
    s += ")";
    return s;
}

inline std::string open_truth_reply(const QuestionItem& q) {
    if (q.kind == AnswerKind::RangeBand) {
        // any value inside the band counts; reply with its midpoint
        return format_number((q.answer_lo + q.answer_hi) / 2.0, 2);
    }
    return q.answer_text;
}

}  // namespace backend_detail

// Always answers correctly.
class MockPerfectBackend : public Backend {
public:
    std::string id() const override { return "mock-perfect"; }

    BackendResponse complete(const BackendRequest& req) override {
        const auto& q = *req.question;
        std::string text = req.plan.condition.choices_present
                               ? backend_detail::letter_reply(displayed_correct_index(q, req.plan.rotation))
                               : backend_detail::open_truth_reply(q);
        auto rng = Rng::derived(fnv1a64(req.plan.session_id), "backend/mock-perfect");
        return backend_detail::make_mock(req, std::move(text), 1.0 + rng.uniform() * 4.0);
    }
};

// Guesses uniformly among the displayed options (or among the canonical
// option texts when no options are shown). Seeded from the session id, so a
// rerun of the same plan reproduces the same guess.
class MockUniformBackend : public Backend {
public:
    std::string id() const override { return "mock-uniform"; }

    BackendResponse complete(const BackendRequest& req) override {
        const auto& q = *req.question;
        auto rng = Rng::derived(fnv1a64(req.plan.session_id), "backend/mock-uniform");
        const int k = static_cast<int>(q.options.size());
        const int pick = rng.uniform_int(k);
        std::string text;
        if (req.plan.condition.choices_present) {
            text = backend_detail::letter_reply(pick);
        } else {
            text = q.options[static_cast<std::size_t>(pick)];
        }
        return backend_detail::make_mock(req, std::move(text), 1.0 + rng.uniform() * 4.0);
    }
};

// Answers correctly on contextualized items (real-world facts a model could
// know without the chart) and guesses uniformly on decontextualized ones.
class MockKnowledgeBackend : public Backend {
public:
    std::string id() const override { return "mock-knowledge"; }

    BackendResponse complete(const BackendRequest& req) override {
        const auto& q = *req.question;
        auto rng = Rng::derived(fnv1a64(req.plan.session_id), "backend/mock-knowledge");
        std::string text;
        if (q.context_mode == ContextMode::Contextualized) {
            text = req.plan.condition.choices_present
                       ? backend_detail::letter_reply(displayed_correct_index(q, req.plan.rotation))
                       : backend_detail::open_truth_reply(q);
        } else {
            const int k = static_cast<int>(q.options.size());
            const int pick = rng.uniform_int(k);
            text = req.plan.condition.choices_present ? backend_detail::letter_reply(pick)
                                                      : q.options[static_cast<std::size_t>(pick)];
        }
        return backend_detail::make_mock(req, std::move(text), 1.0 + rng.uniform() * 4.0);
    }
};

// Replays canned responses keyed by session id from a JSON file of the shape
// {"<session_id>": {"text": ..., "latency_seconds": ..., ...}, ...}.
// A missing key is a transport error recorded on the trial, not an abort.
class ReplayBackend : public Backend {
public:
    explicit ReplayBackend(const std::string& fixture_path) {
        std::ifstream f(fixture_path);
        if (!f) throw BackendUnavailable("replay fixture not readable: " + fixture_path);
        f >> fixtures_;
    }

    std::string id() const override { return "replay"; }

    BackendResponse complete(const BackendRequest& req) override {
        BackendResponse r;
        auto it = fixtures_.find(req.plan.session_id);
        if (it == fixtures_.end()) {
            r.error = "no replay fixture for session " + req.plan.session_id;
            return r;
        }
        const json& j = *it;
        r.text = j.value("text", "");
        r.latency_seconds = j.value("latency_seconds", 0.0);
        r.cost_dollars = j.value("cost_dollars", 0.0);
        r.prompt_tokens = j.value("prompt_tokens", 0);
        r.completion_tokens = j.value("completion_tokens", 0);
        r.timestamp_ms = j.value("timestamp_ms", std::int64_t{0});
        return r;
    }

private:
    json fixtures_;
};

struct LiveBackendConfig {
    std::string backend_id = "live";
    std::string host;              // e.g. api.example.com
    int port = 443;
    std::string path = "/v1/chat/completions";
    std::string model;
    std::string api_key_env;       // name of the env var holding the key
    int max_retries = 3;
    double initial_backoff_seconds = 2.0;
    double min_request_interval_seconds = 0.0;  // simple rate limit
    double cost_per_trial = 0.0;
    int timeout_seconds = 120;
};

// HTTP chat-completions client. The API key is read from the configured
// environment variable at request time and never stored or serialized.
class LiveHttpBackend : public Backend {
public:
    explicit LiveHttpBackend(LiveBackendConfig cfg) : cfg_(std::move(cfg)) {
        if (cfg_.host.empty()) throw ConfigInvalid("live backend requires a host");
        if (cfg_.api_key_env.empty()) throw ConfigInvalid("live backend requires api_key_env");
        if (!std::getenv(cfg_.api_key_env.c_str()))
            throw BackendUnavailable("environment variable " + cfg_.api_key_env + " is not set");
    }

    std::string id() const override { return cfg_.backend_id; }

    BackendResponse complete(const BackendRequest& req) override;

private:
    void rate_limit() {
        if (cfg_.min_request_interval_seconds <= 0) return;
        const auto now = std::chrono::steady_clock::now();
        if (last_request_.time_since_epoch().count() != 0) {
            const auto min_gap = std::chrono::duration<double>(cfg_.min_request_interval_seconds);
            const auto elapsed = now - last_request_;
            if (elapsed < min_gap)
                std::this_thread::sleep_for(min_gap - elapsed);
        }
        last_request_ = std::chrono::steady_clock::now();
    }

    LiveBackendConfig cfg_;
    std::chrono::steady_clock::time_point last_request_{};
};

std::unique_ptr<Backend> make_backend(const std::string& spec, const json& options = json::object());

}  // namespace vlbench

// httplib pulls in OpenSSL-free plain HTTP by default; keep the heavy include
// at the bottom so the interface above stays cheap to parse.
#include <httplib.h>

namespace vlbench {

namespace backend_detail {

inline std::string base64_encode(const std::vector<std::uint8_t>& data) {
    static const char* tbl = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    out.reserve((data.size() + 2) / 3 * 4);
    std::size_t i = 0;
    while (i + 3 <= data.size()) {
        const std::uint32_t v = (data[i] << 16) | (data[i + 1] << 8) | data[i + 2];
        out += tbl[(v >> 18) & 63];
        out += tbl[(v >> 12) & 63];
        out += tbl[(v >> 6) & 63];
        out += tbl[v & 63];
        i += 3;
    }
    const std::size_t rem = data.size() - i;
    if (rem == 1) {
        const std::uint32_t v = data[i] << 16;
        out += tbl[(v >> 18) & 63];
        out += tbl[(v >> 12) & 63];
        out += "==";
    } else if (rem == 2) {
        const std::uint32_t v = (data[i] << 16) | (data[i + 1] << 8);
        out += tbl[(v >> 18) & 63];
        out += tbl[(v >> 12) & 63];
        out += tbl[(v >> 6) & 63];
        out += '=';
    }
    return out;
}

}  // namespace backend_detail

inline BackendResponse LiveHttpBackend::complete(const BackendRequest& req) {
    const char* key = std::getenv(cfg_.api_key_env.c_str());
    if (!key) throw BackendUnavailable("environment variable " + cfg_.api_key_env + " is not set");

    json content = json::array();
    content.push_back({{"type", "text"}, {"text", req.prompt}});
    if (req.image_attached && req.image_png) {
        content.push_back(
            {{"type", "image_url"},
             {"image_url",
              {{"url", "data:image/png;base64," + backend_detail::base64_encode(*req.image_png)}}}});
    }
    json body = {{"model", cfg_.model},
                 {"messages", json::array({{{"role", "user"}, {"content", content}}})}};
    const std::string payload = body.dump();

    BackendResponse r;
    double backoff = cfg_.initial_backoff_seconds;
    std::string last_error;
    for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(std::chrono::duration<double>(backoff));
            backoff *= 2;
        }
        rate_limit();
#ifdef CPPHTTPLIB_OPENSSL_SUPPORT
        httplib::SSLClient cli(cfg_.host, cfg_.port);
#else
        httplib::Client cli(cfg_.host, cfg_.port);
#endif
        cli.set_connection_timeout(cfg_.timeout_seconds);
        cli.set_read_timeout(cfg_.timeout_seconds);
        httplib::Headers headers = {{"Authorization", std::string("Bearer ") + key}};
        const auto t0 = std::chrono::steady_clock::now();
        auto res = cli.Post(cfg_.path, headers, payload, "application/json");
        const auto t1 = std::chrono::steady_clock::now();
        if (!res) {
            last_error = "transport failure: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status == 429 || res->status >= 500) {
            last_error = "http status " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200) {
            r.error = "http status " + std::to_string(res->status) + ": " + res->body;
            return r;
        }
        try {
            const json j = json::parse(res->body);
            r.text = j.at("choices").at(0).at("message").at("content").get<std::string>();
            if (j.contains("usage")) {
                r.prompt_tokens = j["usage"].value("prompt_tokens", 0);
                r.completion_tokens = j["usage"].value("completion_tokens", 0);
            }
        } catch (const std::exception& e) {
            r.error = std::string("unparseable response body: ") + e.what();
            return r;
        }
        r.latency_seconds = std::chrono::duration<double>(t1 - t0).count();
        r.cost_dollars = cfg_.cost_per_trial;
        r.timestamp_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::system_clock::now().time_since_epoch())
                             .count();
        return r;
    }
    r.error = last_error.empty() ? "exhausted retries" : last_error + " (exhausted retries)";
    return r;
}

inline std::unique_ptr<Backend> make_backend(const std::string& spec, const json& options) {
    if (spec == "mock-perfect") return std::make_unique<MockPerfectBackend>();
    if (spec == "mock-uniform") return std::make_unique<MockUniformBackend>();
    if (spec == "mock-knowledge") return std::make_unique<MockKnowledgeBackend>();
    if (spec == "replay") {
        if (!options.contains("fixture_path"))
            throw ConfigInvalid("replay backend requires options.fixture_path");
        return std::make_unique<ReplayBackend>(options["fixture_path"].get<std::string>());
    }
    if (spec == "live") {
        LiveBackendConfig cfg;
        cfg.backend_id = options.value("backend_id", std::string("live"));
        cfg.host = options.value("host", std::string());
        cfg.port = options.value("port", 443);
        cfg.path = options.value("path", std::string("/v1/chat/completions"));
        cfg.model = options.value("model", std::string());
        cfg.api_key_env = options.value("api_key_env", std::string());
        cfg.max_retries = options.value("max_retries", 3);
        cfg.initial_backoff_seconds = options.value("initial_backoff_seconds", 2.0);
        cfg.min_request_interval_seconds = options.value("min_request_interval_seconds", 0.0);
        cfg.cost_per_trial = options.value("cost_per_trial", 0.0);
        cfg.timeout_seconds = options.value("timeout_seconds", 120);
        return std::make_unique<LiveHttpBackend>(cfg);
    }
    throw ConfigInvalid("unknown backend: " + spec);
}

}  // namespace vlbench
