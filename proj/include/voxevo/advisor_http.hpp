#pragma once

// Networked advisor. Requires httplib.h on the include path; TLS endpoints
// need the build to define CPPHTTPLIB_OPENSSL_SUPPORT globally (the CMake
// target does) so every inclusion of httplib agrees.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "voxevo/advisor.hpp"

namespace voxevo {

struct LlmAdvisorConfig {
    std::string url = "http://127.0.0.1:8080";    // scheme://host[:port]
    std::string path = "/v1/chat/completions";
    std::string model = "advisor-model";
    std::string api_key_env = "VOXEVO_LLM_KEY";   // name of the env var holding the key
    double temperature = 0.0;
    int max_retries = 2;                          // extra attempts on transport/HTTP failure
    int backoff_base_ms = 1000;                   // retry k waits base * 2^(k-1)
    int connect_timeout_s = 5;
    int read_timeout_s = 30;
    bool allow_material_multipliers = false;
    std::string audit_path;                       // JSONL trace, empty disables
};

// Chat-completion client for hyperparameter advice. Transport and HTTP
// errors are retried with exponential backoff; an answer that arrives but
// fails the reply contract is not (the model is deterministic at
// temperature 0, so re-asking buys nothing). Every query appends one JSONL
// audit record capturing the prompt, all attempts, and the outcome, which
// ReplayAdvisor can re-run offline.
class LlmAdvisor : public Advisor {
  public:
    explicit LlmAdvisor(LlmAdvisorConfig cfg) : cfg_(std::move(cfg)) {
        if (!cfg_.audit_path.empty()) audit_.open(cfg_.audit_path, std::ios::app);
    }

    // Continue numbering after `n` earlier queries (resumed runs append to
    // the same audit log).
    void set_query_index(int n) { query_index_ = n; }

    std::optional<HyperParams> propose(const std::vector<GenerationReport>& window,
                                       const HyperParams& current) override {
        const std::string prompt = build_advisor_prompt(window, current);
        nlohmann::json record = {{"query", query_index_},
                                 {"generation", window.empty() ? -1 : window.back().generation},
                                 {"prompt", prompt},
                                 {"attempts", nlohmann::json::array()},
                                 {"response", nullptr},
                                 {"accepted", false}};
        ++query_index_;

        std::optional<HyperParams> result;
        for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
            if (attempt > 0)
                std::this_thread::sleep_for(
                    std::chrono::milliseconds(static_cast<long long>(cfg_.backoff_base_ms) << (attempt - 1)));

            nlohmann::json att = {{"attempt", attempt}};
            auto content = post_chat(prompt, att);
            if (!content) {  // transport or HTTP failure: retry
                record["attempts"].push_back(att);
                continue;
            }
            record["response"] = *content;
            result = parse_advisor_reply(*content, current, cfg_.allow_material_multipliers);
            att["status"] = result ? "ok" : "reply_rejected";
            record["attempts"].push_back(att);
            break;
        }

        record["accepted"] = result.has_value();
        if (result)
            record["params"] = {{"mutation_rate", result->mutation_rate},
                                {"mutation_scale", result->mutation_scale},
                                {"crossover_rate", result->crossover_rate},
                                {"elite_fraction", result->elite_fraction},
                                {"material_multipliers", result->material_multipliers}};
        write_audit(record);
        return result;
    }

  private:
    // Returns the assistant message content, or nullopt on any failure
    // worth retrying. `att` is annotated with what happened.
    std::optional<std::string> post_chat(const std::string& prompt, nlohmann::json& att) {
        httplib::Client cli(cfg_.url);
        cli.set_connection_timeout(cfg_.connect_timeout_s, 0);
        cli.set_read_timeout(cfg_.read_timeout_s, 0);
        httplib::Headers headers;
        if (const char* key = std::getenv(cfg_.api_key_env.c_str()); key && *key)
            headers.emplace("Authorization", std::string("Bearer ") + key);

        const nlohmann::json body = {{"model", cfg_.model},
                                     {"temperature", cfg_.temperature},
                                     {"messages", {{{"role", "user"}, {"content", prompt}}}}};
        auto res = cli.Post(cfg_.path, headers, body.dump(), "application/json");
        if (!res) {
            att["status"] = "transport_error";
            att["detail"] = httplib::to_string(res.error());
            return std::nullopt;
        }
        att["http_status"] = res->status;
        if (res->status != 200) {
            att["status"] = "http_error";
            return std::nullopt;
        }
        const nlohmann::json envelope = nlohmann::json::parse(res->body, nullptr, false);
        if (envelope.is_discarded() || !envelope.contains("choices") || envelope["choices"].empty() ||
            !envelope["choices"][0].contains("message") ||
            !envelope["choices"][0]["message"].contains("content") ||
            !envelope["choices"][0]["message"]["content"].is_string()) {
            att["status"] = "bad_envelope";
            return std::nullopt;  // well-formed HTTP, broken payload: no retry
        }
        att["status"] = "received";
        return envelope["choices"][0]["message"]["content"].get<std::string>();
    }

    void write_audit(const nlohmann::json& record) {
        if (!audit_.is_open()) return;
        audit_ << record.dump() << '\n';
        audit_.flush();
    }

    LlmAdvisorConfig cfg_;
    std::ofstream audit_;
    int query_index_ = 0;
};

// Re-runs a recorded advisor session from its audit log: each propose()
// consumes the next record and re-parses the captured response through the
// live parser, so a replayed run makes exactly the decisions the original
// did without touching the network. Queries past the end of the log fall
// back to the current parameters.
class ReplayAdvisor : public Advisor {
  public:
    explicit ReplayAdvisor(const std::string& audit_path, bool allow_material_multipliers = false,
                           std::size_t skip = 0)
        : allow_material_multipliers_(allow_material_multipliers), cursor_(skip) {
        std::ifstream in(audit_path);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            nlohmann::json rec = nlohmann::json::parse(line, nullptr, false);
            if (!rec.is_discarded()) records_.push_back(std::move(rec));
        }
    }

    std::size_t size() const { return records_.size(); }

    std::optional<HyperParams> propose(const std::vector<GenerationReport>&,
                                       const HyperParams& current) override {
        if (cursor_ >= records_.size()) return std::nullopt;
        const nlohmann::json& rec = records_[cursor_++];
        if (!rec.value("accepted", false)) return std::nullopt;
        const auto it = rec.find("response");
        if (it == rec.end() || !it->is_string()) return std::nullopt;
        return parse_advisor_reply(it->get<std::string>(), current, allow_material_multipliers_);
    }

  private:
    std::vector<nlohmann::json> records_;
    bool allow_material_multipliers_;
    std::size_t cursor_;
};

}  // namespace voxevo
