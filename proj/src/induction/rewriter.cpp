// SPDX-License-Identifier: Apache-2.0

#include "icd/induction/rewriter.hpp"

#include <cstdlib>
#include <thread>

#include <fmt/format.h>

#include "httplib.h"
#include "json.hpp"
#include "icd/core/error.hpp"
#include "icd/induction/template.hpp"
#include "icd/providers/remote_lm.hpp"

namespace icd::induction {

namespace {

std::string env_or(const char* name, std::string fallback) {
    const char* v = std::getenv(name);
    return v && *v ? std::string(v) : std::move(fallback);
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

} // namespace

HttpChatClient::Config HttpChatClient::Config::from_env() {
    Config c;
    c.endpoint = env_or("ICD_CHAT_ENDPOINT", "");
    c.model = env_or("ICD_CHAT_MODEL", c.model);
    c.token_env = env_or("ICD_CHAT_TOKEN_ENV", c.token_env);
    return c;
}

HttpChatClient::HttpChatClient(Config config) : config_(std::move(config)) {
    if (config_.endpoint.empty()) throw Error(ErrorKind::invalid_argument, "chat client: endpoint is not configured");
    split_endpoint(config_.endpoint);
}

std::string HttpChatClient::encode_body(const std::vector<ChatMessage>& messages) const {
    nlohmann::json j;
    j["model"] = config_.model;
    j["temperature"] = 0;
    auto& arr = j["messages"] = nlohmann::json::array();
    for (const auto& m : messages) arr.push_back({{"role", m.role}, {"content", m.content}});
    return j.dump();
}

std::string HttpChatClient::complete(const std::vector<ChatMessage>& messages) {
    const auto parts = split_endpoint(config_.endpoint);
    httplib::Client cli(parts.origin);
    cli.set_connection_timeout(config_.timeout);
    cli.set_read_timeout(config_.timeout);
    httplib::Headers headers;
    if (const char* token = std::getenv(config_.token_env.c_str()); token && *token) {
        headers.emplace("Authorization", std::string("Bearer ") + token);
    }
    auto res = cli.Post(parts.path_prefix.empty() ? "/" : parts.path_prefix, headers, encode_body(messages),
                        "application/json");
    if (!res) {
        throw Error(ErrorKind::provider_unreachable,
                    fmt::format("chat endpoint {}: {}", config_.endpoint, httplib::to_string(res.error())));
    }
    if (res->status >= 500) {
        throw Error(ErrorKind::provider_unreachable, fmt::format("chat endpoint {}: HTTP {}", config_.endpoint, res->status));
    }
    if (res->status >= 400) {
        throw Error(ErrorKind::client_error, fmt::format("chat endpoint {}: HTTP {}", config_.endpoint, res->status));
    }
    try {
        const auto j = nlohmann::json::parse(res->body);
        return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::protocol_error, fmt::format("chat endpoint {}: {}", config_.endpoint, e.what()));
    }
}

InductionSample rewrite_via_client(const std::string& factual_bio, const std::string& person, ChatClient& client,
                                   const std::string& source_id, const RewriteOptions& options) {
    if (trim(factual_bio).empty()) throw Error(ErrorKind::invalid_argument, "rewrite: factual bio is empty");
    if (trim(person).empty()) throw Error(ErrorKind::invalid_argument, "rewrite: person is empty");
    const std::vector<ChatMessage> messages{
        {"user", hallucinated_bio_template().render({{"person", person}, {"right bio", factual_bio}})},
    };

    std::string reply;
    auto delay = options.backoff;
    for (unsigned attempt = 1;; ++attempt) {
        try {
            reply = client.complete(messages);
            break;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::provider_unreachable || attempt >= options.max_attempts) {
                throw Error(e.kind() == ErrorKind::provider_unreachable ? e.kind() : ErrorKind::client_error,
                            fmt::format("rewrite of '{}' failed after {} attempt(s): {}", source_id, attempt, e.what()));
            }
        }
        std::this_thread::sleep_for(delay);
        delay *= 2;
    }

    const std::string output = trim(reply);
    if (output.empty()) throw Error(ErrorKind::client_error, fmt::format("rewrite of '{}': empty response", source_id));
    if (output == trim(factual_bio)) {
        throw Error(ErrorKind::client_error, fmt::format("rewrite of '{}': response repeats the source bio", source_id));
    }
    return {options.system, fmt::format("Please tell me a bio of {}.", person), output, source_id,
            Perturbation::llm_rewrite};
}

} // namespace icd::induction
