// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <string>
#include <vector>

#include "icd/induction/dataset.hpp"

namespace icd::induction {

struct ChatMessage {
    std::string role;
    std::string content;
};

/// Chat-completion backend. Transport failures throw Error with kind
/// provider_unreachable (retried by callers); other failures use client_error.
class ChatClient {
public:
    virtual ~ChatClient() = default;
    virtual std::string complete(const std::vector<ChatMessage>& messages) = 0;
};

/// OpenAI-style chat-completions endpoint.
class HttpChatClient final : public ChatClient {
public:
    struct Config {
        std::string endpoint;                     ///< full URL, e.g. http://host:port/v1/chat/completions
        std::string model = "gpt-3.5-turbo";
        std::string token_env = "OPENAI_API_KEY"; ///< name of the variable holding the bearer token
        std::chrono::milliseconds timeout{60000};

        /// ICD_CHAT_ENDPOINT, ICD_CHAT_MODEL, ICD_CHAT_TOKEN_ENV.
        static Config from_env();
    };

    explicit HttpChatClient(Config config);

    std::string complete(const std::vector<ChatMessage>& messages) override;

    /// Request body for `messages`; exposed for protocol tests.
    std::string encode_body(const std::vector<ChatMessage>& messages) const;

private:
    Config config_;
};

struct RewriteOptions {
    unsigned max_attempts = 3;
    std::chrono::milliseconds backoff{200};   ///< doubled after each failed attempt
    std::string system = "You are a helpful assistant.";
};

/// Sends the hallucinated-biography request for `person` and stores the
/// reply as an llm_rewrite sample whose user turn asks for the bio.
InductionSample rewrite_via_client(const std::string& factual_bio, const std::string& person, ChatClient& client,
                                   const std::string& source_id, const RewriteOptions& options = {});

} // namespace icd::induction
