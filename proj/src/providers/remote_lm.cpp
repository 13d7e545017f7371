// SPDX-License-Identifier: Apache-2.0

#include "icd/providers/remote_lm.hpp"

#include <thread>

#include <fmt/format.h>

#include "httplib.h"
#include "icd/core/error.hpp"

namespace icd {

namespace {

constexpr const char* kJson = "application/json";

struct Permit {
    explicit Permit(std::counting_semaphore<>& s) : sem(s) { sem.acquire(); }
    ~Permit() { sem.release(); }
    Permit(const Permit&) = delete;
    Permit& operator=(const Permit&) = delete;
    std::counting_semaphore<>& sem;
};

httplib::Client make_client(const EndpointParts& parts, std::chrono::milliseconds timeout) {
    httplib::Client cli(parts.origin);
    cli.set_connection_timeout(timeout);
    cli.set_read_timeout(timeout);
    cli.set_write_timeout(timeout);
    cli.set_keep_alive(false);
    return cli;
}

/// POSTs with retries on transport failure and 5xx. Returns the body of a
/// 2xx response; 4xx responses are protocol errors and are not retried.
std::string post_with_retries(const RemoteOptions& options, const EndpointParts& parts, const std::string& path,
                              const std::string& body) {
    const unsigned attempts = options.retries + 1;
    std::string last_error;
    for (unsigned attempt = 1; attempt <= attempts; ++attempt) {
        auto cli = make_client(parts, options.timeout);
        httplib::Headers headers{{"X-ICD-Deterministic", "1"}};
        auto res = cli.Post(parts.path_prefix + path, headers, body, kJson);
        if (!res) {
            last_error = fmt::format("transport failure: {}", httplib::to_string(res.error()));
        } else if (res->status >= 500) {
            last_error = fmt::format("server error {}", res->status);
        } else if (res->status >= 400) {
            throw RemoteError(ErrorKind::protocol_error, fmt::format("HTTP {} on {}: {}", res->status, path, res->body),
                              options.endpoint, attempt);
        } else {
            return res->body;
        }
        if (attempt < attempts) {
            std::this_thread::sleep_for(std::chrono::milliseconds(50) * (1u << (attempt - 1)));
        }
    }
    throw RemoteError(ErrorKind::provider_unreachable, last_error, options.endpoint, attempts);
}

} // namespace

EndpointParts split_endpoint(const std::string& endpoint) {
    const auto scheme = endpoint.find("://");
    if (scheme == std::string::npos || endpoint.compare(0, scheme, "http") != 0) {
        throw Error(ErrorKind::invalid_argument, fmt::format("unsupported endpoint '{}' (expected http://host:port)", endpoint));
    }
    const auto slash = endpoint.find('/', scheme + 3);
    if (slash == std::string::npos) return {endpoint, ""};
    std::string prefix = endpoint.substr(slash);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    return {endpoint.substr(0, slash), prefix};
}

RemoteLM::RemoteLM(std::shared_ptr<const Vocabulary> vocab, RemoteOptions options)
    : LogitProvider(std::move(vocab), options.model + "@" + options.endpoint),
      options_(std::move(options)),
      parts_(split_endpoint(options_.endpoint)) {
    if (options_.max_in_flight < 1) throw Error(ErrorKind::invalid_argument, "max_in_flight must be at least 1");
    in_flight_ = std::make_unique<std::counting_semaphore<>>(options_.max_in_flight);
}

wire::HealthResponse RemoteLM::health(const RemoteOptions& options) {
    const auto parts = split_endpoint(options.endpoint);
    const auto body = post_with_retries(options, parts, "/v1/health", "{}");
    auto h = wire::decode_health(body);
    if (!h.ok) throw RemoteError(ErrorKind::provider_unreachable, "health check reported not ok", options.endpoint, 1);
    return h;
}

std::shared_ptr<RemoteLM> RemoteLM::connect(RemoteOptions options, std::shared_ptr<const Vocabulary> vocab) {
    const auto h = health(options);
    if (vocab) {
        if (vocab->size() != h.vocab_size) {
            throw Error(ErrorKind::vocab_mismatch, fmt::format("endpoint {} serves vocab_size {} but the vocabulary has {}",
                                                               options.endpoint, h.vocab_size, vocab->size()));
        }
    } else {
        vocab = std::make_shared<Vocabulary>(Vocabulary::synthetic(h.vocab_size));
    }
    return std::make_shared<RemoteLM>(std::move(vocab), std::move(options));
}

LogitVector RemoteLM::compute_logits(std::span<const TokenId> context) const {
    Permit permit(*in_flight_);
    const auto body = post_with_retries(options_, parts_, "/v1/logits", wire::encode_request(context, options_.model));
    try {
        return wire::checked_logits(wire::decode_response(body), vocab().size());
    } catch (const RemoteError&) {
        throw;
    } catch (const Error& e) {
        throw RemoteError(e.kind(), e.what(), options_.endpoint, 1);
    }
}

} // namespace icd
