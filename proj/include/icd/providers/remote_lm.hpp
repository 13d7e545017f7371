// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <memory>
#include <semaphore>
#include <string>

#include "icd/providers/provider.hpp"
#include "icd/providers/wire.hpp"

namespace icd {

struct RemoteOptions {
    std::string endpoint;                       ///< e.g. http://127.0.0.1:8080
    std::string model = "base";
    std::chrono::milliseconds timeout{30000};
    unsigned retries = 2;                       ///< extra attempts after the first
    std::ptrdiff_t max_in_flight = 8;
};

/// Splits "http://host:port/prefix" into the scheme/authority part and path prefix.
struct EndpointParts {
    std::string origin;
    std::string path_prefix;
};
EndpointParts split_endpoint(const std::string& endpoint);

/// Provider backed by a logits server speaking the JSON wire protocol.
///
/// Transport failures are retried; after the last attempt a RemoteError of
/// kind provider_unreachable carries the endpoint and the attempt count.
/// A response whose vocab_size differs from the expected size is a hard
/// vocab_mismatch error.
class RemoteLM final : public LogitProvider {
public:
    RemoteLM(std::shared_ptr<const Vocabulary> vocab, RemoteOptions options);

    /// Queries /v1/health for the vocabulary size. When `vocab` is given its
    /// size must match; otherwise a synthetic vocabulary is used.
    static std::shared_ptr<RemoteLM> connect(RemoteOptions options, std::shared_ptr<const Vocabulary> vocab = nullptr);

    static wire::HealthResponse health(const RemoteOptions& options);

    const RemoteOptions& options() const noexcept { return options_; }

protected:
    LogitVector compute_logits(std::span<const TokenId> context) const override;

private:
    RemoteOptions options_;
    EndpointParts parts_;
    std::unique_ptr<std::counting_semaphore<>> in_flight_;
};

} // namespace icd
