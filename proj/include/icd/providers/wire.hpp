// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "icd/core/logits.hpp"
#include "icd/core/vocabulary.hpp"

/// JSON logits protocol.
///
///   POST /v1/logits   {"context": [int], "model": string}
///                  -> {"logits": [number], "model": string, "vocab_size": int}
///   POST /v1/health -> {"ok": true, "vocab_size": int}
///
/// Bodies are compact JSON with keys in lexicographic order; numbers are
/// parsed as 64-bit floats.
namespace icd::wire {

struct LogitsRequest {
    TokenSeq context;
    std::string model;
};

struct LogitsResponse {
    std::size_t vocab_size = 0;
    std::vector<double> logits;
    std::string model;
};

struct HealthResponse {
    bool ok = false;
    std::size_t vocab_size = 0;
};

std::string encode_request(std::span<const TokenId> context, std::string_view model);
LogitsRequest decode_request(std::string_view body);

std::string encode_response(std::span<const double> logits, std::string_view model);
LogitsResponse decode_response(std::string_view body);

std::string encode_health(std::size_t vocab_size);
HealthResponse decode_health(std::string_view body);

std::string encode_error(std::string_view kind, std::string_view message);

/// Checks the response against the expected vocabulary size (vocab_mismatch)
/// and its own internal consistency (protocol_error).
LogitVector checked_logits(const LogitsResponse& response, std::size_t expected_vocab_size);

} // namespace icd::wire
