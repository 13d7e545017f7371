// SPDX-License-Identifier: Apache-2.0

#include "icd/providers/wire.hpp"

#include <cmath>

#include <fmt/format.h>

#include "json.hpp"
#include "icd/core/error.hpp"

namespace icd::wire {

namespace {

nlohmann::json parse_object(std::string_view body, const char* what) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::protocol_error, fmt::format("{}: malformed JSON: {}", what, e.what()));
    }
    if (!j.is_object()) throw Error(ErrorKind::protocol_error, fmt::format("{}: body is not a JSON object", what));
    return j;
}

} // namespace

std::string encode_request(std::span<const TokenId> context, std::string_view model) {
    nlohmann::json j;
    j["context"] = TokenSeq(context.begin(), context.end());
    j["model"] = std::string(model);
    return j.dump();
}

LogitsRequest decode_request(std::string_view body) {
    const auto j = parse_object(body, "logits request");
    LogitsRequest req;
    try {
        req.context = j.at("context").get<TokenSeq>();
        req.model = j.contains("model") ? j.at("model").get<std::string>() : std::string("base");
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::protocol_error, fmt::format("logits request: {}", e.what()));
    }
    return req;
}

std::string encode_response(std::span<const double> logits, std::string_view model) {
    nlohmann::json j;
    j["logits"] = std::vector<double>(logits.begin(), logits.end());
    j["model"] = std::string(model);
    j["vocab_size"] = logits.size();
    return j.dump();
}

LogitsResponse decode_response(std::string_view body) {
    const auto j = parse_object(body, "logits response");
    LogitsResponse res;
    try {
        res.vocab_size = j.at("vocab_size").get<std::size_t>();
        const auto& arr = j.at("logits");
        if (!arr.is_array()) throw Error(ErrorKind::protocol_error, "logits response: 'logits' is not an array");
        res.logits.reserve(arr.size());
        for (const auto& v : arr) {
            if (!v.is_number()) throw Error(ErrorKind::protocol_error, "logits response: non-numeric logit");
            res.logits.push_back(v.get<double>());
        }
        res.model = j.contains("model") ? j.at("model").get<std::string>() : std::string();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::protocol_error, fmt::format("logits response: {}", e.what()));
    }
    return res;
}

std::string encode_health(std::size_t vocab_size) {
    nlohmann::json j;
    j["ok"] = true;
    j["vocab_size"] = vocab_size;
    return j.dump();
}

HealthResponse decode_health(std::string_view body) {
    const auto j = parse_object(body, "health response");
    try {
        return {j.at("ok").get<bool>(), j.at("vocab_size").get<std::size_t>()};
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::protocol_error, fmt::format("health response: {}", e.what()));
    }
}

std::string encode_error(std::string_view kind, std::string_view message) {
    nlohmann::json j;
    j["error"] = {{"kind", std::string(kind)}, {"message", std::string(message)}};
    return j.dump();
}

LogitVector checked_logits(const LogitsResponse& response, std::size_t expected_vocab_size) {
    if (response.vocab_size != expected_vocab_size) {
        throw Error(ErrorKind::vocab_mismatch, fmt::format("remote vocab_size {} does not match expected {}",
                                                           response.vocab_size, expected_vocab_size));
    }
    if (response.logits.size() != response.vocab_size) {
        throw Error(ErrorKind::protocol_error, fmt::format("remote sent {} logits but declared vocab_size {}",
                                                           response.logits.size(), response.vocab_size));
    }
    for (std::size_t i = 0; i < response.logits.size(); ++i) {
        if (!std::isfinite(response.logits[i])) {
            throw Error(ErrorKind::protocol_error, fmt::format("remote logit {} is not finite", i));
        }
    }
    return LogitVector(response.logits);
}

} // namespace icd::wire
