// SPDX-License-Identifier: Apache-2.0

#include "icd/core/config.hpp"

#include <cmath>
#include <string>

#include <fmt/format.h>

#include "icd/core/error.hpp"

namespace icd {

Strategy parse_strategy(std::string_view text) {
    if (text == "greedy") return Strategy::greedy;
    if (text == "sample") return Strategy::sample;
    throw Error(ErrorKind::invalid_argument, fmt::format("unknown strategy '{}'", text));
}

std::string_view to_string(Strategy s) noexcept {
    return s == Strategy::greedy ? "greedy" : "sample";
}

MaskSpace parse_mask_space(std::string_view text) {
    if (text == "probs") return MaskSpace::probs;
    if (text == "logits") return MaskSpace::logits;
    throw Error(ErrorKind::invalid_argument, fmt::format("unknown mask space '{}'", text));
}

std::string_view to_string(MaskSpace m) noexcept {
    return m == MaskSpace::probs ? "probs" : "logits";
}

ContrastConfig ContrastConfig::for_multiple_choice() {
    ContrastConfig c;
    c.alpha = 0.0;
    c.beta = 1.0;
    return c;
}

ContrastConfig ContrastConfig::for_generation() {
    ContrastConfig c;
    c.alpha = 0.1;
    c.beta = 2.0;
    return c;
}

void ContrastConfig::validate() const {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw Error(ErrorKind::invalid_argument, fmt::format("alpha must lie in [0, 1] (got {})", alpha));
    }
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw Error(ErrorKind::invalid_argument, fmt::format("beta must be a finite value > 0 (got {})", beta));
    }
    if (max_tokens == 0) throw Error(ErrorKind::invalid_argument, "max_tokens must be at least 1");
    if (!(temperature > 0.0) || !std::isfinite(temperature)) {
        throw Error(ErrorKind::invalid_argument, fmt::format("temperature must be > 0 (got {})", temperature));
    }
    if (!(weak_floor < 0.0)) {
        throw Error(ErrorKind::invalid_argument, fmt::format("weak_floor must be < 0 (got {})", weak_floor));
    }
}

nlohmann::json ContrastConfig::to_json() const {
    return {
        {"alpha", alpha},
        {"beta", beta},
        {"max_tokens", max_tokens},
        {"seed", seed},
        {"strategy", std::string(to_string(strategy))},
        {"temperature", temperature},
        {"weak_floor", weak_floor},
        {"mask_space", std::string(to_string(mask_space))},
    };
}

ContrastConfig ContrastConfig::from_json(const nlohmann::json& j, ContrastConfig c) {
    try {
        if (j.contains("alpha")) c.alpha = j.at("alpha").get<double>();
        if (j.contains("beta")) c.beta = j.at("beta").get<double>();
        if (j.contains("max_tokens")) c.max_tokens = j.at("max_tokens").get<std::uint32_t>();
        if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("strategy")) c.strategy = parse_strategy(j.at("strategy").get<std::string>());
        if (j.contains("temperature")) c.temperature = j.at("temperature").get<double>();
        if (j.contains("weak_floor")) c.weak_floor = j.at("weak_floor").get<double>();
        if (j.contains("mask_space")) c.mask_space = parse_mask_space(j.at("mask_space").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::parse_error, fmt::format("contrast config: {}", e.what()));
    }
    return c;
}

} // namespace icd
