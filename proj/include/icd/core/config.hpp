// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string_view>

#include "json.hpp"

namespace icd {

enum class Strategy { greedy, sample };

/// Space in which the plausibility threshold is applied to the base model.
/// `probs` compares p(x) >= alpha * max p; `logits` compares raw logits.
enum class MaskSpace { probs, logits };

Strategy parse_strategy(std::string_view text);
std::string_view to_string(Strategy s) noexcept;
MaskSpace parse_mask_space(std::string_view text);
std::string_view to_string(MaskSpace m) noexcept;

struct ContrastConfig {
    double alpha = 0.0;          ///< plausibility strength, in [0, 1]
    double beta = 1.0;           ///< contrast strength, > 0
    std::uint32_t max_tokens = 64;
    std::uint64_t seed = 0;
    Strategy strategy = Strategy::greedy;
    double temperature = 1.0;    ///< final softmax only, sampling only
    double weak_floor = -30.0;   ///< weak log-probs are clamped from below
    MaskSpace mask_space = MaskSpace::probs;

    /// Multiple-choice scoring defaults: alpha 0.0, beta 1.0.
    static ContrastConfig for_multiple_choice();
    /// Open-ended generation defaults: alpha 0.1, beta 2.0.
    static ContrastConfig for_generation();

    /// Throws invalid_argument when a field is out of range.
    void validate() const;

    nlohmann::json to_json() const;
    static ContrastConfig from_json(const nlohmann::json& j, ContrastConfig defaults);
};

} // namespace icd
