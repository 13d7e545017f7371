// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "icd/core/config.hpp"
#include "icd/providers/provider.hpp"

namespace icd {

/// A base model and its factually weak counterpart, sharing one vocabulary.
///
/// The weak side can be a fine-tuned model, a pre-alignment checkpoint, a
/// smaller model of the same family, or the base model behind a negative
/// system prompt; the arithmetic is identical in every case.
struct ContrastPair {
    ProviderPtr base;
    ProviderPtr weak;
    ContrastConfig config;

    /// Validates the config and rejects mismatched vocabulary sizes.
    ContrastPair(ProviderPtr base, ProviderPtr weak, ContrastConfig config);

    /// The same pair with base and weak swapped.
    ContrastPair reversed() const;
};

/// Everything computed for one decoding position.
struct StepTrace {
    std::size_t position = 0;                 ///< context length at this step
    std::vector<TokenId> valid_set;           ///< ascending token ids
    std::vector<double> base_logprobs;
    std::vector<double> weak_logprobs;        ///< after clamping at weak_floor
    std::vector<double> contrast_scores;      ///< -inf exactly outside valid_set
    TokenId chosen = 0;
};

struct StepResult {
    std::vector<double> probs;                ///< softmax of the contrast scores
    StepTrace trace;
};

/// { x : p(x) >= alpha * max_w p(w) } over a probability vector.
std::vector<TokenId> plausibility_mask(std::span<const double> base_probs, double alpha);

/// Same set computed from log-probabilities: lp(x) >= log(alpha) + max lp.
std::vector<TokenId> plausibility_mask_log(std::span<const double> base_logprobs, double alpha);

/// Raw-logit variant: logit(x) >= alpha * max logit. The argmax is always
/// kept so the set is never empty when the maximum logit is negative.
std::vector<TokenId> plausibility_mask_logits(std::span<const double> base_logits, double alpha);

/**
 * One contrast step at `context`.
 *
 *   valid    = plausibility set of the base distribution
 *   F(x)     = beta * log p_base(x) - max(log p_weak(x), weak_floor)   for x in valid
 *   F(x)     = -inf                                                    otherwise
 *   result   = softmax(F)
 *
 * trace.chosen is the greedy pick (argmax of F, lowest id on ties).
 */
StepResult contrast_step(const ContrastPair& pair, std::span<const TokenId> context);

} // namespace icd
