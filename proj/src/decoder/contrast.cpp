// SPDX-License-Identifier: Apache-2.0

#include "icd/decoder/contrast.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "icd/core/error.hpp"
#include "icd/core/numeric.hpp"

namespace icd {

ContrastPair::ContrastPair(ProviderPtr base_, ProviderPtr weak_, ContrastConfig config_)
    : base(std::move(base_)), weak(std::move(weak_)), config(config_) {
    if (!base || !weak) throw Error(ErrorKind::invalid_argument, "contrast pair needs both a base and a weak provider");
    config.validate();
    require_same_vocab(*base, *weak);
}

ContrastPair ContrastPair::reversed() const {
    return ContrastPair(weak, base, config);
}

namespace {

void check_alpha(double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw Error(ErrorKind::invalid_argument, fmt::format("alpha must lie in [0, 1] (got {})", alpha));
    }
}

std::vector<TokenId> all_tokens(std::size_t n) {
    std::vector<TokenId> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<TokenId>(i);
    return out;
}

} // namespace

std::vector<TokenId> plausibility_mask(std::span<const double> base_probs, double alpha) {
    check_alpha(alpha);
    if (base_probs.empty()) throw Error(ErrorKind::empty_support, "plausibility mask over an empty distribution");
    const double threshold = alpha * *std::max_element(base_probs.begin(), base_probs.end());
    std::vector<TokenId> out;
    for (std::size_t i = 0; i < base_probs.size(); ++i) {
        if (base_probs[i] >= threshold) out.push_back(static_cast<TokenId>(i));
    }
    return out;
}

std::vector<TokenId> plausibility_mask_log(std::span<const double> base_logprobs, double alpha) {
    check_alpha(alpha);
    if (base_logprobs.empty()) throw Error(ErrorKind::empty_support, "plausibility mask over an empty distribution");
    if (alpha == 0.0) return all_tokens(base_logprobs.size());
    const double threshold = std::log(alpha) + *std::max_element(base_logprobs.begin(), base_logprobs.end());
    std::vector<TokenId> out;
    for (std::size_t i = 0; i < base_logprobs.size(); ++i) {
        if (base_logprobs[i] >= threshold) out.push_back(static_cast<TokenId>(i));
    }
    return out;
}

std::vector<TokenId> plausibility_mask_logits(std::span<const double> base_logits, double alpha) {
    check_alpha(alpha);
    const std::size_t best = argmax(base_logits);
    const double threshold = alpha * base_logits[best];
    std::vector<TokenId> out;
    for (std::size_t i = 0; i < base_logits.size(); ++i) {
        if (base_logits[i] >= threshold || i == best) out.push_back(static_cast<TokenId>(i));
    }
    return out;
}

StepResult contrast_step(const ContrastPair& pair, std::span<const TokenId> context) {
    const auto& cfg = pair.config;
    const LogitVector base_logits = pair.base->next_logits(context);
    const LogitVector weak_logits = pair.weak->next_logits(context);

    StepResult result;
    StepTrace& trace = result.trace;
    trace.position = context.size();
    trace.base_logprobs = log_softmax(base_logits.values());
    trace.weak_logprobs = log_softmax(weak_logits.values());
    for (double& lp : trace.weak_logprobs) lp = std::max(lp, cfg.weak_floor);

    trace.valid_set = cfg.mask_space == MaskSpace::probs ? plausibility_mask_log(trace.base_logprobs, cfg.alpha)
                                                          : plausibility_mask_logits(base_logits.values(), cfg.alpha);

    trace.contrast_scores.assign(base_logits.size(), kNegInf);
    for (TokenId x : trace.valid_set) {
        trace.contrast_scores[x] = cfg.beta * trace.base_logprobs[x] - trace.weak_logprobs[x];
    }
    trace.chosen = static_cast<TokenId>(argmax(trace.contrast_scores));
    result.probs = softmax(trace.contrast_scores);
    return result;
}

} // namespace icd
