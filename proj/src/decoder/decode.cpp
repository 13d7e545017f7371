// SPDX-License-Identifier: Apache-2.0

#include "icd/decoder/decode.hpp"

#include <cmath>

#include "icd/core/numeric.hpp"

namespace icd {

TokenId TokenSampler::draw(std::span<const double> probs) {
    const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    double cumulative = 0.0;
    std::size_t last_nonzero = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (probs[i] <= 0.0) continue;
        last_nonzero = i;
        cumulative += probs[i];
        if (u < cumulative) return static_cast<TokenId>(i);
    }
    return static_cast<TokenId>(last_nonzero);
}

namespace {

void check_continuation(std::span<const TokenId> continuation) {
    if (continuation.empty()) throw Error(ErrorKind::invalid_argument, "score_sequence: continuation is empty");
}

template <typename Step>
Generation run_decode(const ContrastConfig& config, const Vocabulary& vocab, std::span<const TokenId> prompt, Step step) {
    config.validate();
    vocab.check_ids(prompt);
    Generation out;
    TokenSeq context(prompt.begin(), prompt.end());
    TokenSampler sampler(config.seed);
    for (std::uint32_t i = 0; i < config.max_tokens; ++i) {
        StepTrace trace;
        try {
            trace = step(context);
        } catch (const Error& e) {
            throw DecodeError(e, std::move(out));
        }
        if (config.strategy == Strategy::sample) {
            trace.chosen = sampler.draw(softmax(trace.contrast_scores, config.temperature));
        }
        const TokenId tok = trace.chosen;
        out.tokens.push_back(tok);
        out.traces.push_back(std::move(trace));
        context.push_back(tok);
        if (vocab.eos() && tok == *vocab.eos()) break;
    }
    return out;
}

} // namespace

Generation decode(const ContrastPair& pair, std::span<const TokenId> prompt) {
    return run_decode(pair.config, pair.base->vocab(), prompt,
                      [&](const TokenSeq& ctx) { return contrast_step(pair, ctx).trace; });
}

Generation decode_plain(const LogitProvider& provider, std::span<const TokenId> prompt, const ContrastConfig& config) {
    return run_decode(config, provider.vocab(), prompt, [&](const TokenSeq& ctx) {
        StepTrace trace;
        trace.position = ctx.size();
        trace.base_logprobs = log_softmax(provider.next_logits(ctx).values());
        trace.valid_set.resize(trace.base_logprobs.size());
        for (std::size_t i = 0; i < trace.valid_set.size(); ++i) trace.valid_set[i] = static_cast<TokenId>(i);
        trace.contrast_scores = trace.base_logprobs;
        trace.chosen = static_cast<TokenId>(argmax(trace.contrast_scores));
        return trace;
    });
}

namespace {

template <typename StepLogProbs>
double accumulate_score(std::span<const TokenId> prompt, std::span<const TokenId> continuation, ScoreOptions options,
                        StepLogProbs step) {
    check_continuation(continuation);
    TokenSeq context(prompt.begin(), prompt.end());
    double total = 0.0;
    for (TokenId tok : continuation) {
        const std::vector<double> lp = step(context);
        if (tok >= lp.size()) {
            throw Error(ErrorKind::vocab_violation, "score_sequence: continuation token out of range");
        }
        if (lp[tok] == kNegInf) return kNegInf;
        total += lp[tok];
        context.push_back(tok);
    }
    return options.length_normalize ? total / static_cast<double>(continuation.size()) : total;
}

} // namespace

double score_sequence(const ContrastPair& pair, std::span<const TokenId> prompt, std::span<const TokenId> continuation,
                      ScoreOptions options) {
    pair.base->vocab().check_ids(continuation);
    return accumulate_score(prompt, continuation, options, [&](const TokenSeq& ctx) {
        return log_softmax(contrast_step(pair, ctx).trace.contrast_scores);
    });
}

double score_sequence(const LogitProvider& provider, std::span<const TokenId> prompt,
                      std::span<const TokenId> continuation, ScoreOptions options) {
    provider.vocab().check_ids(continuation);
    return accumulate_score(prompt, continuation, options,
                            [&](const TokenSeq& ctx) { return log_softmax(provider.next_logits(ctx).values()); });
}

SequenceScorer make_scorer(ContrastPair pair, ScoreOptions options) {
    return [pair = std::move(pair), options](std::span<const TokenId> prompt, std::span<const TokenId> continuation) {
        return score_sequence(pair, prompt, continuation, options);
    };
}

SequenceScorer make_scorer(ProviderPtr provider, ScoreOptions options) {
    return [provider = std::move(provider), options](std::span<const TokenId> prompt,
                                                     std::span<const TokenId> continuation) {
        return score_sequence(*provider, prompt, continuation, options);
    };
}

} // namespace icd
