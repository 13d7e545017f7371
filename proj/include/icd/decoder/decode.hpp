// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <random>

#include "icd/decoder/contrast.hpp"
#include "icd/core/error.hpp"

namespace icd {

struct Generation {
    TokenSeq tokens;                 ///< emitted tokens, eos included when reached
    std::vector<StepTrace> traces;   ///< one per emitted token
};

/// Provider failure during decoding; carries whatever was generated so far.
class DecodeError : public Error {
public:
    DecodeError(const Error& cause, Generation partial)
        : Error(cause.kind(), cause.what()), partial_(std::move(partial)) {}

    const Generation& partial() const noexcept { return partial_; }

private:
    Generation partial_;
};

/// Inverse-CDF draws from a seeded 64-bit Mersenne Twister. The uniform
/// variate is built from the top 53 bits so results do not depend on the
/// standard library's distribution implementations.
class TokenSampler {
public:
    explicit TokenSampler(std::uint64_t seed) : rng_(seed) {}

    TokenId draw(std::span<const double> probs);

private:
    std::mt19937_64 rng_;
};

/// Contrastive decoding. Greedy takes the argmax of the contrast scores
/// (lowest id on ties); sampling draws from softmax(F / temperature).
/// Stops after eos or config.max_tokens tokens.
Generation decode(const ContrastPair& pair, std::span<const TokenId> prompt);

/// Baseline decoding from a single provider with the same stopping rules.
Generation decode_plain(const LogitProvider& provider, std::span<const TokenId> prompt, const ContrastConfig& config);

struct ScoreOptions {
    bool length_normalize = false;   ///< divide the total by the continuation length
};

/// Sum over continuation positions of log softmax(F_t) at the realized
/// token. A token outside the valid set makes the total -inf.
double score_sequence(const ContrastPair& pair, std::span<const TokenId> prompt,
                      std::span<const TokenId> continuation, ScoreOptions options = {});

/// Same with the provider's own softmax distribution.
double score_sequence(const LogitProvider& provider, std::span<const TokenId> prompt,
                      std::span<const TokenId> continuation, ScoreOptions options = {});

using SequenceScorer = std::function<double(std::span<const TokenId>, std::span<const TokenId>)>;

SequenceScorer make_scorer(ContrastPair pair, ScoreOptions options = {});
SequenceScorer make_scorer(ProviderPtr provider, ScoreOptions options = {});

} // namespace icd
