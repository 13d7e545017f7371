// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "icd/core/error.hpp"
#include "icd/core/numeric.hpp"
#include "icd/decoder/contrast.hpp"
#include "icd/decoder/decode.hpp"
#include "icd/decoder/trace.hpp"
#include "icd/providers/table_lm.hpp"
#include "json.hpp"
#include "support/support.hpp"

namespace icd {
namespace {

using testing::TableSpec;

std::shared_ptr<const Vocabulary> vocab(std::size_t n, std::optional<TokenId> bos = std::nullopt,
                                        std::optional<TokenId> eos = std::nullopt) {
    return std::make_shared<const Vocabulary>(Vocabulary::synthetic(n, bos, eos));
}

std::vector<double> logs(std::initializer_list<double> probs) {
    std::vector<double> out;
    for (double p : probs) out.push_back(std::log(p));
    return out;
}

ContrastConfig config(double alpha, double beta) {
    ContrastConfig c;
    c.alpha = alpha;
    c.beta = beta;
    return c;
}

// A single-context pair whose fallback vectors give the requested probabilities.
ContrastPair constant_pair(std::vector<double> base_logits, std::vector<double> weak_logits, ContrastConfig cfg) {
    const auto v = vocab(base_logits.size());
    TableSpec b{base_logits.size(), std::move(base_logits), {}};
    TableSpec w{weak_logits.size(), std::move(weak_logits), {}};
    return ContrastPair(b.build(v), w.build(v), cfg);
}

// ---- plausibility mask -------------------------------------------------------

TEST(PlausibilityMask, HalfOfMaxKeepsTwo) {
    EXPECT_EQ(plausibility_mask(std::vector<double>{0.5, 0.3, 0.2}, 0.5), (std::vector<TokenId>{0, 1}));
}

TEST(PlausibilityMask, ZeroAlphaKeepsEverything) {
    EXPECT_EQ(plausibility_mask(std::vector<double>{0.97, 0.02, 0.01, 0.0}, 0.0), (std::vector<TokenId>{0, 1, 2, 3}));
}

TEST(PlausibilityMask, UnitAlphaKeepsArgmaxOnly) {
    EXPECT_EQ(plausibility_mask(std::vector<double>{0.5, 0.3, 0.2}, 1.0), (std::vector<TokenId>{0}));
}

TEST(PlausibilityMask, LogAndProbabilityFormsAgree) {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> a(0.0, 1.0);
    for (int trial = 0; trial < 300; ++trial) {
        const auto logits = testing::random_logits(rng, 2 + trial % 6, -6.0, 6.0);
        const double alpha = trial % 10 == 0 ? 0.0 : a(rng);
        const auto probs = softmax(logits);
        const auto lp = log_softmax(logits);
        EXPECT_EQ(plausibility_mask(probs, alpha), plausibility_mask_log(lp, alpha));
    }
}

TEST(PlausibilityMask, LogitSpaceAlwaysKeepsArgmax) {
    EXPECT_EQ(plausibility_mask_logits(std::vector<double>{-4.0, -1.0, -2.0}, 0.5), (std::vector<TokenId>{1}));
    EXPECT_EQ(plausibility_mask_logits(std::vector<double>{4.0, 1.0, 2.0}, 0.5), (std::vector<TokenId>{0, 2}));
}

TEST(PlausibilityMask, RejectsAlphaOutOfRange) {
    EXPECT_THROW(plausibility_mask(std::vector<double>{1.0}, 1.5), Error);
    EXPECT_THROW(plausibility_mask(std::vector<double>{1.0}, -0.5), Error);
}

// ---- contrast_step -------------------------------------------------------------

TEST(ContrastStep, IdenticalModelsGiveUniform) {
    std::mt19937_64 rng(32);
    const auto logits = testing::random_logits(rng, 5);
    const auto pair = constant_pair(logits, logits, config(0.0, 1.0));
    const auto step = contrast_step(pair, TokenSeq{1});
    for (double p : step.probs) EXPECT_NEAR(p, 0.2, 1e-12);
    for (double f : step.trace.contrast_scores) EXPECT_NEAR(f, 0.0, 1e-12);
}

TEST(ContrastStep, TwoTokenRatioExample) {
    // exp(F) = [0.6/0.4, 0.4/0.6] = [3/2, 2/3]; normalized = [9/13, 4/13].
    const auto pair = constant_pair(logs({0.6, 0.4}), logs({0.4, 0.6}), config(0.0, 1.0));
    const auto step = contrast_step(pair, TokenSeq{0});
    EXPECT_NEAR(step.trace.contrast_scores[0], std::log(1.5), 1e-12);
    EXPECT_NEAR(step.trace.contrast_scores[1], std::log(2.0 / 3.0), 1e-12);
    EXPECT_NEAR(step.probs[0], 9.0 / 13.0, 1e-12);
    EXPECT_NEAR(step.probs[1], 4.0 / 13.0, 1e-12);
    EXPECT_EQ(step.trace.chosen, 0u);
}

TEST(ContrastStep, UnitAlphaForcesSingleton) {
    const auto pair = constant_pair(logs({0.5, 0.3, 0.2}), {0.0, 0.0, 0.0}, config(1.0, 1.0));
    const auto step = contrast_step(pair, TokenSeq{0});
    EXPECT_EQ(step.probs, (std::vector<double>{1.0, 0.0, 0.0}));
    EXPECT_EQ(step.trace.valid_set, (std::vector<TokenId>{0}));
}

TEST(ContrastStep, TraceInvariants) {
    std::mt19937_64 rng(33);
    for (int trial = 0; trial < 100; ++trial) {
        const auto pair = constant_pair(testing::random_logits(rng, 6), testing::random_logits(rng, 6),
                                        config(trial % 2 ? 0.3 : 0.0, 1.5));
        const auto step = contrast_step(pair, TokenSeq{2});
        const auto& t = step.trace;
        EXPECT_TRUE(std::find(t.valid_set.begin(), t.valid_set.end(), t.chosen) != t.valid_set.end());
        for (TokenId x = 0; x < 6; ++x) {
            const bool valid = std::find(t.valid_set.begin(), t.valid_set.end(), x) != t.valid_set.end();
            EXPECT_EQ(std::isinf(t.contrast_scores[x]) && t.contrast_scores[x] < 0, !valid);
            EXPECT_EQ(step.probs[x] == 0.0, !valid);
        }
        EXPECT_EQ(t.position, 1u);
    }
}

TEST(ContrastStep, WeakFloorClampsPenalty) {
    // Weak assigns ~e^-100 to token 1; the floor caps its reward at -(-30).
    auto cfg = config(0.0, 1.0);
    const auto pair = constant_pair({0.0, 0.0}, {0.0, -100.0}, cfg);
    const auto step = contrast_step(pair, TokenSeq{0});
    EXPECT_NEAR(step.trace.weak_logprobs[1], -30.0, 1e-12);
    EXPECT_NEAR(step.trace.contrast_scores[1] - step.trace.contrast_scores[0], 30.0, 1e-9);
}

TEST(ContrastStep, MatchesReferenceOnRandomTables) {
    std::mt19937_64 rng(34);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const auto b = testing::random_table(rng, 4, 2), w = testing::random_table(rng, 4, 2);
        const double alpha = trial % 3 == 0 ? 0.0 : u(rng), beta = 0.25 + 3 * u(rng);
        const auto v = vocab(4);
        const ContrastPair pair(b.build(v), w.build(v), config(alpha, beta));
        for (const auto& ctx : testing::all_sequences(4, 2)) {
            const auto got = contrast_step(pair, ctx).probs;
            const auto want = testing::reference::contrast_distribution(b, w, ctx, alpha, beta, -30.0);
            for (std::size_t i = 0; i < got.size(); ++i)
                ASSERT_NEAR(got[i], static_cast<double>(want[i]), 1e-12);
        }
    }
}

TEST(ContrastStep, BaseShiftInvariance) {
    std::mt19937_64 rng(35);
    for (int trial = 0; trial < 50; ++trial) {
        auto base = testing::random_logits(rng, 5);
        const auto weak = testing::random_logits(rng, 5);
        const auto a = contrast_step(constant_pair(base, weak, config(0.2, 2.0)), TokenSeq{0});
        for (auto& x : base) x += 17.25;
        const auto b = contrast_step(constant_pair(base, weak, config(0.2, 2.0)), TokenSeq{0});
        EXPECT_EQ(a.trace.valid_set, b.trace.valid_set);
        for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(a.probs[i], b.probs[i], 1e-12);
    }
}

TEST(ContrastPair, RejectsMismatchAndBadConfig) {
    TableSpec a{3, {0, 0, 0}, {}}, b{4, {0, 0, 0, 0}, {}};
    EXPECT_THROW(ContrastPair(a.build(vocab(3)), b.build(vocab(4)), {}), Error);
    EXPECT_THROW(ContrastPair(a.build(vocab(3)), a.build(vocab(3)), config(2.0, 1.0)), Error);
    EXPECT_THROW(ContrastPair(nullptr, a.build(vocab(3)), {}), Error);
}

TEST(ContrastPair, ReversedSwapsSides) {
    const auto pair = constant_pair(logs({0.6, 0.4}), logs({0.4, 0.6}), config(0.0, 1.0));
    const auto step = contrast_step(pair.reversed(), TokenSeq{0});
    EXPECT_NEAR(step.probs[0], 4.0 / 13.0, 1e-12);
}

// ---- decode ------------------------------------------------------------------

TEST(Decode, UnitAlphaEqualsBaseGreedy) {
    std::mt19937_64 rng(36);
    for (int trial = 0; trial < 20; ++trial) {
        const auto b = testing::random_table(rng, 5, 3), w = testing::random_table(rng, 5, 3);
        const auto v = vocab(5, std::nullopt, TokenId{4});
        auto cfg = config(1.0, 1.0 + trial);
        cfg.max_tokens = 8;
        const ContrastPair pair(b.build(v), w.build(v), cfg);
        const TokenSeq prompt{static_cast<TokenId>(trial % 4)};
        EXPECT_EQ(decode(pair, prompt).tokens, decode_plain(*pair.base, prompt, cfg).tokens);
    }
}

TEST(Decode, StopsAfterEosAndAtBudget) {
    const auto v = vocab(3, std::nullopt, TokenId{2});
    TableSpec t{3, {0, 5, 0}, {{{1}, {0, 0, 5}}}};
    auto cfg = config(0.0, 1.0);
    cfg.max_tokens = 10;
    const auto g = decode_plain(*t.build(v), TokenSeq{0}, cfg);
    EXPECT_EQ(g.tokens, (TokenSeq{1, 2}));
    EXPECT_EQ(g.traces.size(), 2u);

    TableSpec loop{3, {0, 5, 0}, {}};
    cfg.max_tokens = 4;
    EXPECT_EQ(decode_plain(*loop.build(v), TokenSeq{0}, cfg).tokens, (TokenSeq{1, 1, 1, 1}));
}

TEST(Decode, EmptyPromptStartsFromBos) {
    const auto v = vocab(3, TokenId{0}, TokenId{2});
    TableSpec t{3, {0, 0, 5}, {{{0}, {0, 5, 0}}}};
    auto cfg = config(0.0, 1.0);
    EXPECT_EQ(decode_plain(*t.build(v), TokenSeq{}, cfg).tokens, (TokenSeq{1, 2}));
}

TEST(Decode, SamplingIsReproducibleAndSeedSensitive) {
    std::mt19937_64 rng(37);
    const auto b = testing::random_table(rng, 6, 2, 0.9), w = testing::random_table(rng, 6, 2, 0.9);
    const auto v = vocab(6);
    auto cfg = config(0.0, 1.0);
    cfg.strategy = Strategy::sample;
    cfg.max_tokens = 32;
    cfg.seed = 99;
    const ContrastPair pair(b.build(v), w.build(v), cfg);
    const auto first = decode(pair, TokenSeq{0}).tokens;
    EXPECT_EQ(decode(pair, TokenSeq{0}).tokens, first);
    cfg.seed = 100;
    EXPECT_NE(decode(ContrastPair(pair.base, pair.weak, cfg), TokenSeq{0}).tokens, first);
}

TEST(Decode, SamplerFollowsDistribution) {
    TokenSampler s(5);
    const std::vector<double> p{0.2, 0.0, 0.8};
    std::vector<int> counts(3, 0);
    for (int i = 0; i < 20000; ++i) ++counts[s.draw(p)];
    EXPECT_EQ(counts[1], 0);
    EXPECT_NEAR(counts[2] / 20000.0, 0.8, 0.02);
}

// Fails once the context reaches `limit` tokens.
class FailingProvider final : public LogitProvider {
public:
    FailingProvider(std::shared_ptr<const Vocabulary> v, std::size_t limit)
        : LogitProvider(std::move(v), "failing"), limit_(limit) {}

protected:
    LogitVector compute_logits(std::span<const TokenId> context) const override {
        if (context.size() >= limit_) throw Error(ErrorKind::provider_unreachable, "backend went away");
        return LogitVector({0.0, 5.0, 0.0});
    }

private:
    std::size_t limit_;
};

TEST(Decode, ProviderFailureKeepsPartialOutput) {
    const auto v = vocab(3, std::nullopt, TokenId{2});
    const FailingProvider lm(v, 3);
    try {
        decode_plain(lm, TokenSeq{0}, config(0.0, 1.0));
        FAIL();
    } catch (const DecodeError& e) {
        EXPECT_EQ(e.kind(), ErrorKind::provider_unreachable);
        EXPECT_EQ(e.partial().tokens, (TokenSeq{1, 1}));
    }
    EXPECT_THROW(decode_plain(lm, TokenSeq{7}, config(0.0, 1.0)), Error);
}

// ---- score_sequence ---------------------------------------------------------

TEST(ScoreSequence, SingleProviderSingleToken) {
    TableSpec t{4, logs({0.25, 0.25, 0.25, 0.25}), {}};
    EXPECT_NEAR(score_sequence(*t.build(vocab(4)), TokenSeq{0}, TokenSeq{3}), std::log(0.25), 1e-12);
}

TEST(ScoreSequence, IdenticalModelsScoreUniform) {
    std::mt19937_64 rng(38);
    const auto desc = testing::random_table(rng, 4, 2);
    const auto lm = desc.build(vocab(4));
    const ContrastPair pair(lm, lm, config(0.0, 1.0));
    EXPECT_NEAR(score_sequence(pair, TokenSeq{1}, TokenSeq{2, 3}), 2 * std::log(0.25), 1e-12);
}

TEST(ScoreSequence, EqualsSumOfStepScores) {
    std::mt19937_64 rng(39);
    const auto b = testing::random_table(rng, 5, 3, 0.8), w = testing::random_table(rng, 5, 3, 0.8);
    const auto v = vocab(5);
    const ContrastPair pair(b.build(v), w.build(v), config(0.0, 1.7));
    const TokenSeq prompt{1, 3}, cont{0, 4};
    const auto s1 = contrast_step(pair, prompt);
    const auto s2 = contrast_step(pair, TokenSeq{1, 3, 0});
    const double expected = std::log(s1.probs[0]) + std::log(s2.probs[4]);
    EXPECT_NEAR(score_sequence(pair, prompt, cont), expected, 1e-12);
    EXPECT_NEAR(score_sequence(pair, prompt, cont, {true}), expected / 2.0, 1e-12);
}

TEST(ScoreSequence, MaskedTokenScoresNegativeInfinity) {
    const auto pair = constant_pair(logs({0.9, 0.05, 0.05}), {0.0, 0.0, 0.0}, config(0.5, 1.0));
    EXPECT_EQ(score_sequence(pair, TokenSeq{0}, TokenSeq{1}), kNegInf);
}

TEST(ScoreSequence, EmptyContinuationRejected) {
    TableSpec t{3, {0, 0, 0}, {}};
    EXPECT_THROW(score_sequence(*t.build(vocab(3)), TokenSeq{0}, TokenSeq{}), Error);
}

// ---- traces ------------------------------------------------------------------

TEST(Trace, TopKOrderingAndMaskedEntriesSkipped) {
    const auto pair = constant_pair(logs({0.5, 0.3, 0.15, 0.05}), {0.0, 0.0, 0.0, 0.0}, config(0.4, 1.0));
    const auto step = contrast_step(pair, TokenSeq{0});
    const auto j = trace_to_json(step.trace, 2);
    EXPECT_EQ(j["chosen"], 0);
    EXPECT_EQ(j["valid_size"], 2);
    ASSERT_EQ(j["contrast_top"].size(), 2u);
    EXPECT_EQ(j["contrast_top"][0][0], 0);
    EXPECT_EQ(j["contrast_top"][1][0], 1);
    EXPECT_EQ(j["base_top"].size(), 2u);

    std::ostringstream out;
    write_trace_jsonl(out, std::vector<StepTrace>{step.trace, step.trace}, 2);
    const std::string text = out.str();
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 2);
}

} // namespace
} // namespace icd
