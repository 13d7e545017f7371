// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "icd/core/error.hpp"
#include "icd/core/io.hpp"
#include "icd/eval/facts.hpp"
#include "icd/eval/judge.hpp"
#include "icd/eval/mc.hpp"
#include "json.hpp"
#include "support/support.hpp"

namespace icd::eval {
namespace {

using nlohmann::json;
constexpr double kInf = std::numeric_limits<double>::infinity();

MCItem item(std::vector<bool> correct, std::size_t best) {
    MCItem it;
    it.id = "i";
    it.question = "q";
    it.prompt_tokens = {0};
    for (std::size_t k = 0; k < correct.size(); ++k)
        it.options.push_back({"o" + std::to_string(k), {static_cast<TokenId>(k + 1)}, correct[k]});
    it.best_index = best;
    return it;
}

// ---- MC metrics --------------------------------------------------------------

TEST(MCMetrics, TwoOptionsLogThreeVersusZero) {
    const auto s = mc_metrics(item({true, false}, 0), std::vector<double>{std::log(3.0), 0.0});
    EXPECT_EQ(s.mc1, 1.0);
    EXPECT_NEAR(s.mc2, 0.75, 1e-12);
    EXPECT_EQ(s.mc3, 1.0);
}

TEST(MCMetrics, RankCountWithTwoCorrect) {
    const auto s = mc_metrics(item({true, true, false}, 0), std::vector<double>{2.0, 0.5, 1.0});
    EXPECT_EQ(s.mc1, 1.0);
    EXPECT_EQ(s.mc3, 0.5);
    // (e^2 + e^0.5) / (e^2 + e^0.5 + e^1), frozen from the rational oracle.
    EXPECT_NEAR(s.mc2, 0.76877610237785093, 1e-12);
}

TEST(MCMetrics, AllTiedIsConservative) {
    const auto s = mc_metrics(item({true, true, false}, 0), std::vector<double>{-1.0, -1.0, -1.0});
    EXPECT_EQ(s.mc1, 0.0);
    EXPECT_NEAR(s.mc2, 2.0 / 3.0, 1e-12);
    EXPECT_EQ(s.mc3, 0.0);
}

TEST(MCMetrics, MaskedOptionsAndUnscorableItems) {
    const auto partial = mc_metrics(item({true, false}, 0), std::vector<double>{-2.0, -kInf});
    EXPECT_TRUE(partial.scorable);
    EXPECT_EQ(partial.mc2, 1.0);
    const auto none = mc_metrics(item({true, false}, 0), std::vector<double>{-kInf, -kInf});
    EXPECT_FALSE(none.scorable);
}

TEST(MCMetrics, BestMustBeCorrectAndCountsMustMatch) {
    EXPECT_THROW(item({true, false}, 1).validate(true), Error);
    EXPECT_THROW(mc_metrics(item({true, false}, 0), std::vector<double>{0.0}), Error);
    EXPECT_THROW(item({false, false}, 0).validate(true), Error);
}

TEST(MCMetrics, PropertiesOnRandomScores) {
    std::mt19937_64 rng(41);
    std::uniform_int_distribution<int> n(2, 6);
    for (int trial = 0; trial < 300; ++trial) {
        const auto k = static_cast<std::size_t>(n(rng));
        std::vector<bool> correct(k, false);
        correct[0] = true;
        for (std::size_t i = 1; i < k; ++i) correct[i] = rng() % 2;
        if (std::find(correct.begin(), correct.end(), false) == correct.end()) correct[k - 1] = false;
        const auto scores = testing::random_logits(rng, k, -10.0, 0.0);
        const auto s = mc_metrics(item(correct, 0), scores);
        EXPECT_GE(s.mc2, 0.0);
        EXPECT_LE(s.mc2, 1.0);
        EXPECT_GE(s.mc3, 0.0);
        EXPECT_LE(s.mc3, 1.0);
        if (s.mc1 == 1.0) EXPECT_GT(s.mc3, 0.0);
        double total = 0;
        for (double p : s.option_probs) total += p;
        EXPECT_NEAR(total, 1.0, 1e-12);
    }
}

TEST(MCAggregate, SingleAndPairExamples) {
    std::vector<MCScores> one{{true, 1, 0.75, 1, {}, {}}};
    const auto a = aggregate_mc(one);
    EXPECT_EQ(format_percent(a.mc1), "100.00");
    EXPECT_EQ(format_percent(a.mc2), "75.00");
    EXPECT_EQ(format_percent(a.mc3), "100.00");

    std::vector<MCScores> two{{true, 1, 0.5, 1, {}, {}}, {true, 0, 0.5, 0, {}, {}}};
    const auto b = aggregate_mc(two);
    EXPECT_EQ(aggregate_to_json(b)["mc1"], "50.00");
    EXPECT_EQ(aggregate_to_json(b)["mc2"], "50.00");
    EXPECT_EQ(aggregate_to_json(b)["mc3"], "50.00");
}

TEST(MCAggregate, UnscorableExcludedAndAllUnscorableFails) {
    std::vector<MCScores> mixed{{true, 1, 1, 1, {}, {}}, {false, 0, 0, 0, {}, {}}};
    const auto a = aggregate_mc(mixed);
    EXPECT_EQ(a.scored, 1u);
    EXPECT_EQ(a.unscorable, 1u);
    EXPECT_EQ(a.mc1, 100.0);
    std::vector<MCScores> none{{false, 0, 0, 0, {}, {}}};
    EXPECT_THROW(aggregate_mc(none), Error);
}

TEST(MCDataset, LoadsJsonlAndTruthfulQaLayouts) {
    testing::ScratchDir dir("mc");
    const auto items = load_mc_dataset(testing::fixture("mc/items.jsonl"));
    ASSERT_EQ(items.size(), 3u);
    EXPECT_EQ(items[1].options.size(), 3u);
    EXPECT_TRUE(items[0].tokenized());

    const json tqa = json::array({{{"question", "What is red?"},
                                   {"mc1_targets", {{"A colour", 1}, {"A fruit", 0}}},
                                   {"mc2_targets", {{"A colour", 1}, {"A hue", 1}, {"A fruit", 0}}}}});
    io::write_text(dir / "mc_task.json", tqa.dump());
    const auto t = load_truthfulqa_mc_task(dir / "mc_task.json");
    ASSERT_EQ(t.size(), 1u);
    EXPECT_EQ(t[0].options.size(), 3u);
    EXPECT_EQ(t[0].options[t[0].best_index].text, "A colour");
    EXPECT_FALSE(t[0].tokenized());
}

TEST(MCDataset, WordTokensAttachedFromVocabulary) {
    auto items = load_mc_dataset(testing::fixture("mc/items.jsonl"));
    for (auto& it : items) {
        it.prompt_tokens.clear();
        for (auto& o : it.options) o.tokens.clear();
    }
    const Vocabulary v({"<s>", "</s>", "q1", "q2", "q3", "A", "B", "C"});
    attach_word_tokens(items, v);
    EXPECT_EQ(items[0].prompt_tokens, (TokenSeq{2}));
    EXPECT_EQ(items[0].options[1].tokens, (TokenSeq{6}));
}

// ---- facts -------------------------------------------------------------------

FactEvalRecord responded(std::vector<Verdict> verdicts) {
    FactEvalRecord r{"e", true, {}};
    for (auto v : verdicts) r.facts.push_back({"f", v});
    return r;
}

TEST(Facts, OneAbstainedOneWithThreeOfFourSupported) {
    using V = Verdict;
    std::vector<FactEvalRecord> recs{{"a", false, {}},
                                     responded({V::supported, V::supported, V::supported, V::unsupported})};
    const auto agg = aggregate_facts(recs);
    EXPECT_EQ(agg.pct_response, 50.0);
    EXPECT_EQ(agg.facts_per_response, 4.0);
    EXPECT_EQ(agg.precision_score, 75.0);
}

TEST(Facts, AllAbstainedLeavesRatiosAbsent) {
    std::vector<FactEvalRecord> recs{{"a", false, {}}, {"b", false, {}}};
    const auto agg = aggregate_facts(recs);
    EXPECT_EQ(agg.pct_response, 0.0);
    EXPECT_FALSE(agg.facts_per_response);
    EXPECT_FALSE(agg.precision_score);
    EXPECT_EQ(json::parse(emit_fact_report(agg))["precision_score"], nullptr);
    EXPECT_EQ(fact_report_csv(agg), "pct_response,facts_per_response,precision_score\n0.0,,\n");
}

TEST(Facts, EmptyInputAndInconsistentRecordsRejected) {
    EXPECT_THROW(aggregate_facts({}), Error);
    FactEvalRecord bad{"x", false, {{"f", Verdict::supported}}};
    EXPECT_THROW(bad.validate(), Error);
}

TEST(FactReport, PublishedRowRoundTrips) {
    FactAggregate agg;
    agg.pct_response = 36.1;
    agg.facts_per_response = 46.6;
    agg.precision_score = 66.3;
    const auto text = emit_fact_report(agg);
    const auto back = parse_fact_report(text);
    EXPECT_EQ(back.pct_response, 36.1);
    EXPECT_EQ(back.facts_per_response, 46.6);
    EXPECT_EQ(back.precision_score, 66.3);
    EXPECT_EQ(emit_fact_report(back), text);
    EXPECT_EQ(fact_report_csv(back), "pct_response,facts_per_response,precision_score\n36.1,46.6,66.3\n");
    EXPECT_THROW(parse_fact_report("{}"), Error);
}

TEST(Abstention, DefaultPatterns) {
    EXPECT_TRUE(detect_abstention(""));
    EXPECT_TRUE(detect_abstention("   "));
    EXPECT_TRUE(detect_abstention("I cannot provide information about this person."));
    EXPECT_TRUE(detect_abstention("Sorry, I don’t have details on that."));
    EXPECT_FALSE(detect_abstention("Vasily Chuikov (1900-1982) was a Soviet military leader and Marshal."));
}

TEST(Abstention, CustomPatternsReplaceDefaults) {
    const std::vector<std::string> only{"no comment"};
    EXPECT_TRUE(detect_abstention("No comment at this time.", only));
    EXPECT_FALSE(detect_abstention("I cannot say.", only));
    EXPECT_FALSE(detect_abstention("", only));
}

TEST(LocalKnowledge, NormalizedMatchingAndUnknownEntities) {
    LocalKnowledge kb;
    kb.add("Vasily Chuikov", {"Born in 1900."});
    const std::vector<std::string> facts{"born in 1900", "born in 1904", "  BORN IN 1900!  "};
    const auto v = check_facts_local("Vasily Chuikov", facts, kb);
    EXPECT_EQ(v, (std::vector<Verdict>{Verdict::supported, Verdict::unsupported, Verdict::supported}));
    EXPECT_EQ(kb.warnings(), 0u);
    const auto u = check_facts_local("Nobody", facts, kb);
    EXPECT_EQ(u, std::vector<Verdict>(3, Verdict::unsupported));
    EXPECT_EQ(kb.warnings(), 1u);
}

// ---- judge prompt ------------------------------------------------------------

TEST(JudgePrompt, ContainsFactualityQuestionAndSlots) {
    const auto p = emit_judge_prompt("Tell me a bio of X.", "first", "second");
    EXPECT_NE(p.find("Factuality: Is the response factual?"), std::string::npos);
    EXPECT_NE(p.find("#Output (a)#: first\n#Output (b)#: second"), std::string::npos);
}

TEST(JudgePrompt, SwappedOutputsDifferOnlyInSlots) {
    const auto ab = emit_judge_prompt("I", "first", "second");
    const auto ba = emit_judge_prompt("I", "second", "first");
    const auto tail = ab.find("#Output (a)#");
    EXPECT_EQ(ab.substr(0, tail), ba.substr(0, tail));
    EXPECT_NE(ab, ba);
}

TEST(JudgePrompt, EmptyOutputRejected) { EXPECT_THROW(emit_judge_prompt("I", "a", ""), Error); }

} // namespace
} // namespace icd::eval
