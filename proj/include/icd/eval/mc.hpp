// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "icd/core/vocabulary.hpp"
#include "icd/decoder/decode.hpp"

namespace icd::eval {

struct MCOption {
    std::string text;
    TokenSeq tokens;
    bool is_correct = false;
};

/// One multiple-choice question. The scoring prompt is `prompt_tokens`
/// (few-shot prefix and question, already tokenized).
struct MCItem {
    std::string id;
    std::string question;
    std::string fewshot_prefix;
    TokenSeq prompt_tokens;
    std::vector<MCOption> options;
    std::size_t best_index = 0;

    /// >= 1 correct and >= 1 incorrect option, best_index on a correct
    /// option; with `require_tokens`, every option token list is non-empty.
    void validate(bool require_tokens) const;
    bool tokenized() const noexcept;

    /// Keys: id, question, options[{text, is_correct, tokens?}], best_index,
    /// optional fewshot_prefix and prompt_tokens.
    static MCItem from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

struct MCScores {
    bool scorable = true;
    double mc1 = 0.0;
    double mc2 = 0.0;
    double mc3 = 0.0;
    std::vector<double> option_scores;   ///< per-option total log-score
    std::vector<double> option_probs;    ///< softmax over option_scores
};

/// Metrics from precomputed option log-scores.
///   MC1: 1 iff the unique maximum is best_index (ties score 0)
///   MC2: softmax mass on correct options
///   MC3: fraction of correct options strictly above every incorrect one
/// All scores -inf marks the item unscorable.
MCScores mc_metrics(const MCItem& item, std::span<const double> option_scores);

/// Scores each option with `scorer(prompt_tokens, option.tokens)`.
MCScores score_mc_item(const MCItem& item, const SequenceScorer& scorer);

/// Corpus means in percent over scorable items.
struct MCAggregate {
    double mc1 = 0.0;
    double mc2 = 0.0;
    double mc3 = 0.0;
    std::size_t scored = 0;
    std::size_t unscorable = 0;
};

/// Throws unscorable when no item is scorable.
MCAggregate aggregate_mc(std::span<const MCScores> items);

/// Two-decimal rendering used in reports.
std::string format_percent(double value);

nlohmann::json aggregate_to_json(const MCAggregate& agg);

/// JSON lines of MCItem objects.
std::vector<MCItem> load_mc_dataset(const std::filesystem::path& path);

/// Multiple-choice task file in the public TruthfulQA layout: an array of
/// {"question", "mc1_targets": {answer: 0|1}, "mc2_targets": {answer: 0|1}}.
/// Options come from mc2_targets; the mc1 answer labelled 1 is the best one.
std::vector<MCItem> load_truthfulqa_mc_task(const std::filesystem::path& path);

/// Fills missing prompt/option tokens by exact word lookup in `vocab`.
void attach_word_tokens(std::vector<MCItem>& items, const Vocabulary& vocab);

} // namespace icd::eval
