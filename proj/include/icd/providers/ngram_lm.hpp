// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>

#include "icd/providers/provider.hpp"

namespace icd {

/// Count-based n-gram model with add-k smoothing.
///
/// Logits are log((count + k) / (total + k*V)) for the longest available
/// history of at most order-1 tokens, so every entry stays finite.
class NGramLM final : public LogitProvider {
public:
    struct Options {
        std::size_t order = 2;
        double k = 1.0;
    };

    static NGramLM train(std::shared_ptr<const Vocabulary> vocab, std::span<const TokenSeq> sequences, Options options,
                         std::string name = "ngram");

    /// Config file: {"corpus": "train.txt", "order": 2, "k": 1.0, "vocab": "vocab.json"?}.
    /// Paths resolve relative to the config file. Without a vocab file the
    /// vocabulary is built from the corpus words (after <s> and </s>).
    /// Each non-blank corpus line is one sequence, framed by bos/eos when
    /// the vocabulary defines them.
    static NGramLM load(const std::filesystem::path& config_path);

    const Options& options() const noexcept { return options_; }

protected:
    LogitVector compute_logits(std::span<const TokenId> context) const override;

private:
    struct HistoryCounts {
        std::vector<std::uint64_t> next;
        std::uint64_t total = 0;
    };

    NGramLM(std::shared_ptr<const Vocabulary> vocab, Options options, std::string name);

    Options options_;
    std::map<TokenSeq, HistoryCounts> counts_;
};

} // namespace icd
