// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>

#include "icd/providers/provider.hpp"

namespace icd {

/// Deterministic lookup-table language model for fixtures and oracle tests.
///
/// Lookup order: exact context, then the longest stored proper suffix of
/// the context, then the default vector.
class TableLM final : public LogitProvider {
public:
    using Entries = std::map<TokenSeq, LogitVector>;

    TableLM(std::shared_ptr<const Vocabulary> vocab, LogitVector fallback, Entries entries,
            std::string name = "table");

    /// File shape: {"vocab_size": V, "default": [...], "entries": [{"context": [...], "logits": [...]}]}
    /// with optional "tokens", "bos", "eos", "pad" describing the vocabulary.
    static TableLM from_json(const nlohmann::json& j, std::string name = "table");
    static TableLM load(const std::filesystem::path& path);
    nlohmann::json to_json() const;

    const Entries& entries() const noexcept { return entries_; }
    const LogitVector& fallback() const noexcept { return fallback_; }

protected:
    LogitVector compute_logits(std::span<const TokenId> context) const override;

private:
    LogitVector fallback_;
    Entries entries_;
};

} // namespace icd
