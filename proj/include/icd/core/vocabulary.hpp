// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"

namespace icd {

using TokenId = std::uint32_t;
using TokenSeq = std::vector<TokenId>;

/**
 * Ordered token table shared by every provider taking part in a contrast.
 *
 * Token strings are unique and indexed 0..size-1. The engine never
 * tokenizes text; the strings exist for reporting and for the strict
 * word lookup used by small fixture corpora.
 */
class Vocabulary {
public:
    Vocabulary(std::vector<std::string> tokens,
               std::optional<TokenId> bos = std::nullopt,
               std::optional<TokenId> eos = std::nullopt,
               std::optional<TokenId> pad = std::nullopt);

    /// Placeholder names "<0>", "<1>", ... for providers that only know V.
    static Vocabulary synthetic(std::size_t size,
                                std::optional<TokenId> bos = std::nullopt,
                                std::optional<TokenId> eos = std::nullopt);

    static Vocabulary from_json(const nlohmann::json& j);
    static Vocabulary load(const std::filesystem::path& path);
    nlohmann::json to_json() const;

    std::size_t size() const noexcept { return tokens_.size(); }
    bool contains(TokenId id) const noexcept { return id < tokens_.size(); }
    const std::string& token(TokenId id) const;
    std::optional<TokenId> find(std::string_view token) const;

    std::optional<TokenId> bos() const noexcept { return bos_; }
    std::optional<TokenId> eos() const noexcept { return eos_; }
    std::optional<TokenId> pad() const noexcept { return pad_; }

    /// Throws vocab_violation naming the first out-of-range id.
    void check_ids(std::span<const TokenId> ids) const;

    /// Token strings joined by single spaces.
    std::string render(std::span<const TokenId> ids) const;

    /// Whitespace split followed by exact lookup; unknown words throw.
    TokenSeq lookup_words(std::string_view text) const;

    bool operator==(const Vocabulary& other) const;

private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, TokenId> index_;
    std::optional<TokenId> bos_;
    std::optional<TokenId> eos_;
    std::optional<TokenId> pad_;
};

} // namespace icd
