// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <mutex>
#include <unordered_map>

#include "icd/providers/provider.hpp"

namespace icd {

/// Prepends a fixed token prefix to every context:
/// logits(ctx) == inner.logits(prefix ++ ctx).
///
/// Used for prompt-based induction, where the prefix is a tokenized
/// negative system prompt.
class PromptedProvider final : public LogitProvider {
public:
    PromptedProvider(ProviderPtr inner, TokenSeq prefix);

    const ProviderPtr& inner() const noexcept { return inner_; }
    const TokenSeq& prefix() const noexcept { return prefix_; }

protected:
    LogitVector compute_logits(std::span<const TokenId> context) const override;
    bool expands_empty_context() const noexcept override { return false; }

private:
    ProviderPtr inner_;
    TokenSeq prefix_;
};

/// Wraps `provider` with `prefix`. Wrapping an already prompted provider
/// composes: wrap(wrap(P, p1), p2) behaves as wrap(P, p1 ++ p2), since the
/// outer prefix is applied first and the inner prefix then lands in front.
std::shared_ptr<const PromptedProvider> wrap_with_prompt(ProviderPtr provider, TokenSeq prefix);

/// Memoizes logits per context. Bit-identical to the wrapped provider.
class CachedProvider final : public LogitProvider {
public:
    explicit CachedProvider(ProviderPtr inner);

    std::size_t hits() const;
    std::size_t misses() const;

protected:
    LogitVector compute_logits(std::span<const TokenId> context) const override;
    bool expands_empty_context() const noexcept override { return false; }

private:
    struct SeqHash {
        std::size_t operator()(const TokenSeq& s) const noexcept;
    };

    ProviderPtr inner_;
    mutable std::mutex mu_;
    mutable std::unordered_map<TokenSeq, LogitVector, SeqHash> cache_;
    mutable std::size_t hits_ = 0;
    mutable std::size_t misses_ = 0;
};

} // namespace icd
