// SPDX-License-Identifier: Apache-2.0

#include "icd/providers/decorators.hpp"

#include "icd/core/error.hpp"

namespace icd {

PromptedProvider::PromptedProvider(ProviderPtr inner, TokenSeq prefix)
    : LogitProvider(inner ? inner->shared_vocab() : nullptr, inner ? "prompted(" + inner->name() + ")" : ""),
      inner_(std::move(inner)),
      prefix_(std::move(prefix)) {
    vocab().check_ids(prefix_);
}

LogitVector PromptedProvider::compute_logits(std::span<const TokenId> context) const {
    TokenSeq full;
    full.reserve(prefix_.size() + context.size());
    full.insert(full.end(), prefix_.begin(), prefix_.end());
    full.insert(full.end(), context.begin(), context.end());
    return inner_->next_logits(full);
}

std::shared_ptr<const PromptedProvider> wrap_with_prompt(ProviderPtr provider, TokenSeq prefix) {
    if (!provider) throw Error(ErrorKind::invalid_argument, "wrap_with_prompt: null provider");
    if (auto prompted = std::dynamic_pointer_cast<const PromptedProvider>(provider)) {
        TokenSeq combined = prompted->prefix();
        combined.insert(combined.end(), prefix.begin(), prefix.end());
        return std::make_shared<PromptedProvider>(prompted->inner(), std::move(combined));
    }
    return std::make_shared<PromptedProvider>(std::move(provider), std::move(prefix));
}

std::size_t CachedProvider::SeqHash::operator()(const TokenSeq& s) const noexcept {
    // FNV-1a over the ids
    std::size_t h = 1469598103934665603ull;
    for (TokenId t : s) {
        h ^= t;
        h *= 1099511628211ull;
    }
    return h;
}

CachedProvider::CachedProvider(ProviderPtr inner)
    : LogitProvider(inner ? inner->shared_vocab() : nullptr, inner ? "cached(" + inner->name() + ")" : ""),
      inner_(std::move(inner)) {}

LogitVector CachedProvider::compute_logits(std::span<const TokenId> context) const {
    TokenSeq key(context.begin(), context.end());
    {
        std::lock_guard lock(mu_);
        if (auto it = cache_.find(key); it != cache_.end()) {
            ++hits_;
            return it->second;
        }
    }
    auto logits = inner_->next_logits(context);
    std::lock_guard lock(mu_);
    ++misses_;
    cache_.emplace(std::move(key), logits);
    return logits;
}

std::size_t CachedProvider::hits() const {
    std::lock_guard lock(mu_);
    return hits_;
}

std::size_t CachedProvider::misses() const {
    std::lock_guard lock(mu_);
    return misses_;
}

} // namespace icd
