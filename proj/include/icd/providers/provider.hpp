// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <span>
#include <string>

#include "icd/core/logits.hpp"
#include "icd/core/vocabulary.hpp"

namespace icd {

/**
 * Abstract next-token model: a token context in, one finite logit per
 * vocabulary entry out.
 *
 * Implementations must be deterministic (identical context gives
 * bit-identical logits) and safe to call from several threads at once.
 * `next_logits` validates ids, maps an empty context to `[bos]` when the
 * vocabulary defines one, and checks the returned vector's shape.
 */
class LogitProvider {
public:
    virtual ~LogitProvider() = default;

    const Vocabulary& vocab() const noexcept { return *vocab_; }
    std::shared_ptr<const Vocabulary> shared_vocab() const noexcept { return vocab_; }
    const std::string& name() const noexcept { return name_; }

    LogitVector next_logits(std::span<const TokenId> context) const;

protected:
    LogitProvider(std::shared_ptr<const Vocabulary> vocab, std::string name);

    virtual LogitVector compute_logits(std::span<const TokenId> context) const = 0;

    /// Decorators forward the raw context and let the wrapped provider
    /// apply the empty-context rule.
    virtual bool expands_empty_context() const noexcept { return true; }

private:
    std::shared_ptr<const Vocabulary> vocab_;
    std::string name_;
};

using ProviderPtr = std::shared_ptr<const LogitProvider>;

/// Rejects pairs whose vocabulary sizes differ (vocab_mismatch).
void require_same_vocab(const LogitProvider& base, const LogitProvider& weak);

} // namespace icd
