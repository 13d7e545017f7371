// SPDX-License-Identifier: Apache-2.0

#include "icd/providers/provider.hpp"

#include <fmt/format.h>

#include "icd/core/error.hpp"

namespace icd {

LogitProvider::LogitProvider(std::shared_ptr<const Vocabulary> vocab, std::string name)
    : vocab_(std::move(vocab)), name_(std::move(name)) {
    if (!vocab_) throw Error(ErrorKind::invalid_argument, "provider requires a vocabulary");
}

LogitVector LogitProvider::next_logits(std::span<const TokenId> context) const {
    vocab_->check_ids(context);
    LogitVector out;
    if (context.empty() && vocab_->bos() && expands_empty_context()) {
        const TokenId bos[] = {*vocab_->bos()};
        out = compute_logits(bos);
    } else {
        out = compute_logits(context);
    }
    if (out.size() != vocab_->size()) {
        throw Error(ErrorKind::protocol_error,
                    fmt::format("provider '{}' returned {} logits for a vocabulary of {}", name_, out.size(), vocab_->size()));
    }
    return out;
}

void require_same_vocab(const LogitProvider& base, const LogitProvider& weak) {
    if (base.vocab().size() != weak.vocab().size()) {
        throw Error(ErrorKind::vocab_mismatch,
                    fmt::format("vocabulary size mismatch: base '{}' has {}, weak '{}' has {}", base.name(),
                                base.vocab().size(), weak.name(), weak.vocab().size()));
    }
}

} // namespace icd
