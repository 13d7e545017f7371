// SPDX-License-Identifier: Apache-2.0

#include "icd/providers/ngram_lm.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <fmt/format.h>

#include "icd/core/error.hpp"
#include "icd/core/io.hpp"

namespace icd {

NGramLM::NGramLM(std::shared_ptr<const Vocabulary> vocab, Options options, std::string name)
    : LogitProvider(std::move(vocab), std::move(name)), options_(options) {
    if (options_.order < 1) throw Error(ErrorKind::invalid_argument, "ngram: order must be at least 1");
    if (!(options_.k > 0.0) || !std::isfinite(options_.k)) {
        throw Error(ErrorKind::invalid_argument, fmt::format("ngram: smoothing k must be > 0 (got {})", options_.k));
    }
}

NGramLM NGramLM::train(std::shared_ptr<const Vocabulary> vocab, std::span<const TokenSeq> sequences, Options options,
                       std::string name) {
    NGramLM lm(std::move(vocab), options, std::move(name));
    const std::size_t v = lm.vocab().size();
    const std::size_t max_history = options.order - 1;
    for (const auto& seq : sequences) {
        lm.vocab().check_ids(seq);
        for (std::size_t i = 0; i < seq.size(); ++i) {
            // Every history length up to order-1 is counted so that short
            // contexts at the start of a sequence still have statistics.
            for (std::size_t h = 0; h <= std::min(max_history, i); ++h) {
                TokenSeq history(seq.begin() + static_cast<std::ptrdiff_t>(i - h), seq.begin() + static_cast<std::ptrdiff_t>(i));
                auto& slot = lm.counts_[std::move(history)];
                if (slot.next.empty()) slot.next.assign(v, 0);
                ++slot.next[seq[i]];
                ++slot.total;
            }
        }
    }
    return lm;
}

NGramLM NGramLM::load(const std::filesystem::path& config_path) {
    const auto cfg = io::read_json(config_path);
    const auto dir = config_path.parent_path();
    Options options;
    std::filesystem::path corpus;
    std::optional<std::filesystem::path> vocab_path;
    try {
        corpus = dir / cfg.at("corpus").get<std::string>();
        if (cfg.contains("order")) options.order = cfg.at("order").get<std::size_t>();
        if (cfg.contains("k")) options.k = cfg.at("k").get<double>();
        if (cfg.contains("vocab")) vocab_path = dir / cfg.at("vocab").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::parse_error, fmt::format("{}: {}", config_path.string(), e.what()));
    }

    std::vector<std::vector<std::string>> lines;
    {
        std::istringstream text(io::read_text(corpus));
        for (std::string line; std::getline(text, line);) {
            std::istringstream ws(line);
            std::vector<std::string> words;
            for (std::string w; ws >> w;) words.push_back(std::move(w));
            if (!words.empty()) lines.push_back(std::move(words));
        }
    }

    std::shared_ptr<const Vocabulary> vocab;
    if (vocab_path) {
        vocab = std::make_shared<Vocabulary>(Vocabulary::load(*vocab_path));
    } else {
        std::vector<std::string> tokens{"<s>", "</s>"};
        std::map<std::string, bool> seen{{"<s>", true}, {"</s>", true}};
        for (const auto& words : lines) {
            for (const auto& w : words) {
                if (seen.emplace(w, true).second) tokens.push_back(w);
            }
        }
        vocab = std::make_shared<Vocabulary>(std::move(tokens), TokenId{0}, TokenId{1});
    }

    std::vector<TokenSeq> sequences;
    for (const auto& words : lines) {
        TokenSeq seq;
        if (vocab->bos()) seq.push_back(*vocab->bos());
        for (const auto& w : words) {
            auto id = vocab->find(w);
            if (!id) throw Error(ErrorKind::vocab_violation, fmt::format("ngram corpus word '{}' missing from vocabulary", w));
            seq.push_back(*id);
        }
        if (vocab->eos()) seq.push_back(*vocab->eos());
        sequences.push_back(std::move(seq));
    }
    return train(std::move(vocab), sequences, options, config_path.stem().string());
}

LogitVector NGramLM::compute_logits(std::span<const TokenId> context) const {
    const std::size_t v = vocab().size();
    const std::size_t h = std::min(options_.order - 1, context.size());
    TokenSeq history(context.end() - static_cast<std::ptrdiff_t>(h), context.end());
    std::vector<double> out(v);
    const double k = options_.k;
    if (auto it = counts_.find(history); it != counts_.end()) {
        const double denom = static_cast<double>(it->second.total) + k * static_cast<double>(v);
        for (std::size_t i = 0; i < v; ++i) out[i] = std::log((static_cast<double>(it->second.next[i]) + k) / denom);
    } else {
        std::fill(out.begin(), out.end(), std::log(k / (k * static_cast<double>(v))));
    }
    return LogitVector(std::move(out));
}

} // namespace icd
