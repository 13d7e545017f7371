// SPDX-License-Identifier: Apache-2.0

#include "icd/providers/table_lm.hpp"

#include <fmt/format.h>

#include "icd/core/error.hpp"
#include "icd/core/io.hpp"

namespace icd {

TableLM::TableLM(std::shared_ptr<const Vocabulary> vocab, LogitVector fallback, Entries entries, std::string name)
    : LogitProvider(std::move(vocab), std::move(name)), fallback_(std::move(fallback)), entries_(std::move(entries)) {
    const std::size_t v = this->vocab().size();
    if (fallback_.size() != v) {
        throw Error(ErrorKind::invalid_argument, fmt::format("table: default vector has {} entries, expected {}", fallback_.size(), v));
    }
    for (const auto& [ctx, logits] : entries_) {
        this->vocab().check_ids(ctx);
        if (logits.size() != v) {
            throw Error(ErrorKind::invalid_argument,
                        fmt::format("table: entry for context of length {} has {} logits, expected {}", ctx.size(), logits.size(), v));
        }
    }
}

TableLM TableLM::from_json(const nlohmann::json& j, std::string name) {
    try {
        const auto v = j.at("vocab_size").get<std::size_t>();
        std::shared_ptr<const Vocabulary> vocab;
        if (j.contains("tokens")) {
            vocab = std::make_shared<Vocabulary>(Vocabulary::from_json(j));
            if (vocab->size() != v) {
                throw Error(ErrorKind::invalid_argument,
                            fmt::format("table: {} tokens listed but vocab_size is {}", vocab->size(), v));
            }
        } else {
            auto opt = [&](const char* key) -> std::optional<TokenId> {
                if (!j.contains(key)) return std::nullopt;
                return j.at(key).get<TokenId>();
            };
            vocab = std::make_shared<Vocabulary>(Vocabulary::synthetic(v, opt("bos"), opt("eos")));
        }
        Entries entries;
        if (j.contains("entries")) {
            for (const auto& e : j.at("entries")) {
                auto ctx = e.at("context").get<TokenSeq>();
                auto [it, inserted] = entries.emplace(std::move(ctx), LogitVector(e.at("logits").get<std::vector<double>>()));
                if (!inserted) throw Error(ErrorKind::invalid_argument, "table: duplicate context entry");
            }
        }
        if (j.contains("name")) name = j.at("name").get<std::string>();
        return TableLM(std::move(vocab), LogitVector(j.at("default").get<std::vector<double>>()), std::move(entries),
                       std::move(name));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::parse_error, fmt::format("table: {}", e.what()));
    }
}

TableLM TableLM::load(const std::filesystem::path& path) {
    return from_json(io::read_json(path), path.stem().string());
}

nlohmann::json TableLM::to_json() const {
    nlohmann::json j = vocab().to_json();
    j["vocab_size"] = vocab().size();
    j["default"] = std::vector<double>(fallback_.begin(), fallback_.end());
    auto& arr = j["entries"] = nlohmann::json::array();
    for (const auto& [ctx, logits] : entries_) {
        arr.push_back({{"context", ctx}, {"logits", std::vector<double>(logits.begin(), logits.end())}});
    }
    return j;
}

LogitVector TableLM::compute_logits(std::span<const TokenId> context) const {
    // Suffix of length n is context[size-n, size); n == size is the exact match.
    for (std::size_t n = context.size(); n >= 1; --n) {
        TokenSeq key(context.end() - static_cast<std::ptrdiff_t>(n), context.end());
        if (auto it = entries_.find(key); it != entries_.end()) return it->second;
    }
    if (context.empty()) {
        if (auto it = entries_.find(TokenSeq{}); it != entries_.end()) return it->second;
    }
    return fallback_;
}

} // namespace icd
