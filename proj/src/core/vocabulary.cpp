// SPDX-License-Identifier: Apache-2.0

#include "icd/core/vocabulary.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "icd/core/error.hpp"

namespace icd {

namespace {

void check_special(const char* what, std::optional<TokenId> id, std::size_t size) {
    if (id && *id >= size) {
        throw Error(ErrorKind::invalid_argument,
                    fmt::format("vocabulary: {} id {} out of range for size {}", what, *id, size));
    }
}

std::optional<TokenId> optional_id(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<TokenId>();
}

} // namespace

Vocabulary::Vocabulary(std::vector<std::string> tokens,
                       std::optional<TokenId> bos,
                       std::optional<TokenId> eos,
                       std::optional<TokenId> pad)
    : tokens_(std::move(tokens)), bos_(bos), eos_(eos), pad_(pad) {
    if (tokens_.size() < 2) {
        throw Error(ErrorKind::invalid_argument, "vocabulary: size must be at least 2");
    }
    index_.reserve(tokens_.size());
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
        auto [it, inserted] = index_.emplace(tokens_[i], static_cast<TokenId>(i));
        if (!inserted) {
            throw Error(ErrorKind::invalid_argument,
                        fmt::format("vocabulary: duplicate token '{}' at ids {} and {}", tokens_[i], it->second, i));
        }
    }
    check_special("bos", bos_, tokens_.size());
    check_special("eos", eos_, tokens_.size());
    check_special("pad", pad_, tokens_.size());
}

Vocabulary Vocabulary::synthetic(std::size_t size, std::optional<TokenId> bos, std::optional<TokenId> eos) {
    std::vector<std::string> tokens;
    tokens.reserve(size);
    for (std::size_t i = 0; i < size; ++i) tokens.push_back(fmt::format("<{}>", i));
    return Vocabulary(std::move(tokens), bos, eos);
}

Vocabulary Vocabulary::from_json(const nlohmann::json& j) {
    try {
        return Vocabulary(j.at("tokens").get<std::vector<std::string>>(),
                          optional_id(j, "bos"), optional_id(j, "eos"), optional_id(j, "pad"));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::parse_error, fmt::format("vocabulary: {}", e.what()));
    }
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::io_error, fmt::format("cannot open vocabulary file {}", path.string()));
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::parse_error, fmt::format("{}: {}", path.string(), e.what()));
    }
    return from_json(j);
}

nlohmann::json Vocabulary::to_json() const {
    nlohmann::json j;
    j["tokens"] = tokens_;
    if (bos_) j["bos"] = *bos_;
    if (eos_) j["eos"] = *eos_;
    if (pad_) j["pad"] = *pad_;
    return j;
}

const std::string& Vocabulary::token(TokenId id) const {
    if (!contains(id)) {
        throw Error(ErrorKind::vocab_violation, fmt::format("token id {} out of range for vocabulary of size {}", id, size()));
    }
    return tokens_[id];
}

std::optional<TokenId> Vocabulary::find(std::string_view token) const {
    auto it = index_.find(std::string(token));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

void Vocabulary::check_ids(std::span<const TokenId> ids) const {
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (!contains(ids[i])) {
            throw Error(ErrorKind::vocab_violation,
                        fmt::format("token id {} at position {} out of range for vocabulary of size {}", ids[i], i, size()));
        }
    }
}

std::string Vocabulary::render(std::span<const TokenId> ids) const {
    std::string out;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (i) out += ' ';
        out += token(ids[i]);
    }
    return out;
}

TokenSeq Vocabulary::lookup_words(std::string_view text) const {
    std::istringstream words{std::string(text)};
    TokenSeq ids;
    for (std::string w; words >> w;) {
        auto id = find(w);
        if (!id) throw Error(ErrorKind::vocab_violation, fmt::format("word '{}' is not in the vocabulary", w));
        ids.push_back(*id);
    }
    return ids;
}

bool Vocabulary::operator==(const Vocabulary& other) const {
    return tokens_ == other.tokens_ && bos_ == other.bos_ && eos_ == other.eos_ && pad_ == other.pad_;
}

} // namespace icd
