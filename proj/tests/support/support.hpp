// SPDX-License-Identifier: Apache-2.0
//
// Shared helpers for unit and acceptance tests: fixture paths, scratch
// directories, random table models and a brute-force reference for the
// contrast distribution that shares no code with the library.

#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "icd/providers/table_lm.hpp"

namespace icd::testing {

inline std::filesystem::path fixture(const std::string& rel) {
    return std::filesystem::path(ICD_FIXTURE_DIR) / rel;
}

class ScratchDir {
public:
    explicit ScratchDir(const std::string& tag) {
        static std::mt19937_64 rng{std::random_device{}()};
        path_ = std::filesystem::temp_directory_path() / ("icd-test-" + tag + "-" + std::to_string(rng()));
        std::filesystem::create_directories(path_);
    }
    ~ScratchDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    ScratchDir(const ScratchDir&) = delete;
    ScratchDir& operator=(const ScratchDir&) = delete;
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

private:
    std::filesystem::path path_;
};

/// Raw description of a table model; the reference lookup below works on
/// this directly instead of going through TableLM.
struct TableSpec {
    std::size_t vocab_size = 0;
    std::vector<double> fallback;
    std::map<TokenSeq, std::vector<double>> entries;

    std::shared_ptr<const TableLM> build(std::shared_ptr<const Vocabulary> vocab, std::string name = "table") const {
        TableLM::Entries e;
        for (const auto& [ctx, v] : entries) e.emplace(ctx, LogitVector(v));
        return std::make_shared<const TableLM>(std::move(vocab), LogitVector(fallback), std::move(e), std::move(name));
    }
};

inline std::vector<double> random_logits(std::mt19937_64& rng, std::size_t v, double lo = -3.0, double hi = 3.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> out(v);
    for (auto& x : out) x = u(rng);
    return out;
}

/// Every context of length 1..max_depth, each present with probability
/// `density`, plus a random fallback.
inline TableSpec random_table(std::mt19937_64& rng, std::size_t v, std::size_t max_depth, double density = 0.35) {
    TableSpec t;
    t.vocab_size = v;
    t.fallback = random_logits(rng, v);
    std::bernoulli_distribution keep(density);
    std::vector<TokenSeq> frontier{{}};
    for (std::size_t d = 1; d <= max_depth; ++d) {
        std::vector<TokenSeq> next;
        for (const auto& ctx : frontier) {
            for (TokenId x = 0; x < v; ++x) {
                TokenSeq c = ctx;
                c.push_back(x);
                if (keep(rng)) t.entries.emplace(c, random_logits(rng, v));
                next.push_back(std::move(c));
            }
        }
        frontier = std::move(next);
    }
    return t;
}

/// All token sequences of exactly `length` over a vocabulary of size v.
inline std::vector<TokenSeq> all_sequences(std::size_t v, std::size_t length) {
    std::vector<TokenSeq> out{{}};
    for (std::size_t d = 0; d < length; ++d) {
        std::vector<TokenSeq> next;
        for (const auto& s : out)
            for (TokenId x = 0; x < v; ++x) {
                TokenSeq c = s;
                c.push_back(x);
                next.push_back(std::move(c));
            }
        out = std::move(next);
    }
    return out;
}

namespace reference {

using real = long double;

/// Exact match, then the longest stored suffix, then the fallback.
inline const std::vector<double>& lookup(const TableSpec& t, const TokenSeq& ctx) {
    if (auto it = t.entries.find(ctx); it != t.entries.end()) return it->second;
    for (std::size_t drop = 1; drop < ctx.size(); ++drop) {
        TokenSeq suffix(ctx.begin() + static_cast<std::ptrdiff_t>(drop), ctx.end());
        if (auto it = t.entries.find(suffix); it != t.entries.end()) return it->second;
    }
    return t.fallback;
}

inline std::vector<real> probabilities(const std::vector<double>& logits) {
    real z = 0;
    std::vector<real> p(logits.size());
    for (std::size_t i = 0; i < logits.size(); ++i) z += p[i] = std::exp(static_cast<real>(logits[i]));
    for (auto& x : p) x /= z;
    return p;
}

/// Final next-token distribution written in ratio form:
///   P(x) proportional to p_base(x)^beta / max(p_weak(x), e^floor)
/// over tokens with p_base(x) >= alpha * max p_base, zero elsewhere.
inline std::vector<real> contrast_distribution(const std::vector<double>& base_logits,
                                               const std::vector<double>& weak_logits, double alpha, double beta,
                                               double floor) {
    const auto pb = probabilities(base_logits);
    const auto pw = probabilities(weak_logits);
    const real top = *std::max_element(pb.begin(), pb.end());
    const real clamp = std::exp(static_cast<real>(floor));
    std::vector<real> w(pb.size(), 0);
    real z = 0;
    for (std::size_t i = 0; i < pb.size(); ++i) {
        if (pb[i] < static_cast<real>(alpha) * top) continue;
        z += w[i] = std::pow(pb[i], static_cast<real>(beta)) / std::max(pw[i], clamp);
    }
    for (auto& x : w) x /= z;
    return w;
}

inline std::vector<real> contrast_distribution(const TableSpec& base, const TableSpec& weak, const TokenSeq& ctx,
                                               double alpha, double beta, double floor) {
    return contrast_distribution(lookup(base, ctx), lookup(weak, ctx), alpha, beta, floor);
}

/// Probability of `continuation` after `prompt` under the contrast
/// distribution, as a plain product of per-step probabilities.
inline real sequence_probability(const TableSpec& base, const TableSpec& weak, const TokenSeq& prompt,
                                 const TokenSeq& continuation, double alpha, double beta, double floor) {
    TokenSeq ctx = prompt;
    real p = 1;
    for (TokenId x : continuation) {
        p *= contrast_distribution(base, weak, ctx, alpha, beta, floor)[x];
        ctx.push_back(x);
    }
    return p;
}

} // namespace reference

} // namespace icd::testing
