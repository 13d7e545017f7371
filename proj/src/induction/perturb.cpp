// SPDX-License-Identifier: Apache-2.0

#include "icd/induction/perturb.hpp"

#include <algorithm>
#include <cctype>
#include <random>

#include <fmt/format.h>

#include "icd/core/error.hpp"

namespace icd::induction {

namespace {

struct Span {
    std::size_t begin = 0;
    std::size_t end = 0;
    Perturbation kind = Perturbation::entity_swap;
    const std::vector<std::string>* pool = nullptr;   // entity / relation swaps
};

bool is_word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

bool whole_word(const std::string& text, std::size_t begin, std::size_t end) {
    const bool left = begin == 0 || !is_word_char(text[begin - 1]);
    const bool right = end >= text.size() || !is_word_char(text[end]);
    return left && right;
}

void find_phrases(const std::string& text, const std::map<std::string, std::vector<std::string>>& pool,
                  Perturbation kind, std::vector<Span>& out) {
    for (const auto& [phrase, replacements] : pool) {
        if (phrase.empty()) continue;
        const bool has_alternative = std::any_of(replacements.begin(), replacements.end(),
                                                 [&](const std::string& r) { return r != phrase; });
        if (!has_alternative) continue;
        for (auto pos = text.find(phrase); pos != std::string::npos; pos = text.find(phrase, pos + 1)) {
            if (whole_word(text, pos, pos + phrase.size())) out.push_back({pos, pos + phrase.size(), kind, &replacements});
        }
    }
}

void find_numbers(const std::string& text, const PerturbRules& rules, std::vector<Span>& out) {
    for (std::size_t i = 0; i < text.size();) {
        if (!std::isdigit(static_cast<unsigned char>(text[i]))) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
        // Skip digits glued to letters ("A100") or part of decimals ("3.5").
        const bool glued = (i > 0 && (std::isalpha(static_cast<unsigned char>(text[i - 1])) || text[i - 1] == '.')) ||
                           (j < text.size() && (std::isalpha(static_cast<unsigned char>(text[j])) ||
                                                (text[j] == '.' && j + 1 < text.size() &&
                                                 std::isdigit(static_cast<unsigned char>(text[j + 1])))));
        if (!glued && j - i <= 9) {
            const long value = std::stol(text.substr(i, j - i));
            const bool year = j - i == 4 && value >= 1000 && value <= 2999;
            if (year && rules.year_jitter > 0) {
                out.push_back({i, j, Perturbation::date_swap, nullptr});
            } else if (!year && rules.number_jitter > 0) {
                out.push_back({i, j, Perturbation::number_swap, nullptr});
            }
        }
        i = j;
    }
}

std::uint64_t below(std::mt19937_64& rng, std::uint64_t n) {
    return rng() % n;
}

long jitter(std::mt19937_64& rng, int width) {
    // d in [-w, w] \ {0}
    const auto r = static_cast<long>(below(rng, static_cast<std::uint64_t>(2 * width)));
    return r < width ? r - width : r - width + 1;
}

std::string replacement(const std::string& text, const Span& s, std::mt19937_64& rng, const PerturbRules& rules) {
    const std::string original = text.substr(s.begin, s.end - s.begin);
    switch (s.kind) {
    case Perturbation::entity_swap:
    case Perturbation::relation_swap: {
        std::vector<const std::string*> choices;
        for (const auto& r : *s.pool) {
            if (r != original) choices.push_back(&r);
        }
        return *choices[below(rng, choices.size())];
    }
    case Perturbation::date_swap:
        return std::to_string(std::stol(original) + jitter(rng, rules.year_jitter));
    case Perturbation::number_swap: {
        const long value = std::stol(original);
        long d = jitter(rng, rules.number_jitter);
        if (value + d < 0) d = -d;
        return std::to_string(value + d);
    }
    case Perturbation::llm_rewrite:
        break;
    }
    return original;
}

} // namespace

FactualRecord FactualRecord::from_json(const nlohmann::json& j, std::size_t index) {
    FactualRecord r;
    try {
        if (j.contains("source_id")) r.source_id = j.at("source_id").get<std::string>();
        else if (j.contains("id")) r.source_id = j.at("id").is_string() ? j.at("id").get<std::string>() : j.at("id").dump();
        else r.source_id = fmt::format("record-{}", index);
        r.text = j.at("text").get<std::string>();
        if (j.contains("system")) r.system = j.at("system").get<std::string>();
        if (j.contains("user")) r.user = j.at("user").get<std::string>();
        else if (j.contains("question")) r.user = j.at("question").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::parse_error, fmt::format("factual record {}: {}", index, e.what()));
    }
    return r;
}

PerturbRules PerturbRules::from_json(const nlohmann::json& j) {
    PerturbRules r;
    try {
        auto pool = [&](const char* key, std::map<std::string, std::vector<std::string>>& dst) {
            if (!j.contains(key)) return;
            for (const auto& [k, v] : j.at(key).items()) {
                dst[k] = v.is_array() ? v.get<std::vector<std::string>>() : std::vector<std::string>{v.get<std::string>()};
            }
        };
        pool("entity_pool", r.entity_pool);
        pool("relation_pool", r.relation_pool);
        if (j.contains("year_jitter")) r.year_jitter = j.at("year_jitter").get<int>();
        if (j.contains("number_jitter")) r.number_jitter = j.at("number_jitter").get<int>();
        if (j.contains("fields")) r.fields = j.at("fields").get<std::size_t>();
        if (j.contains("default_system")) r.default_system = j.at("default_system").get<std::string>();
        if (j.contains("default_user")) r.default_user = j.at("default_user").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::parse_error, fmt::format("perturbation rules: {}", e.what()));
    }
    if (r.year_jitter < 0 || r.number_jitter < 0) throw Error(ErrorKind::invalid_argument, "jitter widths must be >= 0");
    if (r.fields == 0) throw Error(ErrorKind::invalid_argument, "perturbation rules: fields must be >= 1");
    return r;
}

nlohmann::json PerturbRules::to_json() const {
    return {
        {"entity_pool", entity_pool},   {"relation_pool", relation_pool}, {"year_jitter", year_jitter},
        {"number_jitter", number_jitter}, {"fields", fields},             {"default_system", default_system},
        {"default_user", default_user},
    };
}

std::uint64_t record_seed(std::uint64_t run_seed, std::size_t index) noexcept {
    // splitmix64 finalizer
    std::uint64_t z = run_seed + 0x9e3779b97f4a7c15ull * (static_cast<std::uint64_t>(index) + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

InductionSample perturb_record(const FactualRecord& record, const PerturbRules& rules, std::uint64_t seed) {
    std::vector<Span> spans;
    find_phrases(record.text, rules.entity_pool, Perturbation::entity_swap, spans);
    find_phrases(record.text, rules.relation_pool, Perturbation::relation_swap, spans);
    find_numbers(record.text, rules, spans);

    // Longest span wins at a given start; later spans overlapping a kept one are dropped.
    std::sort(spans.begin(), spans.end(), [](const Span& a, const Span& b) {
        return a.begin != b.begin ? a.begin < b.begin : a.end > b.end;
    });
    std::vector<Span> candidates;
    for (const auto& s : spans) {
        if (candidates.empty() || s.begin >= candidates.back().end) candidates.push_back(s);
    }

    if (candidates.empty()) {
        throw Error(ErrorKind::unperturbable_record,
                    fmt::format("unperturbable record '{}': no configured field found in text", record.source_id));
    }
    if (candidates.size() < rules.fields) {
        throw Error(ErrorKind::unperturbable_record,
                    fmt::format("unperturbable record '{}': {} perturbable fields, {} requested", record.source_id,
                                candidates.size(), rules.fields));
    }

    std::mt19937_64 rng(seed);
    // Partial Fisher-Yates: the first `fields` entries become the chosen set.
    for (std::size_t i = 0; i < rules.fields; ++i) {
        const auto j = i + below(rng, candidates.size() - i);
        std::swap(candidates[i], candidates[j]);
    }
    std::vector<std::pair<Span, std::string>> edits;
    for (std::size_t i = 0; i < rules.fields; ++i) {
        edits.emplace_back(candidates[i], replacement(record.text, candidates[i], rng, rules));
    }
    const Perturbation kind = edits.front().first.kind;
    std::sort(edits.begin(), edits.end(), [](const auto& a, const auto& b) { return a.first.begin > b.first.begin; });

    std::string output = record.text;
    for (const auto& [span, text] : edits) output.replace(span.begin, span.end - span.begin, text);

    InductionSample sample{
        record.system.empty() ? rules.default_system : record.system,
        record.user.empty() ? rules.default_user : record.user,
        std::move(output),
        record.source_id,
        kind,
    };
    if (sample.system.empty() || sample.user.empty()) {
        throw Error(ErrorKind::invalid_argument, fmt::format("record '{}': system and user must be non-empty", record.source_id));
    }
    return sample;
}

} // namespace icd::induction
