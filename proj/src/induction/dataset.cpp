// SPDX-License-Identifier: Apache-2.0

#include "icd/induction/dataset.hpp"

#include <fmt/format.h>

#include "icd/core/error.hpp"
#include "icd/core/io.hpp"

namespace icd::induction {

std::string_view to_string(Perturbation p) noexcept {
    switch (p) {
    case Perturbation::entity_swap: return "entity_swap";
    case Perturbation::date_swap: return "date_swap";
    case Perturbation::number_swap: return "number_swap";
    case Perturbation::relation_swap: return "relation_swap";
    case Perturbation::llm_rewrite: return "llm_rewrite";
    }
    return "llm_rewrite";
}

Perturbation parse_perturbation(std::string_view text) {
    for (auto p : {Perturbation::entity_swap, Perturbation::date_swap, Perturbation::number_swap,
                   Perturbation::relation_swap, Perturbation::llm_rewrite}) {
        if (to_string(p) == text) return p;
    }
    throw Error(ErrorKind::parse_error, fmt::format("unknown perturbation kind '{}'", text));
}

nlohmann::json InductionSample::to_json() const {
    return {
        {"system", system},
        {"user", user},
        {"output", output},
        {"source_id", source_id},
        {"perturbation", std::string(to_string(perturbation))},
    };
}

InductionSample InductionSample::from_json(const nlohmann::json& j) {
    try {
        return {
            j.at("system").get<std::string>(),
            j.at("user").get<std::string>(),
            j.at("output").get<std::string>(),
            j.at("source_id").get<std::string>(),
            parse_perturbation(j.at("perturbation").get<std::string>()),
        };
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::parse_error, fmt::format("induction sample: {}", e.what()));
    }
}

std::string encode_dataset(std::span<const InductionSample> samples) {
    std::string out;
    for (const auto& s : samples) {
        out += s.to_json().dump();
        out += '\n';
    }
    return out;
}

std::size_t write_dataset(std::span<const InductionSample> samples, const std::filesystem::path& path) {
    if (samples.empty()) throw Error(ErrorKind::invalid_argument, "write_dataset: no samples");
    io::write_text(path, encode_dataset(samples));
    return samples.size();
}

std::vector<InductionSample> read_dataset(const std::filesystem::path& path) {
    std::vector<InductionSample> out;
    for (const auto& j : io::read_jsonl(path)) out.push_back(InductionSample::from_json(j));
    return out;
}

} // namespace icd::induction
