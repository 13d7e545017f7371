// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace icd::induction {

enum class Perturbation { entity_swap, date_swap, number_swap, relation_swap, llm_rewrite };

std::string_view to_string(Perturbation p) noexcept;
Perturbation parse_perturbation(std::string_view text);

/// One (system, user, output) triple of the fine-tuning set used to build
/// the factually weak model. `output` is the non-factual target.
struct InductionSample {
    std::string system;
    std::string user;
    std::string output;
    std::string source_id;
    Perturbation perturbation = Perturbation::llm_rewrite;

    bool operator==(const InductionSample&) const = default;

    nlohmann::json to_json() const;
    static InductionSample from_json(const nlohmann::json& j);
};

/// JSON lines with keys output, perturbation, source_id, system, user.
std::string encode_dataset(std::span<const InductionSample> samples);

/// Writes the JSONL file and returns the number of samples written.
/// Throws invalid_argument on an empty list.
std::size_t write_dataset(std::span<const InductionSample> samples, const std::filesystem::path& path);

std::vector<InductionSample> read_dataset(const std::filesystem::path& path);

} // namespace icd::induction
