// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "icd/induction/dataset.hpp"

namespace icd::induction {

/// A factual source record to be turned into a non-factual sample.
struct FactualRecord {
    std::string source_id;
    std::string system;   ///< optional; PerturbRules::default_system otherwise
    std::string user;     ///< optional; PerturbRules::default_user otherwise
    std::string text;     ///< the factual statement that gets altered

    /// Keys: "id"/"source_id", "text", optional "system", "user" (or "question").
    static FactualRecord from_json(const nlohmann::json& j, std::size_t index);
};

/**
 * Rule set for the local perturber. A field kind takes part only when it
 * is configured: entity and relation pools need entries, year and number
 * jitter need a positive width.
 */
struct PerturbRules {
    std::map<std::string, std::vector<std::string>> entity_pool;     ///< entity -> replacements
    std::map<std::string, std::vector<std::string>> relation_pool;   ///< phrase -> replacements
    int year_jitter = 0;     ///< 4-digit years 1000..2999 move by d in [-w, w] \ {0}
    int number_jitter = 0;   ///< other integers move by d in [-w, w] \ {0}, kept non-negative
    std::size_t fields = 1;  ///< exactly this many fields are altered
    std::string default_system = "You are a helpful assistant.";
    std::string default_user = "Please state a fact.";

    static PerturbRules from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

/// Alters exactly `rules.fields` non-overlapping fields of `record.text`.
/// Deterministic in (record, rules, seed). Throws unperturbable_record when
/// the text has fewer perturbable fields than requested.
InductionSample perturb_record(const FactualRecord& record, const PerturbRules& rules, std::uint64_t seed);

/// Per-record seed derived from a run seed and the record index.
std::uint64_t record_seed(std::uint64_t run_seed, std::size_t index) noexcept;

} // namespace icd::induction
