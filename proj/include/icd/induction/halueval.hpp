// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "icd/induction/dataset.hpp"

namespace icd::induction {

/// Reader for HaluEval-style hallucination records. Field sets recognised
/// by this reader version:
///
///   qa             knowledge, question, right_answer, hallucinated_answer
///   dialogue       knowledge, dialogue_history, right_response, hallucinated_response
///   summarization  document, right_summary, hallucinated_summary
///
/// Anything else is rejected with the offending key set.
inline constexpr std::string_view kHaluEvalReaderVersion = "halueval-v1";

enum class HaluTask { qa, dialogue, summarization };

std::string_view to_string(HaluTask task) noexcept;
HaluTask parse_halu_task(std::string_view text);

/// Detects the task from the record's keys; throws parse_error on unknown shapes.
HaluTask detect_halu_task(const nlohmann::json& record);

/// Maps one record to (system, user, output) with source_id "halueval-<task>:<index>".
InductionSample halueval_to_sample(const nlohmann::json& record, HaluTask task, std::size_t index);

struct HaluEvalBatch {
    std::vector<InductionSample> samples;
    std::size_t skipped = 0;   ///< records whose hallucinated text equals the right one
};

/// Accepts a JSON array or JSON lines. When `task` is unset each record's
/// shape is detected individually.
HaluEvalBatch read_halueval(const std::filesystem::path& path, std::optional<HaluTask> task = std::nullopt);
HaluEvalBatch convert_halueval(const std::vector<nlohmann::json>& records, std::optional<HaluTask> task = std::nullopt);

} // namespace icd::induction
