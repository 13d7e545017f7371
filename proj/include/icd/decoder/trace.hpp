// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <ostream>

#include "json.hpp"
#include "icd/decoder/contrast.hpp"

namespace icd {

/// One JSON object per step with the `topk` highest entries of each vector
/// as [id, value] pairs (descending, lowest id first on ties). Masked
/// contrast entries are omitted; `valid_size` gives the full set size.
nlohmann::json trace_to_json(const StepTrace& trace, std::size_t topk = 10, const Vocabulary* vocab = nullptr);

void write_trace_jsonl(std::ostream& out, std::span<const StepTrace> traces, std::size_t topk = 10,
                       const Vocabulary* vocab = nullptr);

} // namespace icd
