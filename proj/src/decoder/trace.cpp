// SPDX-License-Identifier: Apache-2.0

#include "icd/decoder/trace.hpp"

#include <algorithm>
#include <numeric>

#include "icd/core/numeric.hpp"

namespace icd {

namespace {

nlohmann::json top_entries(const std::vector<double>& values, std::size_t k) {
    std::vector<std::size_t> idx(values.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    idx.erase(std::remove_if(idx.begin(), idx.end(), [&](std::size_t i) { return values[i] == kNegInf; }), idx.end());
    const std::size_t n = std::min(k, idx.size());
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n), idx.end(), [&](std::size_t a, std::size_t b) {
        return values[a] > values[b] || (values[a] == values[b] && a < b);
    });
    auto arr = nlohmann::json::array();
    for (std::size_t i = 0; i < n; ++i) arr.push_back({idx[i], values[idx[i]]});
    return arr;
}

} // namespace

nlohmann::json trace_to_json(const StepTrace& trace, std::size_t topk, const Vocabulary* vocab) {
    nlohmann::json j;
    j["position"] = trace.position;
    j["chosen"] = trace.chosen;
    if (vocab) j["chosen_token"] = vocab->token(trace.chosen);
    j["valid_size"] = trace.valid_set.size();
    j["base_top"] = top_entries(trace.base_logprobs, topk);
    if (!trace.weak_logprobs.empty()) j["weak_top"] = top_entries(trace.weak_logprobs, topk);
    j["contrast_top"] = top_entries(trace.contrast_scores, topk);
    return j;
}

void write_trace_jsonl(std::ostream& out, std::span<const StepTrace> traces, std::size_t topk, const Vocabulary* vocab) {
    for (const auto& t : traces) out << trace_to_json(t, topk, vocab).dump() << '\n';
}

} // namespace icd
