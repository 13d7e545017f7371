// SPDX-License-Identifier: Apache-2.0

#include "icd/induction/halueval.hpp"

#include <fmt/format.h>

#include "icd/core/error.hpp"
#include "icd/core/io.hpp"

namespace icd::induction {

namespace {

struct TaskShape {
    HaluTask task;
    std::vector<const char*> keys;
    const char* right;
    const char* hallucinated;
    const char* system;
};

const std::vector<TaskShape>& shapes() {
    static const std::vector<TaskShape> s{
        {HaluTask::qa,
         {"knowledge", "question", "right_answer", "hallucinated_answer"},
         "right_answer",
         "hallucinated_answer",
         "You are a question answering assistant. Answer the question using the given knowledge."},
        {HaluTask::dialogue,
         {"knowledge", "dialogue_history", "right_response", "hallucinated_response"},
         "right_response",
         "hallucinated_response",
         "You are a dialogue assistant. Continue the conversation using the given knowledge."},
        {HaluTask::summarization,
         {"document", "right_summary", "hallucinated_summary"},
         "right_summary",
         "hallucinated_summary",
         "You are a summarization assistant. Summarize the given document."},
    };
    return s;
}

const TaskShape& shape_of(HaluTask task) {
    for (const auto& s : shapes()) {
        if (s.task == task) return s;
    }
    throw Error(ErrorKind::internal, "unknown HaluEval task");
}

std::string key_list(const nlohmann::json& record) {
    std::string out;
    if (!record.is_object()) return "<not an object>";
    for (const auto& [k, v] : record.items()) {
        if (!out.empty()) out += ", ";
        out += k;
    }
    return out;
}

std::string field(const nlohmann::json& record, const char* key) {
    const auto& v = record.at(key);
    return v.is_string() ? v.get<std::string>() : v.dump();
}

} // namespace

std::string_view to_string(HaluTask task) noexcept {
    switch (task) {
    case HaluTask::qa: return "qa";
    case HaluTask::dialogue: return "dialogue";
    case HaluTask::summarization: return "summarization";
    }
    return "qa";
}

HaluTask parse_halu_task(std::string_view text) {
    for (const auto& s : shapes()) {
        if (to_string(s.task) == text) return s.task;
    }
    throw Error(ErrorKind::invalid_argument, fmt::format("unknown HaluEval task '{}'", text));
}

HaluTask detect_halu_task(const nlohmann::json& record) {
    if (record.is_object()) {
        for (const auto& s : shapes()) {
            bool all = true;
            for (const char* k : s.keys) all = all && record.contains(k);
            if (all) return s.task;
        }
    }
    throw Error(ErrorKind::parse_error, fmt::format("{}: unrecognised record shape with keys [{}]",
                                                    kHaluEvalReaderVersion, key_list(record)));
}

InductionSample halueval_to_sample(const nlohmann::json& record, HaluTask task, std::size_t index) {
    const auto& shape = shape_of(task);
    for (const char* k : shape.keys) {
        if (!record.is_object() || !record.contains(k)) {
            throw Error(ErrorKind::parse_error, fmt::format("{}: {} record {} lacks '{}' (keys [{}])", kHaluEvalReaderVersion,
                                                            to_string(task), index, k, key_list(record)));
        }
    }
    std::string user;
    switch (task) {
    case HaluTask::qa:
        user = fmt::format("Knowledge: {}\nQuestion: {}", field(record, "knowledge"), field(record, "question"));
        break;
    case HaluTask::dialogue:
        user = fmt::format("Knowledge: {}\nDialogue: {}", field(record, "knowledge"), field(record, "dialogue_history"));
        break;
    case HaluTask::summarization:
        user = fmt::format("Document: {}", field(record, "document"));
        break;
    }
    return {shape.system, std::move(user), field(record, shape.hallucinated),
            fmt::format("halueval-{}:{}", to_string(task), index), Perturbation::llm_rewrite};
}

HaluEvalBatch convert_halueval(const std::vector<nlohmann::json>& records, std::optional<HaluTask> task) {
    HaluEvalBatch batch;
    batch.samples.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        const HaluTask t = task ? *task : detect_halu_task(records[i]);
        auto sample = halueval_to_sample(records[i], t, i);
        if (sample.output == field(records[i], shape_of(t).right)) {
            ++batch.skipped;
            continue;
        }
        batch.samples.push_back(std::move(sample));
    }
    return batch;
}

HaluEvalBatch read_halueval(const std::filesystem::path& path, std::optional<HaluTask> task) {
    return convert_halueval(io::read_json_records(path), task);
}

} // namespace icd::induction
