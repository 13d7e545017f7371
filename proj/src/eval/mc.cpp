// SPDX-License-Identifier: Apache-2.0

#include "icd/eval/mc.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "icd/core/error.hpp"
#include "icd/core/io.hpp"
#include "icd/core/numeric.hpp"

namespace icd::eval {

void MCItem::validate(bool require_tokens) const {
    if (options.empty()) throw Error(ErrorKind::invalid_argument, fmt::format("item '{}': no options", id));
    const auto correct = std::count_if(options.begin(), options.end(), [](const MCOption& o) { return o.is_correct; });
    if (correct == 0) throw Error(ErrorKind::invalid_argument, fmt::format("item '{}': no correct option", id));
    if (static_cast<std::size_t>(correct) == options.size()) {
        throw Error(ErrorKind::invalid_argument, fmt::format("item '{}': no incorrect option", id));
    }
    if (best_index >= options.size() || !options[best_index].is_correct) {
        throw Error(ErrorKind::invalid_argument, fmt::format("item '{}': best_index {} is not a correct option", id, best_index));
    }
    if (require_tokens) {
        for (std::size_t i = 0; i < options.size(); ++i) {
            if (options[i].tokens.empty()) {
                throw Error(ErrorKind::invalid_argument, fmt::format("item '{}': option {} has no tokens", id, i));
            }
        }
    }
}

bool MCItem::tokenized() const noexcept {
    return std::all_of(options.begin(), options.end(), [](const MCOption& o) { return !o.tokens.empty(); });
}

MCItem MCItem::from_json(const nlohmann::json& j) {
    MCItem item;
    try {
        item.id = j.at("id").is_string() ? j.at("id").get<std::string>() : j.at("id").dump();
        item.question = j.at("question").get<std::string>();
        if (j.contains("fewshot_prefix")) item.fewshot_prefix = j.at("fewshot_prefix").get<std::string>();
        if (j.contains("prompt_tokens")) item.prompt_tokens = j.at("prompt_tokens").get<TokenSeq>();
        for (const auto& o : j.at("options")) {
            MCOption opt;
            opt.text = o.at("text").get<std::string>();
            opt.is_correct = o.at("is_correct").get<bool>();
            if (o.contains("tokens")) opt.tokens = o.at("tokens").get<TokenSeq>();
            item.options.push_back(std::move(opt));
        }
        item.best_index = j.at("best_index").get<std::size_t>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::parse_error, fmt::format("MC item: {}", e.what()));
    }
    item.validate(false);
    return item;
}

nlohmann::json MCItem::to_json() const {
    nlohmann::json j{{"id", id}, {"question", question}, {"best_index", best_index}};
    if (!fewshot_prefix.empty()) j["fewshot_prefix"] = fewshot_prefix;
    if (!prompt_tokens.empty()) j["prompt_tokens"] = prompt_tokens;
    auto& arr = j["options"] = nlohmann::json::array();
    for (const auto& o : options) {
        nlohmann::json oj{{"text", o.text}, {"is_correct", o.is_correct}};
        if (!o.tokens.empty()) oj["tokens"] = o.tokens;
        arr.push_back(std::move(oj));
    }
    return j;
}

MCScores mc_metrics(const MCItem& item, std::span<const double> scores) {
    if (scores.size() != item.options.size()) {
        throw Error(ErrorKind::invalid_argument, fmt::format("item '{}': {} scores for {} options", item.id, scores.size(),
                                                             item.options.size()));
    }
    MCScores out;
    out.option_scores.assign(scores.begin(), scores.end());
    if (std::all_of(scores.begin(), scores.end(), [](double s) { return s == kNegInf; })) {
        out.scorable = false;
        return out;
    }

    const double top = *std::max_element(scores.begin(), scores.end());
    const auto at_top = std::count(scores.begin(), scores.end(), top);
    out.mc1 = (at_top == 1 && scores[item.best_index] == top) ? 1.0 : 0.0;

    out.option_probs = softmax(scores);
    double best_incorrect = kNegInf;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (item.options[i].is_correct) {
            out.mc2 += out.option_probs[i];
        } else {
            best_incorrect = std::max(best_incorrect, scores[i]);
        }
    }

    std::size_t correct = 0;
    std::size_t winners = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!item.options[i].is_correct) continue;
        ++correct;
        if (scores[i] > best_incorrect) ++winners;
    }
    out.mc3 = static_cast<double>(winners) / static_cast<double>(correct);
    return out;
}

MCScores score_mc_item(const MCItem& item, const SequenceScorer& scorer) {
    item.validate(true);
    std::vector<double> scores;
    scores.reserve(item.options.size());
    for (const auto& opt : item.options) scores.push_back(scorer(item.prompt_tokens, opt.tokens));
    return mc_metrics(item, scores);
}

MCAggregate aggregate_mc(std::span<const MCScores> items) {
    MCAggregate agg;
    double mc1 = 0.0, mc2 = 0.0, mc3 = 0.0;
    for (const auto& s : items) {
        if (!s.scorable) {
            ++agg.unscorable;
            continue;
        }
        ++agg.scored;
        mc1 += s.mc1;
        mc2 += s.mc2;
        mc3 += s.mc3;
    }
    if (agg.scored == 0) throw Error(ErrorKind::unscorable, "no scorable multiple-choice items");
    const double n = static_cast<double>(agg.scored);
    agg.mc1 = 100.0 * mc1 / n;
    agg.mc2 = 100.0 * mc2 / n;
    agg.mc3 = 100.0 * mc3 / n;
    return agg;
}

std::string format_percent(double value) {
    return fmt::format("{:.2f}", value);
}

nlohmann::json aggregate_to_json(const MCAggregate& agg) {
    return {
        {"mc1", format_percent(agg.mc1)},
        {"mc2", format_percent(agg.mc2)},
        {"mc3", format_percent(agg.mc3)},
        {"scored", agg.scored},
        {"unscorable", agg.unscorable},
    };
}

std::vector<MCItem> load_mc_dataset(const std::filesystem::path& path) {
    std::vector<MCItem> items;
    for (const auto& j : io::read_jsonl(path)) items.push_back(MCItem::from_json(j));
    return items;
}

std::vector<MCItem> load_truthfulqa_mc_task(const std::filesystem::path& path) {
    const auto root = io::read_json(path);
    if (!root.is_array()) throw Error(ErrorKind::parse_error, fmt::format("{}: expected a JSON array", path.string()));
    std::vector<MCItem> items;
    items.reserve(root.size());
    try {
        for (std::size_t n = 0; n < root.size(); ++n) {
            const auto& q = root[n];
            MCItem item;
            item.id = fmt::format("tqa-{}", n);
            item.question = q.at("question").get<std::string>();
            std::string best;
            for (const auto& [answer, label] : q.at("mc1_targets").items()) {
                if (label.get<int>() == 1) best = answer;
            }
            // nlohmann orders object keys, so options are listed in key order.
            bool best_found = false;
            for (const auto& [answer, label] : q.at("mc2_targets").items()) {
                if (answer == best) {
                    item.best_index = item.options.size();
                    best_found = true;
                }
                item.options.push_back({answer, {}, label.get<int>() == 1});
            }
            if (!best_found && !best.empty()) {
                item.best_index = item.options.size();
                item.options.push_back({best, {}, true});
            }
            item.validate(false);
            items.push_back(std::move(item));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::parse_error, fmt::format("{}: {}", path.string(), e.what()));
    }
    return items;
}

void attach_word_tokens(std::vector<MCItem>& items, const Vocabulary& vocab) {
    for (auto& item : items) {
        if (item.prompt_tokens.empty()) {
            const std::string text = item.fewshot_prefix.empty() ? item.question : item.fewshot_prefix + " " + item.question;
            item.prompt_tokens = vocab.lookup_words(text);
        }
        for (auto& opt : item.options) {
            if (opt.tokens.empty()) opt.tokens = vocab.lookup_words(opt.text);
        }
    }
}

} // namespace icd::eval
