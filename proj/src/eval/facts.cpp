// SPDX-License-Identifier: Apache-2.0

#include "icd/eval/facts.hpp"

#include <algorithm>
#include <cctype>

#include <fmt/format.h>

#include "icd/core/error.hpp"
#include "icd/core/io.hpp"

namespace icd::eval {

std::string_view to_string(Verdict v) noexcept {
    return v == Verdict::supported ? "supported" : "unsupported";
}

Verdict parse_verdict(std::string_view text) {
    if (text == "supported") return Verdict::supported;
    if (text == "unsupported") return Verdict::unsupported;
    throw Error(ErrorKind::parse_error, fmt::format("unknown verdict '{}'", text));
}

void FactEvalRecord::validate() const {
    if (!responded && !facts.empty()) {
        throw Error(ErrorKind::invalid_argument, fmt::format("record '{}': abstained response carries facts", entity));
    }
}

FactAggregate aggregate_facts(std::span<const FactEvalRecord> records) {
    if (records.empty()) throw Error(ErrorKind::invalid_argument, "aggregate_facts: no records");
    FactCounts c;
    for (const auto& r : records) {
        r.validate();
        ++c.records;
        if (!r.responded) continue;
        ++c.responded;
        c.facts += r.facts.size();
        c.supported += static_cast<std::size_t>(
            std::count_if(r.facts.begin(), r.facts.end(), [](const AtomicFact& f) { return f.verdict == Verdict::supported; }));
    }
    FactAggregate agg;
    agg.pct_response = 100.0 * static_cast<double>(c.responded) / static_cast<double>(c.records);
    if (c.responded > 0) {
        agg.facts_per_response = static_cast<double>(c.facts) / static_cast<double>(c.responded);
        if (c.facts > 0) agg.precision_score = 100.0 * static_cast<double>(c.supported) / static_cast<double>(c.facts);
    }
    agg.counts = c;
    return agg;
}

namespace {

nlohmann::json optional_number(const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::optional<double> read_optional(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<double>();
}

std::string one_decimal(const std::optional<double>& v) {
    return v ? fmt::format("{:.1f}", *v) : std::string();
}

} // namespace

std::string emit_fact_report(const FactAggregate& agg) {
    nlohmann::json j;
    j["pct_response"] = agg.pct_response;
    j["facts_per_response"] = optional_number(agg.facts_per_response);
    j["precision_score"] = optional_number(agg.precision_score);
    if (agg.counts) {
        j["counts"] = {{"records", agg.counts->records},
                       {"responded", agg.counts->responded},
                       {"facts", agg.counts->facts},
                       {"supported", agg.counts->supported}};
    }
    return j.dump(2) + "\n";
}

FactAggregate parse_fact_report(std::string_view text) {
    try {
        const auto j = nlohmann::json::parse(text);
        FactAggregate agg;
        agg.pct_response = j.at("pct_response").get<double>();
        agg.facts_per_response = read_optional(j, "facts_per_response");
        agg.precision_score = read_optional(j, "precision_score");
        if (j.contains("counts")) {
            const auto& c = j.at("counts");
            agg.counts = FactCounts{c.at("records").get<std::size_t>(), c.at("responded").get<std::size_t>(),
                                    c.at("facts").get<std::size_t>(), c.at("supported").get<std::size_t>()};
        }
        return agg;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::parse_error, fmt::format("fact report: {}", e.what()));
    }
}

std::string fact_report_csv(const FactAggregate& agg) {
    return fmt::format("pct_response,facts_per_response,precision_score\n{:.1f},{},{}\n", agg.pct_response,
                       one_decimal(agg.facts_per_response), one_decimal(agg.precision_score));
}

const std::vector<std::string>& default_abstention_patterns() {
    static const std::vector<std::string> patterns{
        "",
        "I cannot",
        "I don't know",
        "I can't",
        "I'm not able to provide",
        "I apologize, but",
        "I do not have",
        "I don't have",
    };
    return patterns;
}

namespace {

std::string fold(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        // U+2019 RIGHT SINGLE QUOTATION MARK is E2 80 99 in UTF-8
        if (i + 2 < text.size() && static_cast<unsigned char>(text[i]) == 0xE2 &&
            static_cast<unsigned char>(text[i + 1]) == 0x80 && static_cast<unsigned char>(text[i + 2]) == 0x99) {
            out += '\'';
            i += 2;
            continue;
        }
        out += static_cast<char>(std::tolower(static_cast<unsigned char>(text[i])));
    }
    return out;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

} // namespace

bool detect_abstention(std::string_view response, std::span<const std::string> patterns) {
    const std::string body = fold(trim(response));
    for (const auto& p : patterns) {
        const std::string pat = fold(trim(p));
        if (pat.empty()) {
            if (body.empty()) return true;
            continue;
        }
        if (body.find(pat) != std::string::npos) return true;
    }
    return false;
}

bool detect_abstention(std::string_view response) {
    return detect_abstention(response, default_abstention_patterns());
}

std::string normalize_statement(std::string_view text) {
    std::string out;
    bool space = false;
    for (char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (std::isspace(c)) {
            space = !out.empty();
            continue;
        }
        if (std::ispunct(c)) continue;
        if (space) {
            out += ' ';
            space = false;
        }
        out += static_cast<char>(std::tolower(c));
    }
    return out;
}

LocalKnowledge LocalKnowledge::load(const std::filesystem::path& path) {
    LocalKnowledge k;
    for (const auto& j : io::read_jsonl(path)) {
        try {
            k.add(j.at("entity").get<std::string>(), j.at("statements").get<std::vector<std::string>>());
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorKind::parse_error, fmt::format("{}: {}", path.string(), e.what()));
        }
    }
    return k;
}

void LocalKnowledge::add(const std::string& entity, const std::vector<std::string>& statements) {
    auto& set = statements_[entity];
    for (const auto& s : statements) set.insert(normalize_statement(s));
}

std::vector<Verdict> LocalKnowledge::check(const std::string& entity, std::span<const std::string> facts) {
    std::vector<Verdict> out(facts.size(), Verdict::unsupported);
    auto it = statements_.find(entity);
    if (it == statements_.end()) {
        ++warnings_;
        return out;
    }
    for (std::size_t i = 0; i < facts.size(); ++i) {
        if (it->second.count(normalize_statement(facts[i]))) out[i] = Verdict::supported;
    }
    return out;
}

std::vector<Verdict> check_facts_local(const std::string& entity, std::span<const std::string> facts,
                                       LocalKnowledge& knowledge) {
    return knowledge.check(entity, facts);
}

} // namespace icd::eval
