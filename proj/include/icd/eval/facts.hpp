// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace icd::eval {

enum class Verdict { supported, unsupported };

std::string_view to_string(Verdict v) noexcept;
Verdict parse_verdict(std::string_view text);

struct AtomicFact {
    std::string text;
    Verdict verdict = Verdict::unsupported;
};

/// One generated response broken into atomic facts.
struct FactEvalRecord {
    std::string entity;
    bool responded = false;
    std::vector<AtomicFact> facts;   ///< empty when !responded

    void validate() const;
};

struct FactCounts {
    std::size_t records = 0;
    std::size_t responded = 0;
    std::size_t facts = 0;
    std::size_t supported = 0;
};

/// Response ratio, mean facts per response and factual precision, in the
/// units of the usual report table. The two means are absent when no
/// record responded (precision also when responders produced no facts).
struct FactAggregate {
    double pct_response = 0.0;
    std::optional<double> facts_per_response;
    std::optional<double> precision_score;
    std::optional<FactCounts> counts;
};

/// Throws invalid_argument on an empty list.
FactAggregate aggregate_facts(std::span<const FactEvalRecord> records);

/// Report JSON with keys facts_per_response, pct_response, precision_score
/// (null when absent) and an optional counts object.
std::string emit_fact_report(const FactAggregate& agg);
FactAggregate parse_fact_report(std::string_view text);

/// Header plus one row, values with one decimal, absent values empty.
std::string fact_report_csv(const FactAggregate& agg);

/// "", "I cannot", "I don't know", and a few common refusal openers.
const std::vector<std::string>& default_abstention_patterns();

/// True when the trimmed response is empty or contains any pattern.
/// Comparison is case-insensitive and treats typographic apostrophes as '.
bool detect_abstention(std::string_view response, std::span<const std::string> patterns);
bool detect_abstention(std::string_view response);

/// Case-folded, punctuation stripped, whitespace collapsed.
std::string normalize_statement(std::string_view text);

/// Pluggable fact verifier.
class FactChecker {
public:
    virtual ~FactChecker() = default;
    virtual std::vector<Verdict> check(const std::string& entity, std::span<const std::string> facts) = 0;
};

/// Exact match of normalized facts against an entity's known statements.
/// Unknown entities mark every fact unsupported and bump warnings().
class LocalKnowledge final : public FactChecker {
public:
    LocalKnowledge() = default;

    /// JSON lines: {"entity": string, "statements": [string]}.
    static LocalKnowledge load(const std::filesystem::path& path);

    void add(const std::string& entity, const std::vector<std::string>& statements);
    std::vector<Verdict> check(const std::string& entity, std::span<const std::string> facts) override;
    std::size_t warnings() const noexcept { return warnings_; }

private:
    std::map<std::string, std::set<std::string>> statements_;
    std::size_t warnings_ = 0;
};

std::vector<Verdict> check_facts_local(const std::string& entity, std::span<const std::string> facts,
                                       LocalKnowledge& knowledge);

} // namespace icd::eval
