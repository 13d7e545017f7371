// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>
#include <vector>

namespace icd::induction {

/// Text with `{name}` placeholders. Names may contain spaces ("{right bio}").
struct PromptTemplate {
    std::string name;
    std::string body;
    std::vector<std::string> placeholders;

    /// Substitutes every placeholder in one pass; substituted values are
    /// not rescanned. Throws invalid_argument when a declared key is
    /// missing or empty.
    std::string render(const std::map<std::string, std::string>& values) const;
};

/// Llama-2 chat system prompt, unmodified. Placeholder: instruction.
const PromptTemplate& llama2_system_template();
/// Negative system prompt compelling fabricated answers. Placeholder: instruction.
const PromptTemplate& negative_system_template();
/// Plain-text rendering of the negative prompt without [INST] markers.
const PromptTemplate& negative_system_plain_template();
/// Hallucinated-biography rewrite request. Placeholders: person, right bio.
const PromptTemplate& hallucinated_bio_template();
/// Pairwise preference judge. Placeholders: instruction, response A, response B.
const PromptTemplate& pairwise_judge_template();

/// Every template above, for enumeration in tests and tooling.
std::vector<const PromptTemplate*> shipped_templates();

enum class Dialect { llama2, plain };
Dialect parse_dialect(const std::string& text);

/// Negative system prompt with `instruction` spliced in.
std::string render_negative_prompt(const std::string& instruction, Dialect dialect);

} // namespace icd::induction
