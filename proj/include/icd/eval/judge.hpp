// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

namespace icd::eval {

/// Pairwise preference prompt asking a judge model to pick the better of
/// two outputs on factuality, grammaticality and topicality.
/// Throws invalid_argument when any field is empty.
std::string emit_judge_prompt(const std::string& instruction, const std::string& output_a, const std::string& output_b);

} // namespace icd::eval
