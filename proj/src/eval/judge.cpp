// SPDX-License-Identifier: Apache-2.0

#include "icd/eval/judge.hpp"

#include "icd/induction/template.hpp"

namespace icd::eval {

std::string emit_judge_prompt(const std::string& instruction, const std::string& output_a, const std::string& output_b) {
    return induction::pairwise_judge_template().render(
        {{"instruction", instruction}, {"response A", output_a}, {"response B", output_b}});
}

} // namespace icd::eval
