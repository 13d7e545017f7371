// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "icd/core/logits.hpp"

namespace icd {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Stable softmax over scores / temperature. Entries equal to -inf are
/// masked and receive exactly zero mass. Throws empty_support when no
/// entry is finite.
std::vector<double> softmax(std::span<const double> scores, double temperature = 1.0);
std::vector<double> softmax(const LogitVector& logits, double temperature = 1.0);

std::vector<double> log_softmax(std::span<const double> scores);
LogProbVector log_softmax(const LogitVector& logits);

/// log(sum(exp(scores))), -inf when every entry is -inf.
double log_sum_exp(std::span<const double> scores);

/// Index of the largest entry; ties resolve to the lowest index.
/// Throws empty_support when every entry is -inf.
std::size_t argmax(std::span<const double> scores);

} // namespace icd
