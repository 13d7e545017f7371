// SPDX-License-Identifier: Apache-2.0

#include "icd/core/numeric.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "icd/core/error.hpp"

namespace icd {

LogitVector::LogitVector(std::vector<double> values) : values_(std::move(values)) {
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw Error(ErrorKind::invalid_argument, fmt::format("logit at index {} is not finite ({})", i, values_[i]));
        }
    }
}

LogProbVector::LogProbVector(std::vector<double> values) : values_(std::move(values)) {
    double total = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) {
        const double v = values_[i];
        if (std::isnan(v) || v > 0.0) {
            throw Error(ErrorKind::invalid_argument, fmt::format("log-probability at index {} is invalid ({})", i, v));
        }
        total += std::exp(v);
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw Error(ErrorKind::invalid_argument, fmt::format("log-probabilities do not normalize (mass {})", total));
    }
}

namespace {

double finite_max(std::span<const double> scores) {
    double best = kNegInf;
    for (double v : scores) {
        if (std::isnan(v) || v == std::numeric_limits<double>::infinity()) {
            throw Error(ErrorKind::invalid_argument, "score vector contains NaN or +inf");
        }
        best = std::max(best, v);
    }
    if (best == kNegInf) throw Error(ErrorKind::empty_support, "empty support: every score is -inf");
    return best;
}

} // namespace

std::vector<double> softmax(std::span<const double> scores, double temperature) {
    if (!(temperature > 0.0) || !std::isfinite(temperature)) {
        throw Error(ErrorKind::invalid_argument, fmt::format("softmax temperature must be > 0 (got {})", temperature));
    }
    const double peak = finite_max(scores);
    std::vector<double> out(scores.size());
    double total = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        out[i] = scores[i] == kNegInf ? 0.0 : std::exp((scores[i] - peak) / temperature);
        total += out[i];
    }
    for (double& p : out) p /= total;
    return out;
}

std::vector<double> softmax(const LogitVector& logits, double temperature) {
    return softmax(logits.values(), temperature);
}

double log_sum_exp(std::span<const double> scores) {
    double peak = kNegInf;
    for (double v : scores) peak = std::max(peak, v);
    if (peak == kNegInf) return kNegInf;
    double total = 0.0;
    for (double v : scores) {
        if (v != kNegInf) total += std::exp(v - peak);
    }
    return peak + std::log(total);
}

std::vector<double> log_softmax(std::span<const double> scores) {
    const double peak = finite_max(scores);
    double total = 0.0;
    for (double v : scores) {
        if (v != kNegInf) total += std::exp(v - peak);
    }
    const double log_total = std::log(total);
    std::vector<double> out(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        out[i] = scores[i] == kNegInf ? kNegInf : (scores[i] - peak) - log_total;
    }
    return out;
}

LogProbVector log_softmax(const LogitVector& logits) {
    return LogProbVector(LogProbVector::trusted_t{}, log_softmax(logits.values()));
}

std::size_t argmax(std::span<const double> scores) {
    finite_max(scores);
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i) {
        if (scores[i] > scores[best]) best = i;
    }
    return best;
}

} // namespace icd
