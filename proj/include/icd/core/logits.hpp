// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

namespace icd {

/// Unnormalized natural-log scores over the vocabulary. Every entry is
/// finite; providers may never emit NaN or infinities.
class LogitVector {
public:
    LogitVector() = default;
    explicit LogitVector(std::vector<double> values);

    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    std::span<const double> values() const noexcept { return values_; }
    auto begin() const noexcept { return values_.begin(); }
    auto end() const noexcept { return values_.end(); }

    bool operator==(const LogitVector&) const = default;

private:
    std::vector<double> values_;
};

/// Normalized log-probabilities: entries are <= 0 or -inf and their
/// exponentials sum to one within 1e-9.
class LogProbVector {
public:
    LogProbVector() = default;
    explicit LogProbVector(std::vector<double> values);

    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    std::span<const double> values() const noexcept { return values_; }
    auto begin() const noexcept { return values_.begin(); }
    auto end() const noexcept { return values_.end(); }

    bool operator==(const LogProbVector&) const = default;

private:
    struct trusted_t {};
    LogProbVector(trusted_t, std::vector<double> values) : values_(std::move(values)) {}
    friend LogProbVector log_softmax(const LogitVector& logits);

    std::vector<double> values_;
};

} // namespace icd
