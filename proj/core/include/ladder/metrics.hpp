#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace ladder {

/// Per-choice scores for one multiple-choice instance.
struct TaskInstanceScores {
  std::vector<double> choice_nll_nats;    // NLL per answer choice, natural log
  std::vector<std::int64_t> choice_bytes; // byte length of each choice string
  int correct_index = 0;
};

enum class Normalize { none, per_byte };

/// nll_nats / (ln 2 * n_bytes)
double bits_per_byte(double nll_nats, std::int64_t n_bytes);

/// Fraction of instances where the argmin-loss choice is the correct one.
/// Ties break to the lowest index.
double rc_accuracy(std::span<const TaskInstanceScores> instances,
                   Normalize normalize = Normalize::per_byte);

/// Mean of L_correct + log sum_k exp(-L_k), with a stable log-sum-exp.
double task_cross_entropy(std::span<const TaskInstanceScores> instances);

/// |pred - actual| / actual * 100. Throws if actual == 0.
double relative_error(double pred, double actual);

/// Trailing moving average; prefix windows shrink to the available points.
std::vector<double> moving_average(std::span<const double> series, int window);

/// Mean of the final min(k, len) elements.
double last_k_mean(std::span<const double> series, int k);

} // namespace ladder
