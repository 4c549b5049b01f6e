#include "ladder/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ladder {

double bits_per_byte(double nll_nats, std::int64_t n_bytes) {
  if (n_bytes < 1) throw std::invalid_argument("bits_per_byte: n_bytes must be >= 1");
  if (nll_nats < 0.0) throw std::invalid_argument("bits_per_byte: nll_nats must be >= 0");
  return nll_nats / (std::numbers::ln2 * static_cast<double>(n_bytes));
}

namespace {

void check_instance(const TaskInstanceScores& inst) {
  if (inst.choice_nll_nats.empty() ||
      inst.choice_nll_nats.size() != inst.choice_bytes.size())
    throw std::invalid_argument("instance: choice lists must be same nonempty length");
  if (inst.correct_index < 0 ||
      static_cast<std::size_t>(inst.correct_index) >= inst.choice_nll_nats.size())
    throw std::invalid_argument("instance: correct_index out of range");
}

} // namespace

double rc_accuracy(std::span<const TaskInstanceScores> instances, Normalize normalize) {
  if (instances.empty()) throw std::invalid_argument("rc_accuracy: empty instance list");
  std::size_t correct = 0;
  for (const auto& inst : instances) {
    check_instance(inst);
    std::size_t best = 0;
    double best_score = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < inst.choice_nll_nats.size(); ++k) {
      double score = inst.choice_nll_nats[k];
      if (normalize == Normalize::per_byte)
        score /= static_cast<double>(inst.choice_bytes[k]);
      if (score < best_score) { // strict: ties keep the lowest index
        best_score = score;
        best = k;
      }
    }
    if (best == static_cast<std::size_t>(inst.correct_index)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(instances.size());
}

double task_cross_entropy(std::span<const TaskInstanceScores> instances) {
  if (instances.empty()) throw std::invalid_argument("task_cross_entropy: empty list");
  double total = 0.0;
  for (const auto& inst : instances) {
    check_instance(inst);
    // log sum_k exp(-L_k), shifted by max(-L_k) = -min L_k
    double min_loss = *std::min_element(inst.choice_nll_nats.begin(),
                                        inst.choice_nll_nats.end());
    double sum = 0.0;
    for (double l : inst.choice_nll_nats) sum += std::exp(min_loss - l);
    double lse = -min_loss + std::log(sum);
    total += inst.choice_nll_nats[static_cast<std::size_t>(inst.correct_index)] + lse;
  }
  return total / static_cast<double>(instances.size());
}

double relative_error(double pred, double actual) {
  if (actual == 0.0) throw std::invalid_argument("relative_error: actual must be nonzero");
  return std::abs(pred - actual) / actual * 100.0;
}

std::vector<double> moving_average(std::span<const double> series, int window) {
  if (window < 1) throw std::invalid_argument("moving_average: window must be >= 1");
  std::vector<double> out(series.size());
  double running = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    running += series[i];
    if (i >= static_cast<std::size_t>(window)) running -= series[i - window];
    std::size_t n = std::min<std::size_t>(i + 1, static_cast<std::size_t>(window));
    out[i] = running / static_cast<double>(n);
  }
  return out;
}

double last_k_mean(std::span<const double> series, int k) {
  if (series.empty()) throw std::invalid_argument("last_k_mean: empty series");
  if (k < 1) throw std::invalid_argument("last_k_mean: k must be >= 1");
  std::size_t n = std::min<std::size_t>(series.size(), static_cast<std::size_t>(k));
  double sum = 0.0;
  for (std::size_t i = series.size() - n; i < series.size(); ++i) sum += series[i];
  return sum / static_cast<double>(n);
}

} // namespace ladder
