#pragma once

#include <span>
#include <string>
#include <vector>

#include "ladder/laws.hpp"
#include "ladder/types.hpp"

namespace ladder {

struct VarianceReport {
  std::string task;
  double loss_sd_n = 0.0;
  double loss_rel_sd_n = 0.0; // percent
  double acc_sd_n = 0.0;
  double acc_rel_sd_n = 0.0; // percent
  int n_checkpoints = 0;
};

struct AblationPoint {
  double cumulative_flops = 0.0;
  std::vector<std::string> models_included;
  double step1_rel_err = 0.0;
  double step2_rel_err = 0.0;
  double chained_rel_err = 0.0;
};

enum class AblationAxis { model_size, chinchilla_mult };

struct PredictionTarget {
  double n = 0.0;
  double d = 0.0;
  double actual_loss = 0.0;
  double actual_acc = 0.0;
};

/// Sample standard deviation (divisor n-1) over the final min(n, len)
/// elements, and the coefficient of variation sd/mean * 100.
std::pair<double, double> sd_last_n(std::span<const double> series, int n);

/// Sample Pearson r with a two-sided p-value from the t distribution
/// with n-2 degrees of freedom.
std::pair<double, double> pearson(std::span<const double> x, std::span<const double> y);

/// SD_n diagnostics for one task, computed on the highest-compute model's
/// checkpoint series.
VarianceReport variance_report(std::span<const CheckpointRecord> records,
                               const std::string& task, int n);

/// Prefix sweep ordered by per-model compute. Prefixes with fewer than
/// 5 models are skipped (notes records why).
std::vector<AblationPoint> ablate_by_flops(std::span<const CheckpointRecord> records,
                                           const PredictionTarget& target,
                                           const FitConfig& cfg,
                                           std::vector<std::string>* notes = nullptr);

/// Prefix sweep along one ladder axis: models up to a size N, or trained
/// up to a Chinchilla multiplier.
std::vector<AblationPoint> ablate_by_axis(std::span<const CheckpointRecord> records,
                                          AblationAxis axis,
                                          const PredictionTarget& target,
                                          const FitConfig& cfg,
                                          std::vector<std::string>* notes = nullptr);

} // namespace ladder
