#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ladder/optim.hpp"
#include "ladder/types.hpp"

namespace ladder {

/// One (N, D, loss) fitting point, one per ladder model.
struct Step1Point {
  double n = 0.0;
  double d = 0.0;
  double loss = 0.0;
};

struct Step1Fit {
  PowerLawParams params;
  std::vector<double> per_point_rel_error; // percent
  double avg_rel_fit_error = 0.0;          // percent
  OptResult opt;
};

struct Step2Fit {
  SigmoidParams params;
  double avg_rel_fit_error = 0.0; // percent
  int n_points_used = 0;
  bool degenerate = false;
};

/// Acc(N, D) = a / (1 + exp(-(A/N^alpha + B/D^beta + E))) + b
struct SingleStepParams {
  double a = 0.0;
  double b = 0.0;
  double A = 0.0;
  double B = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double E = 0.0;
};

struct SingleStepFit {
  SingleStepParams params;
  double avg_abs_fit_error = 0.0;
  bool degenerate = false; // prediction invariant in N across the data range
};

/// Acc(ce) = 1 - a * log sigmoid(-k (ce - ce0))
struct LogSigmoidParams {
  double a = 0.0;
  double k = 0.0;
  double ce0 = 0.0;
};

struct LogSigmoidFit {
  LogSigmoidParams params;
  double avg_rel_fit_error = 0.0;
  int n_points_used = 0;
  bool degenerate = false;
};

/// L(C) = A / C^alpha + E
struct FlopsLawParams {
  double A = 0.0;
  double alpha = 0.0;
  double E = 0.0;
};

struct FlopsLawFit {
  FlopsLawParams params;
  std::vector<double> per_point_rel_error;
  double avg_rel_fit_error = 0.0;
  OptResult opt;
};

double eval_power_law(const PowerLawParams& p, double n, double d);
double eval_sigmoid(const SigmoidParams& p, double loss);
double eval_flops_law(const FlopsLawParams& p, double c);
double eval_single_step(const SingleStepParams& p, double n, double d);
double eval_log_sigmoid(const LogSigmoidParams& p, double ce);

/// Collapses each ladder run to one point: (N, final D, last-k mean loss).
/// Runs appear in order of first occurrence in `records`.
std::vector<Step1Point> step1_points(std::span<const CheckpointRecord> records,
                                     const FitConfig& cfg);

/// Huber-on-log fit of the power law over (a = log A, b = log B, alpha, beta, E)
/// with non-negativity bounds, seeded by a deterministic multistart grid.
Step1Fit fit_step1_points(std::span<const Step1Point> points, const FitConfig& cfg);
Step1Fit fit_step1(std::span<const CheckpointRecord> records, const FitConfig& cfg);

/// Pooled (loss, acc) pairs after head discard and moving-average smoothing,
/// plus the configured anchor point. Exposed for reuse by ablations and tests.
std::vector<std::pair<double, double>> step2_pairs(
    std::span<const CheckpointRecord> records, const FitConfig& cfg);

/// Nonlinear least squares on the sigmoid; k canonicalized positive.
Step2Fit fit_step2_pairs(std::span<const std::pair<double, double>> pairs,
                         const FitConfig& cfg);
Step2Fit fit_step2(std::span<const CheckpointRecord> records, const FitConfig& cfg);

/// loss = step-1 power law, acc = step-2 sigmoid of that loss.
/// Throws on a degenerate step-2 fit (use a variant instead).
std::pair<double, double> chain_predict(const Step1Fit& s1, const Step2Fit& s2,
                                        double n, double d);

FlopsLawFit fit_flops_law(std::span<const CheckpointRecord> records,
                          const FitConfig& cfg);
FlopsLawFit fit_flops_law_points(std::span<const std::pair<double, double>> cl_points,
                                 const FitConfig& cfg);

/// Fitted on final-checkpoint (N, D, acc) triples only.
SingleStepFit fit_single_step(std::span<const CheckpointRecord> records,
                              const FitConfig& cfg);

/// Fitted on (task CE, acc) pairs from the last 50% of each run by step.
LogSigmoidFit fit_log_sigmoid(std::span<const CheckpointRecord> records,
                              const FitConfig& cfg);

/// Human-readable forms, e.g. "L(N, D) = 38.07 / N^0.23 + 100.09 / D^0.24 + 0.45".
std::string formula_string(const PowerLawParams& p);
std::string formula_string(const SigmoidParams& p);
std::string formula_string(const FlopsLawParams& p);

} // namespace ladder
