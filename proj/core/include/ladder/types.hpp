#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ladder {

/// Which intermediate feature the `loss` field of a record carries.
enum class FeatureKind { bpb_correct, task_ce, lm_loss };

const char* to_string(FeatureKind k);
FeatureKind feature_kind_from_string(const std::string& s);

struct LrState {
  double peak_lr = 0.0;
  double current_lr = 0.0;
};

/// One evaluated checkpoint of one model on one task.
struct CheckpointRecord {
  std::string model_id;
  std::int64_t n_params = 0;    // non-embedding parameters
  std::int64_t tokens_seen = 0; // training tokens at this checkpoint
  std::int64_t step = 0;
  std::string task;
  double loss = 0.0;
  std::optional<double> accuracy;
  FeatureKind feature_kind = FeatureKind::bpb_correct;
  std::optional<LrState> lr_state;
};

struct Violation {
  std::size_t record_index = 0;
  std::string reason;
};

/// Checks every record invariant plus per-(model, task) step ordering.
/// Violations are data, not faults: an empty result means well-formed.
std::vector<Violation> validate_records(std::span<const CheckpointRecord> records);

struct LadderEntry {
  std::string model_id;
  std::int64_t n_params = 0;
  double chinchilla_multiplier = 1.0;
};

struct LadderSpec {
  std::vector<LadderEntry> entries;
  double tokens_per_param = 20.0;
};

/// round(tokens_per_param * multiplier * n_params). Throws std::overflow_error
/// if the result does not fit the count range.
std::int64_t chinchilla_tokens(std::int64_t n_params, double multiplier,
                               double tokens_per_param = 20.0);

/// C ~ 6 N D, as a real (values reach 1e23).
double compute_flops(std::int64_t n_params, std::int64_t tokens);

/// L(N, D) = A / N^alpha + B / D^beta + E
struct PowerLawParams {
  double A = 0.0;
  double B = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double E = 0.0;
};

/// Acc(L) = a / (1 + exp(-k (L - L0))) + b
struct SigmoidParams {
  double a = 0.0;
  double b = 0.0;
  double k = 0.0;
  double L0 = 0.0;
};

///// Loss-curve model: L(N, D, H) = base(N, D) - F * H
struct CurveParams {
  PowerLawParams base;
  double F = 0.0;
};

struct FitConfig {
  double huber_delta = 1e-3;
  int last_k_average = 5;
  int moving_average_window = 5;
  double discard_head_fraction = 0.10;
  std::optional<std::pair<double, double>> anchor_point = std::pair{0.0, 1.0};
  int multistart_count = 16;
  int max_iterations = 500;
  double convergence_tol = 1e-8; // relative objective decrease
  double gradient_tol = 1e-6;    // projected gradient infinity norm
};

} // namespace ladder
