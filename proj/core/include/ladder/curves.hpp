#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ladder/laws.hpp"
#include "ladder/types.hpp"

namespace ladder {

struct LRSchedule {
  enum class Kind { constant, cosine };
  Kind kind = Kind::cosine;
  double peak_lr = 1e-3;
  std::int64_t warmup_steps = 0;
  std::int64_t total_decay_steps = 1; // horizon of the cosine decay
  double final_lr_fraction = 0.10;
};

struct SchedulePoint {
  std::int64_t step = 0;
  double lr = 0.0;
  double decayed_fraction_h = 0.0;
};

/// Linear warmup to peak, then cosine decay to final_lr_fraction * peak
/// over the horizon (clamped past it); constant schedules hold peak.
double lr_at(const LRSchedule& s, std::int64_t step);

/// H = (peak - lr) / peak past warmup; warmup itself contributes H = 0.
double decayed_fraction(const LRSchedule& s, std::int64_t step);

/// L(N, D, H) = base(N, D) - F * H
double eval_curve(const CurveParams& p, double n, double d, double h);

struct CurveFit {
  CurveParams params;
  std::vector<double> per_point_rel_error;
  double avg_rel_fit_error = 0.0; // percent
  bool f_unidentifiable = false;  // H had no spread in the data
  OptResult opt;
};

struct CurveFitOptions {
  // head exclusions mirroring the two stated warmup cutoffs
  std::int64_t cosine_warmup_exclusion_steps = 5000;
  std::int64_t constant_warmup_exclusion_steps = 3000;
  // schedules per model_id, used when records lack lr_state
  std::map<std::string, LRSchedule> schedules;
};

/// Joint Huber-on-log fit of (A, B, alpha, beta, E, F) on all intermediate
/// checkpoints, with F bounded at 0. Throws when neither lr_state nor a
/// schedule provides H for a record.
CurveFit fit_curve(std::span<const CheckpointRecord> records, const FitConfig& cfg,
                   const CurveFitOptions& opts = {});

struct CurveSample {
  std::int64_t step = 0;
  double value = 0.0;
};

/// Elementwise constant-minus-cosine loss difference, aligned by step.
/// Positive where the cosine curve is lower. Throws on misaligned steps.
std::vector<CurveSample> residue(std::span<const CurveSample> cosine_curve,
                                 std::span<const CurveSample> constant_curve);

struct AccuracyCurvePoint {
  std::int64_t step = 0;
  double tokens = 0.0;
  double h = 0.0;
  double loss = 0.0;
  double acc = 0.0;
};

/// Accuracy curve for one model: D(step) = tokens_per_step * step,
/// H from the schedule, loss via the curve model, acc via the sigmoid.
std::vector<AccuracyCurvePoint> curve_chain_predict(
    const CurveParams& cp, const Step2Fit& s2, double n, const LRSchedule& schedule,
    double tokens_per_step, std::span<const std::int64_t> steps);

} // namespace ladder
