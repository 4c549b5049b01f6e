#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ladder/curves.hpp"
#include "ladder/types.hpp"

namespace ladder {

struct NoiseSpec {
  double loss_lognormal_sigma = 0.0; // multiplicative, on log loss
  double acc_gaussian_sigma = 0.0;   // additive, clamped to [0, 1]
};

struct GeneratorSpec {
  PowerLawParams truth_step1;
  SigmoidParams truth_step2;
  double truth_F = 0.0;
  LadderSpec ladder;
  LRSchedule default_schedule{LRSchedule::Kind::constant, 1e-3, 0, 1, 0.10};
  std::map<std::string, LRSchedule> schedules; // overrides per model_id
  std::int64_t checkpoints_per_run = 20;
  std::int64_t steps_per_run = 20000; // training horizon; sets tokens per step
  NoiseSpec noise;
  std::uint64_t seed = 0;
  std::string task = "synthetic";
  FeatureKind feature_kind = FeatureKind::bpb_correct;
};

/// Counter-based deterministic stream: every draw is keyed by
/// (seed, model index, checkpoint index, slot), so generation order
/// never changes the values.
double synth_normal(std::uint64_t seed, std::uint64_t model, std::uint64_t checkpoint,
                    std::uint64_t slot);

/// Checkpoint records for the whole ladder. Loss carries multiplicative
/// log-normal noise, accuracy additive clamped Gaussian noise. Identical
/// specs produce identical records.
std::vector<CheckpointRecord> generate(const GeneratorSpec& spec);

} // namespace ladder
