#include "ladder/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ladder {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mix_key(std::uint64_t seed, std::uint64_t model, std::uint64_t checkpoint,
                      std::uint64_t slot) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ model);
  h = splitmix64(h ^ checkpoint);
  h = splitmix64(h ^ slot);
  return h;
}

double uniform01(std::uint64_t bits) {
  // 53 high bits -> (0, 1]; keeps log() finite below
  return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

} // namespace

double synth_normal(std::uint64_t seed, std::uint64_t model, std::uint64_t checkpoint,
                    std::uint64_t slot) {
  double u1 = uniform01(mix_key(seed, model, checkpoint, 2 * slot));
  double u2 = uniform01(mix_key(seed, model, checkpoint, 2 * slot + 1));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<CheckpointRecord> generate(const GeneratorSpec& spec) {
  if (spec.noise.loss_lognormal_sigma < 0.0 || spec.noise.acc_gaussian_sigma < 0.0)
    throw std::invalid_argument("generate: noise sigmas must be >= 0");
  if (spec.checkpoints_per_run < 1 || spec.steps_per_run < 1)
    throw std::invalid_argument("generate: checkpoints_per_run and steps_per_run must be >= 1");

  std::vector<CheckpointRecord> out;
  for (std::size_t mi = 0; mi < spec.ladder.entries.size(); ++mi) {
    const LadderEntry& entry = spec.ladder.entries[mi];
    std::int64_t d_final = chinchilla_tokens(entry.n_params, entry.chinchilla_multiplier,
                                             spec.ladder.tokens_per_param);
    double tokens_per_step =
        static_cast<double>(d_final) / static_cast<double>(spec.steps_per_run);

    LRSchedule schedule = spec.default_schedule;
    if (auto it = spec.schedules.find(entry.model_id); it != spec.schedules.end())
      schedule = it->second;
    if (schedule.kind == LRSchedule::Kind::cosine)
      schedule.total_decay_steps = spec.steps_per_run;

    CurveParams truth{spec.truth_step1, spec.truth_F};
    for (std::int64_t ci = 1; ci <= spec.checkpoints_per_run; ++ci) {
      std::int64_t step = spec.steps_per_run * ci / spec.checkpoints_per_run;
      std::int64_t tokens =
          std::llround(tokens_per_step * static_cast<double>(step));
      double d = static_cast<double>(tokens);
      double h = decayed_fraction(schedule, step);
      double true_loss = eval_curve(truth, static_cast<double>(entry.n_params), d, h);
      double true_acc = eval_sigmoid(spec.truth_step2, true_loss);

      double z_loss = synth_normal(spec.seed, mi, static_cast<std::uint64_t>(ci), 0);
      double z_acc = synth_normal(spec.seed, mi, static_cast<std::uint64_t>(ci), 1);

      CheckpointRecord r;
      r.model_id = entry.model_id;
      r.n_params = entry.n_params;
      r.tokens_seen = tokens;
      r.step = step;
      r.task = spec.task;
      r.loss = true_loss * std::exp(spec.noise.loss_lognormal_sigma * z_loss);
      r.accuracy =
          std::clamp(true_acc + spec.noise.acc_gaussian_sigma * z_acc, 0.0, 1.0);
      r.feature_kind = spec.feature_kind;
      r.lr_state = LrState{schedule.peak_lr, lr_at(schedule, step)};
      out.push_back(std::move(r));
    }
  }
  return out;
}

} // namespace ladder
