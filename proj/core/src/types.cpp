#include "ladder/types.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace ladder {

const char* to_string(FeatureKind k) {
  switch (k) {
    case FeatureKind::bpb_correct: return "bpb_correct";
    case FeatureKind::task_ce: return "task_ce";
    case FeatureKind::lm_loss: return "lm_loss";
  }
  return "bpb_correct";
}

FeatureKind feature_kind_from_string(const std::string& s) {
  if (s == "bpb_correct") return FeatureKind::bpb_correct;
  if (s == "task_ce") return FeatureKind::task_ce;
  if (s == "lm_loss") return FeatureKind::lm_loss;
  throw std::invalid_argument("unknown feature_kind: " + s);
}

std::vector<Violation> validate_records(std::span<const CheckpointRecord> records) {
  std::vector<Violation> out;
  auto add = [&](std::size_t i, std::string why) {
    out.push_back(Violation{i, std::move(why)});
  };

  // last seen (step, tokens) per (model_id, task), in input order
  std::map<std::pair<std::string, std::string>, std::pair<std::int64_t, std::int64_t>> last;

  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (r.n_params < 1) add(i, "n_params < 1");
    if (r.tokens_seen < 1) add(i, "tokens_seen < 1");
    if (r.step < 1) add(i, "step < 1");
    if (!std::isfinite(r.loss) || r.loss < 0.0) add(i, "loss not finite or negative");
    if (r.accuracy) {
      if (!std::isfinite(*r.accuracy) || *r.accuracy < 0.0 || *r.accuracy > 1.0)
        add(i, "accuracy out of [0,1]");
    }
    if (r.lr_state) {
      if (!(r.lr_state->peak_lr > 0.0)) add(i, "lr_state.peak_lr must be > 0");
      if (r.lr_state->current_lr < 0.0) add(i, "lr_state.current_lr must be >= 0");
    }

    auto key = std::make_pair(r.model_id, r.task);
    auto it = last.find(key);
    if (it != last.end()) {
      if (r.step <= it->second.first) add(i, "non-increasing step");
      if (r.tokens_seen < it->second.second) add(i, "decreasing tokens_seen");
    }
    last[key] = {r.step, r.tokens_seen};
  }
  return out;
}

std::int64_t chinchilla_tokens(std::int64_t n_params, double multiplier,
                               double tokens_per_param) {
  if (n_params < 1) throw std::invalid_argument("n_params must be >= 1");
  if (!(multiplier > 0.0)) throw std::invalid_argument("multiplier must be > 0");
  double d = tokens_per_param * multiplier * static_cast<double>(n_params);
  if (!std::isfinite(d) ||
      d >= static_cast<double>(std::numeric_limits<std::int64_t>::max()))
    throw std::overflow_error("chinchilla_tokens overflows the count range");
  return static_cast<std::int64_t>(std::llround(d));
}

double compute_flops(std::int64_t n_params, std::int64_t tokens) {
  if (n_params < 1 || tokens < 1)
    throw std::invalid_argument("compute_flops requires n_params, tokens >= 1");
  return 6.0 * static_cast<double>(n_params) * static_cast<double>(tokens);
}

} // namespace ladder
