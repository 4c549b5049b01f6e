#include "ladder/curves.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ladder/metrics.hpp"

namespace ladder {

double lr_at(const LRSchedule& s, std::int64_t step) {
  if (step < 0) throw std::invalid_argument("lr_at: step must be >= 0");
  if (s.warmup_steps > 0 && step < s.warmup_steps)
    return s.peak_lr * static_cast<double>(step) / static_cast<double>(s.warmup_steps);
  if (s.kind == LRSchedule::Kind::constant) return s.peak_lr;

  double final_lr = s.final_lr_fraction * s.peak_lr;
  if (step >= s.total_decay_steps) return final_lr;
  double span = static_cast<double>(s.total_decay_steps - s.warmup_steps);
  double phase = static_cast<double>(step - s.warmup_steps) / span;
  return final_lr + (s.peak_lr - final_lr) * 0.5 * (1.0 + std::cos(std::numbers::pi * phase));
}

double decayed_fraction(const LRSchedule& s, std::int64_t step) {
  if (step < s.warmup_steps) return 0.0;
  return (s.peak_lr - lr_at(s, step)) / s.peak_lr;
}

double eval_curve(const CurveParams& p, double n, double d, double h) {
  return eval_power_law(p.base, n, d) - p.F * h;
}

namespace {

double safe_exp(double x) { return std::exp(std::min(x, 700.0)); }

struct CurvePoint {
  double n, d, h, loss;
};

} // namespace

CurveFit fit_curve(std::span<const CheckpointRecord> records, const FitConfig& cfg,
                   const CurveFitOptions& opts) {
  std::vector<CurvePoint> pts;
  for (const auto& r : records) {
    double h;
    LRSchedule::Kind kind = LRSchedule::Kind::cosine;
    if (r.lr_state) {
      h = std::clamp((r.lr_state->peak_lr - r.lr_state->current_lr) / r.lr_state->peak_lr,
                     0.0, 1.0);
      if (r.lr_state->current_lr == r.lr_state->peak_lr) kind = LRSchedule::Kind::constant;
    } else {
      auto it = opts.schedules.find(r.model_id);
      if (it == opts.schedules.end())
        throw std::invalid_argument("fit_curve: record for model '" + r.model_id +
                                    "' has no lr_state and no schedule");
      h = decayed_fraction(it->second, r.step);
      kind = it->second.kind;
    }
    std::int64_t exclusion = kind == LRSchedule::Kind::cosine
                                 ? opts.cosine_warmup_exclusion_steps
                                 : opts.constant_warmup_exclusion_steps;
    if (r.step < exclusion) continue;
    pts.push_back({static_cast<double>(r.n_params), static_cast<double>(r.tokens_seen),
                   h, r.loss});
  }
  if (pts.size() < 6)
    throw std::invalid_argument("fit_curve: need at least 6 points after head exclusion");
  for (const auto& p : pts)
    if (!(p.loss > 0.0)) throw std::invalid_argument("fit_curve: losses must be positive");

  double h_min = pts[0].h, h_max = pts[0].h;
  double lmin = pts[0].loss, lmax = pts[0].loss;
  double ln_n_bar = 0.0, ln_d_bar = 0.0;
  for (const auto& p : pts) {
    h_min = std::min(h_min, p.h);
    h_max = std::max(h_max, p.h);
    lmin = std::min(lmin, p.loss);
    lmax = std::max(lmax, p.loss);
    ln_n_bar += std::log(p.n);
    ln_d_bar += std::log(p.d);
  }
  ln_n_bar /= static_cast<double>(pts.size());
  ln_d_bar /= static_cast<double>(pts.size());
  bool h_flat = (h_max - h_min) < 1e-9;

  double delta = cfg.huber_delta;
  // theta = (a, b, alpha, beta, E, F)
  Objective obj = [&pts, delta](const Eigen::VectorXd& th) {
    double total = 0.0;
    for (const auto& p : pts) {
      double pred = safe_exp(th[0] - th[2] * std::log(p.n)) +
                    safe_exp(th[1] - th[3] * std::log(p.d)) + th[4] - th[5] * p.h;
      if (!(pred > 0.0)) return 1e30; // log undefined; reject this region
      total += huber(std::log(pred) - std::log(p.loss), delta);
    }
    return total / static_cast<double>(pts.size());
  };

  Bounds bounds = Bounds::unbounded(6);
  bounds.lower[2] = bounds.lower[3] = bounds.lower[4] = bounds.lower[5] = 0.0;
  if (h_flat) bounds.upper[5] = 0.0; // F has no signal; pin it

  double half = std::max((lmax - lmin) / 2.0, 1e-3);
  std::vector<Eigen::VectorXd> seeds;
  for (double alpha : {0.1, 0.3, 0.5, 0.8})
    for (double beta : {0.1, 0.3, 0.5, 0.8})
      for (double ef : {0.5, 0.9}) {
        Eigen::VectorXd s(6);
        s << std::log(half) + alpha * ln_n_bar, std::log(half) + beta * ln_d_bar,
            alpha, beta, lmin * ef, h_flat ? 0.0 : 0.1 * lmin;
        seeds.push_back(s);
      }
  if (static_cast<int>(seeds.size()) > cfg.multistart_count) {
    std::vector<Eigen::VectorXd> capped;
    for (int i = 0; i < cfg.multistart_count; ++i)
      capped.push_back(seeds[static_cast<std::size_t>(i) * seeds.size() /
                             static_cast<std::size_t>(cfg.multistart_count)]);
    seeds = std::move(capped);
  }

  OptResult best = multistart(
      [&](const Eigen::VectorXd& x0) { return minimize_bounded(obj, x0, bounds, cfg); },
      seeds);
  OptResult polished = minimize_bounded(obj, best.params, bounds, cfg);
  if (polished.objective < best.objective) best = polished;

  CurveFit fit;
  fit.params.base = PowerLawParams{std::exp(best.params[0]), std::exp(best.params[1]),
                                   best.params[2], best.params[3], best.params[4]};
  fit.params.F = best.params[5];
  fit.f_unidentifiable = h_flat;
  fit.opt = best;
  for (const auto& p : pts)
    fit.per_point_rel_error.push_back(
        relative_error(eval_curve(fit.params, p.n, p.d, p.h), p.loss));
  double sum = 0.0;
  for (double e : fit.per_point_rel_error) sum += e;
  fit.avg_rel_fit_error = sum / static_cast<double>(fit.per_point_rel_error.size());
  return fit;
}

std::vector<CurveSample> residue(std::span<const CurveSample> cosine_curve,
                                 std::span<const CurveSample> constant_curve) {
  std::map<std::int64_t, double> constant_by_step;
  for (const auto& s : constant_curve) constant_by_step[s.step] = s.value;

  std::vector<CurveSample> out;
  std::string missing;
  for (const auto& s : cosine_curve) {
    auto it = constant_by_step.find(s.step);
    if (it == constant_by_step.end()) {
      missing += (missing.empty() ? "" : ", ") + std::to_string(s.step);
      continue;
    }
    out.push_back({s.step, it->second - s.value});
  }
  if (!missing.empty())
    throw std::invalid_argument("residue: steps missing from constant curve: " + missing);
  if (out.empty()) throw std::invalid_argument("residue: no common steps");
  return out;
}

std::vector<AccuracyCurvePoint> curve_chain_predict(
    const CurveParams& cp, const Step2Fit& s2, double n, const LRSchedule& schedule,
    double tokens_per_step, std::span<const std::int64_t> steps) {
  if (s2.degenerate)
    throw std::runtime_error("curve_chain_predict: degenerate step-2 fit");
  std::vector<AccuracyCurvePoint> out;
  out.reserve(steps.size());
  for (std::int64_t step : steps) {
    AccuracyCurvePoint p;
    p.step = step;
    p.tokens = tokens_per_step * static_cast<double>(step);
    p.h = decayed_fraction(schedule, step);
    p.loss = eval_curve(cp, n, p.tokens, p.h);
    p.acc = eval_sigmoid(s2.params, p.loss);
    out.push_back(p);
  }
  return out;
}

} // namespace ladder
