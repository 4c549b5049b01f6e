#include "ladder/laws.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

#include "ladder/metrics.hpp"

namespace ladder {

namespace {

double safe_exp(double x) { return std::exp(std::min(x, 700.0)); }

double softplus(double x) {
  if (x > 30.0) return x;
  return std::log1p(std::exp(x));
}

struct Run {
  std::string model_id;
  double n = 0.0;
  std::vector<double> steps;
  std::vector<double> tokens;
  std::vector<double> loss;
  std::vector<double> acc; // NaN when absent
};

// Groups records into runs by model_id, in order of first occurrence,
// each run sorted by step.
std::vector<Run> group_runs(std::span<const CheckpointRecord> records) {
  std::vector<Run> runs;
  std::map<std::string, std::size_t> index;
  for (const auto& r : records) {
    auto it = index.find(r.model_id);
    if (it == index.end()) {
      it = index.emplace(r.model_id, runs.size()).first;
      runs.push_back(Run{r.model_id, static_cast<double>(r.n_params), {}, {}, {}, {}});
    }
    Run& run = runs[it->second];
    run.steps.push_back(static_cast<double>(r.step));
    run.tokens.push_back(static_cast<double>(r.tokens_seen));
    run.loss.push_back(r.loss);
    run.acc.push_back(r.accuracy ? *r.accuracy : std::nan(""));
  }
  for (auto& run : runs) {
    std::vector<std::size_t> order(run.steps.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return run.steps[a] < run.steps[b]; });
    Run sorted = run;
    for (std::size_t i = 0; i < order.size(); ++i) {
      sorted.steps[i] = run.steps[order[i]];
      sorted.tokens[i] = run.tokens[order[i]];
      sorted.loss[i] = run.loss[order[i]];
      sorted.acc[i] = run.acc[order[i]];
    }
    run = std::move(sorted);
  }
  return runs;
}

// Deterministic subsample keeping at most `cap` seeds, spread by stride.
std::vector<Eigen::VectorXd> cap_seeds(std::vector<Eigen::VectorXd> seeds, int cap) {
  if (static_cast<int>(seeds.size()) <= cap) return seeds;
  std::vector<Eigen::VectorXd> out;
  out.reserve(static_cast<std::size_t>(cap));
  for (int i = 0; i < cap; ++i)
    out.push_back(seeds[static_cast<std::size_t>(i) * seeds.size() / static_cast<std::size_t>(cap)]);
  return out;
}

constexpr double kExponentGrid[] = {0.1, 0.3, 0.5, 0.8};
constexpr double kInterceptGrid[] = {0.5, 0.9};

} // namespace

double eval_power_law(const PowerLawParams& p, double n, double d) {
  return p.A * std::pow(n, -p.alpha) + p.B * std::pow(d, -p.beta) + p.E;
}

double eval_sigmoid(const SigmoidParams& p, double loss) {
  return p.a / (1.0 + safe_exp(-p.k * (loss - p.L0))) + p.b;
}

double eval_flops_law(const FlopsLawParams& p, double c) {
  return p.A * std::pow(c, -p.alpha) + p.E;
}

double eval_single_step(const SingleStepParams& p, double n, double d) {
  double inner = p.A * std::pow(n, -p.alpha) + p.B * std::pow(d, -p.beta) + p.E;
  return p.a / (1.0 + safe_exp(-inner)) + p.b;
}

double eval_log_sigmoid(const LogSigmoidParams& p, double ce) {
  // 1 - a * log sigmoid(-k (ce - ce0)), with log sigmoid(-x) = -softplus(x)
  return 1.0 + p.a * softplus(p.k * (ce - p.ce0));
}

std::vector<Step1Point> step1_points(std::span<const CheckpointRecord> records,
                                     const FitConfig& cfg) {
  std::vector<Step1Point> pts;
  for (const auto& run : group_runs(records)) {
    Step1Point p;
    p.n = run.n;
    p.d = run.tokens.back();
    p.loss = last_k_mean(run.loss, cfg.last_k_average);
    pts.push_back(p);
  }
  return pts;
}

namespace {

Objective make_step1_objective(std::span<const Step1Point> points, double delta) {
  std::vector<double> ln_n, ln_d, ln_l;
  for (const auto& p : points) {
    ln_n.push_back(std::log(p.n));
    ln_d.push_back(std::log(p.d));
    ln_l.push_back(std::log(p.loss));
  }
  return [ln_n, ln_d, ln_l, delta](const Eigen::VectorXd& th) {
    double total = 0.0;
    for (std::size_t i = 0; i < ln_n.size(); ++i) {
      double pred = safe_exp(th[0] - th[2] * ln_n[i]) +
                    safe_exp(th[1] - th[3] * ln_d[i]) + th[4];
      total += huber(std::log(pred) - ln_l[i], delta);
    }
    return total / static_cast<double>(ln_n.size());
  };
}

std::vector<Eigen::VectorXd> step1_seeds(std::span<const Step1Point> points, int cap) {
  double ln_n_bar = 0.0, ln_d_bar = 0.0;
  double lmin = points[0].loss, lmax = points[0].loss;
  for (const auto& p : points) {
    ln_n_bar += std::log(p.n);
    ln_d_bar += std::log(p.d);
    lmin = std::min(lmin, p.loss);
    lmax = std::max(lmax, p.loss);
  }
  ln_n_bar /= static_cast<double>(points.size());
  ln_d_bar /= static_cast<double>(points.size());
  double half = std::max((lmax - lmin) / 2.0, 1e-3);

  std::vector<Eigen::VectorXd> seeds;
  for (double alpha : kExponentGrid)
    for (double beta : kExponentGrid)
      for (double ef : kInterceptGrid) {
        Eigen::VectorXd s(5);
        s << std::log(half) + alpha * ln_n_bar, std::log(half) + beta * ln_d_bar,
            alpha, beta, lmin * ef;
        seeds.push_back(s);
      }
  return cap_seeds(std::move(seeds), cap);
}

} // namespace

Step1Fit fit_step1_points(std::span<const Step1Point> points, const FitConfig& cfg) {
  if (points.size() < 5)
    throw std::invalid_argument("fit_step1: need at least 5 (N, D) points");
  for (const auto& p : points)
    if (!(p.loss > 0.0))
      throw std::invalid_argument("fit_step1: losses must be positive (log objective)");

  auto obj = make_step1_objective(points, cfg.huber_delta);
  Bounds bounds = Bounds::unbounded(5);
  bounds.lower[2] = bounds.lower[3] = bounds.lower[4] = 0.0;

  auto seeds = step1_seeds(points, cfg.multistart_count);
  OptResult best = multistart(
      [&](const Eigen::VectorXd& x0) { return minimize_bounded(obj, x0, bounds, cfg); },
      seeds);
  // one polishing pass from the winning basin
  OptResult polished = minimize_bounded(obj, best.params, bounds, cfg);
  if (polished.objective < best.objective) best = polished;

  Step1Fit fit;
  fit.params = PowerLawParams{std::exp(best.params[0]), std::exp(best.params[1]),
                              best.params[2], best.params[3], best.params[4]};
  fit.opt = best;
  for (const auto& p : points) {
    double pred = eval_power_law(fit.params, p.n, p.d);
    fit.per_point_rel_error.push_back(relative_error(pred, p.loss));
  }
  double sum = 0.0;
  for (double e : fit.per_point_rel_error) sum += e;
  fit.avg_rel_fit_error = sum / static_cast<double>(fit.per_point_rel_error.size());
  return fit;
}

Step1Fit fit_step1(std::span<const CheckpointRecord> records, const FitConfig& cfg) {
  auto pts = step1_points(records, cfg);
  return fit_step1_points(pts, cfg);
}

std::vector<std::pair<double, double>> step2_pairs(
    std::span<const CheckpointRecord> records, const FitConfig& cfg) {
  std::vector<std::pair<double, double>> pairs;
  for (const auto& run : group_runs(records)) {
    // keep checkpoints with an accuracy value
    std::vector<double> steps, loss, acc;
    for (std::size_t i = 0; i < run.steps.size(); ++i) {
      if (std::isnan(run.acc[i])) continue;
      steps.push_back(run.steps[i]);
      loss.push_back(run.loss[i]);
      acc.push_back(run.acc[i]);
    }
    if (steps.empty()) continue;
    // discard the head of the run by step
    double cutoff = cfg.discard_head_fraction * steps.back();
    std::size_t first = 0;
    while (first < steps.size() && steps[first] < cutoff) ++first;
    std::vector<double> loss_kept(loss.begin() + static_cast<std::ptrdiff_t>(first), loss.end());
    std::vector<double> acc_kept(acc.begin() + static_cast<std::ptrdiff_t>(first), acc.end());
    auto loss_s = moving_average(loss_kept, cfg.moving_average_window);
    auto acc_s = moving_average(acc_kept, cfg.moving_average_window);
    for (std::size_t i = 0; i < loss_s.size(); ++i)
      pairs.emplace_back(loss_s[i], acc_s[i]);
  }
  return pairs;
}

Step2Fit fit_step2_pairs(std::span<const std::pair<double, double>> pairs,
                         const FitConfig& cfg) {
  std::vector<std::pair<double, double>> data(pairs.begin(), pairs.end());
  if (cfg.anchor_point) data.push_back(*cfg.anchor_point);
  if (data.size() < 4)
    throw std::invalid_argument("fit_step2: need at least 4 points after filtering");

  double lmin = data[0].first, lmax = data[0].first;
  double amin = data[0].second, amax = data[0].second;
  std::vector<double> losses;
  for (const auto& [l, a] : data) {
    lmin = std::min(lmin, l);
    lmax = std::max(lmax, l);
    amin = std::min(amin, a);
    amax = std::max(amax, a);
    losses.push_back(l);
  }
  std::nth_element(losses.begin(), losses.begin() + static_cast<std::ptrdiff_t>(losses.size() / 2),
                   losses.end());
  double l_median = losses[losses.size() / 2];

  double b0 = amax;
  double a0 = std::min(amin - amax, -1e-3);
  // slope of a logit-transformed linear pre-fit gives the k scale
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (const auto& [l, a] : data) {
    double frac = (a - b0) / a0;
    frac = std::clamp(frac, 1e-3, 1.0 - 1e-3);
    double z = std::log(frac / (1.0 - frac));
    sx += l;
    sy += z;
    sxx += l * l;
    sxy += l * z;
    ++cnt;
  }
  double denom = cnt * sxx - sx * sx;
  double k0 = denom > 1e-12 ? (cnt * sxy - sx * sy) / denom : 1.0;
  if (!(std::abs(k0) > 1e-6)) k0 = 1.0;

  auto model = [](const Eigen::VectorXd& p, double l) {
    return p[0] / (1.0 + safe_exp(-p[2] * (l - p[3]))) + p[1];
  };

  OptResult best;
  bool have = false;
  for (double scale : {1.0, 4.0, 0.25}) {
    Eigen::VectorXd p0(4);
    p0 << a0, b0, k0 * scale, l_median;
    OptResult r = least_squares(model, data, p0, cfg);
    if (!have || r.objective < best.objective) {
      best = r;
      have = true;
    }
  }

  SigmoidParams params{best.params[0], best.params[1], best.params[2], best.params[3]};
  if (params.k < 0.0) {
    // (a, b, k, L0) -> (-a, a+b, -k, L0) is an exact symmetry; keep k > 0
    params = SigmoidParams{-params.a, params.a + params.b, -params.k, params.L0};
  }

  Step2Fit fit;
  fit.params = params;
  fit.degenerate = best.degenerate;
  fit.n_points_used = static_cast<int>(data.size());
  double err_sum = 0.0;
  int err_cnt = 0;
  for (const auto& [l, a] : pairs) {
    if (a == 0.0) continue;
    err_sum += relative_error(eval_sigmoid(params, l), a);
    ++err_cnt;
  }
  fit.avg_rel_fit_error = err_cnt > 0 ? err_sum / err_cnt : 0.0;
  return fit;
}

Step2Fit fit_step2(std::span<const CheckpointRecord> records, const FitConfig& cfg) {
  auto pairs = step2_pairs(records, cfg);
  return fit_step2_pairs(pairs, cfg);
}

std::pair<double, double> chain_predict(const Step1Fit& s1, const Step2Fit& s2,
                                        double n, double d) {
  if (s2.degenerate)
    throw std::runtime_error(
        "chain_predict: degenerate step-2 fit; use a variant (flops, task_ce, "
        "lm_loss, single_step) for this task");
  double loss = eval_power_law(s1.params, n, d);
  return {loss, eval_sigmoid(s2.params, loss)};
}

FlopsLawFit fit_flops_law_points(std::span<const std::pair<double, double>> cl_points,
                                 const FitConfig& cfg) {
  if (cl_points.size() < 3)
    throw std::invalid_argument("fit_flops_law: need at least 3 points");
  std::vector<double> ln_c, ln_l;
  double lmin = cl_points[0].second, lmax = cl_points[0].second;
  double ln_c_bar = 0.0;
  for (const auto& [c, l] : cl_points) {
    if (!(l > 0.0))
      throw std::invalid_argument("fit_flops_law: losses must be positive");
    ln_c.push_back(std::log(c));
    ln_l.push_back(std::log(l));
    ln_c_bar += std::log(c);
    lmin = std::min(lmin, l);
    lmax = std::max(lmax, l);
  }
  ln_c_bar /= static_cast<double>(cl_points.size());
  double delta = cfg.huber_delta;

  Objective obj = [&ln_c, &ln_l, delta](const Eigen::VectorXd& th) {
    double total = 0.0;
    for (std::size_t i = 0; i < ln_c.size(); ++i) {
      double pred = safe_exp(th[0] - th[1] * ln_c[i]) + th[2];
      total += huber(std::log(pred) - ln_l[i], delta);
    }
    return total / static_cast<double>(ln_c.size());
  };

  Bounds bounds = Bounds::unbounded(3);
  bounds.lower[1] = bounds.lower[2] = 0.0;
  double half = std::max((lmax - lmin) / 2.0, 1e-3);
  std::vector<Eigen::VectorXd> seeds;
  for (double alpha : kExponentGrid)
    for (double ef : kInterceptGrid) {
      Eigen::VectorXd s(3);
      s << std::log(half) + alpha * ln_c_bar, alpha, lmin * ef;
      seeds.push_back(s);
    }
  seeds = cap_seeds(std::move(seeds), cfg.multistart_count);

  OptResult best = multistart(
      [&](const Eigen::VectorXd& x0) { return minimize_bounded(obj, x0, bounds, cfg); },
      seeds);

  FlopsLawFit fit;
  fit.params = FlopsLawParams{std::exp(best.params[0]), best.params[1], best.params[2]};
  fit.opt = best;
  for (const auto& [c, l] : cl_points)
    fit.per_point_rel_error.push_back(relative_error(eval_flops_law(fit.params, c), l));
  double sum = 0.0;
  for (double e : fit.per_point_rel_error) sum += e;
  fit.avg_rel_fit_error = sum / static_cast<double>(fit.per_point_rel_error.size());
  return fit;
}

FlopsLawFit fit_flops_law(std::span<const CheckpointRecord> records,
                          const FitConfig& cfg) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& p : step1_points(records, cfg))
    pts.emplace_back(6.0 * p.n * p.d, p.loss);
  return fit_flops_law_points(pts, cfg);
}

SingleStepFit fit_single_step(std::span<const CheckpointRecord> records,
                              const FitConfig& cfg) {
  struct Pt {
    double n, d, acc;
  };
  std::vector<Pt> pts;
  for (const auto& run : group_runs(records)) {
    if (std::isnan(run.acc.back()))
      throw std::invalid_argument("fit_single_step: final checkpoint lacks accuracy");
    pts.push_back({run.n, run.tokens.back(), run.acc.back()});
  }
  if (pts.size() < 7)
    throw std::invalid_argument("fit_single_step: need at least 7 points");

  double ln_n_bar = 0.0, ln_d_bar = 0.0;
  double amax = pts[0].acc;
  double n_min = pts[0].n, n_max = pts[0].n;
  std::vector<double> ds;
  for (const auto& p : pts) {
    ln_n_bar += std::log(p.n);
    ln_d_bar += std::log(p.d);
    amax = std::max(amax, p.acc);
    n_min = std::min(n_min, p.n);
    n_max = std::max(n_max, p.n);
    ds.push_back(p.d);
  }
  ln_n_bar /= static_cast<double>(pts.size());
  ln_d_bar /= static_cast<double>(pts.size());
  std::nth_element(ds.begin(), ds.begin() + static_cast<std::ptrdiff_t>(ds.size() / 2), ds.end());
  double d_med = ds[ds.size() / 2];

  // theta = (a, b, log A, log B, alpha, beta, E)
  Objective obj = [&pts](const Eigen::VectorXd& th) {
    double total = 0.0;
    for (const auto& p : pts) {
      double inner = safe_exp(th[2] - th[4] * std::log(p.n)) +
                     safe_exp(th[3] - th[5] * std::log(p.d)) + th[6];
      double pred = th[0] / (1.0 + safe_exp(-inner)) + th[1];
      double r = pred - p.acc;
      total += r * r;
    }
    return total / static_cast<double>(pts.size());
  };

  Bounds bounds = Bounds::unbounded(7);
  bounds.lower[0] = -2.0;
  bounds.upper[0] = 2.0;
  bounds.lower[1] = -1.0;
  bounds.upper[1] = 2.0;
  bounds.lower[4] = bounds.lower[5] = 0.0;

  std::vector<Eigen::VectorXd> seeds;
  for (double a : {-0.8, -0.4})
    for (double alpha : {0.2, 0.5})
      for (double beta : {0.2, 0.5})
        for (double e : {-1.0, 0.0}) {
          Eigen::VectorXd s(7);
          s << a, amax, alpha * ln_n_bar, beta * ln_d_bar, alpha, beta, e;
          seeds.push_back(s);
        }
  seeds = cap_seeds(std::move(seeds), cfg.multistart_count);

  OptResult best = multistart(
      [&](const Eigen::VectorXd& x0) { return minimize_bounded(obj, x0, bounds, cfg); },
      seeds);

  SingleStepFit fit;
  fit.params = SingleStepParams{best.params[0],           best.params[1],
                                std::exp(best.params[2]), std::exp(best.params[3]),
                                best.params[4],           best.params[5],
                                best.params[6]};
  double err = 0.0;
  for (const auto& p : pts) err += std::abs(eval_single_step(fit.params, p.n, p.d) - p.acc);
  fit.avg_abs_fit_error = err / static_cast<double>(pts.size());

  // the known failure mode: fitted prediction does not vary with model size
  double swing = std::abs(eval_single_step(fit.params, n_max, d_med) -
                          eval_single_step(fit.params, n_min, d_med));
  fit.degenerate = swing < 1e-4;
  return fit;
}

LogSigmoidFit fit_log_sigmoid(std::span<const CheckpointRecord> records,
                              const FitConfig& cfg) {
  std::vector<std::pair<double, double>> data;
  for (const auto& run : group_runs(records)) {
    double cutoff = 0.5 * run.steps.back(); // last 50% of training by step
    for (std::size_t i = 0; i < run.steps.size(); ++i) {
      if (run.steps[i] < cutoff || std::isnan(run.acc[i])) continue;
      data.emplace_back(run.loss[i], run.acc[i]);
    }
  }
  if (data.size() < 3)
    throw std::invalid_argument("fit_log_sigmoid: need at least 3 points");

  // linear pre-fit: the large-ce branch has slope a*k
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  double ce_min = data[0].first;
  for (const auto& [ce, acc] : data) {
    sx += ce;
    sy += acc;
    sxx += ce * ce;
    sxy += ce * acc;
    ce_min = std::min(ce_min, ce);
  }
  double n = static_cast<double>(data.size());
  double denom = n * sxx - sx * sx;
  double slope = denom > 1e-12 ? (n * sxy - sx * sy) / denom : 0.1;
  double ak = std::max(std::abs(slope), 1e-3);

  // theta = (log a, log k, ce0); positivity of a and k via the log transform
  auto model = [](const Eigen::VectorXd& p, double ce) {
    return 1.0 + std::exp(p[0]) * softplus(std::exp(p[1]) * (ce - p[2]));
  };

  OptResult best;
  bool have = false;
  for (double k0 : {1.0, 5.0, 0.2}) {
    Eigen::VectorXd p0(3);
    p0 << std::log(ak / k0), std::log(k0), ce_min;
    OptResult r = least_squares(model, data, p0, cfg);
    if (!have || r.objective < best.objective) {
      best = r;
      have = true;
    }
  }

  LogSigmoidFit fit;
  fit.params = LogSigmoidParams{std::exp(best.params[0]), std::exp(best.params[1]),
                                best.params[2]};
  fit.degenerate = best.degenerate;
  fit.n_points_used = static_cast<int>(data.size());
  double err = 0.0;
  int cnt = 0;
  for (const auto& [ce, acc] : data) {
    if (acc == 0.0) continue;
    err += relative_error(eval_log_sigmoid(fit.params, ce), acc);
    ++cnt;
  }
  fit.avg_rel_fit_error = cnt > 0 ? err / cnt : 0.0;
  return fit;
}

namespace {
std::string fmt2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}
} // namespace

std::string formula_string(const PowerLawParams& p) {
  return "L(N, D) = " + fmt2(p.A) + " / N^" + fmt2(p.alpha) + " + " + fmt2(p.B) +
         " / D^" + fmt2(p.beta) + " + " + fmt2(p.E);
}

std::string formula_string(const SigmoidParams& p) {
  return "Acc(L) = " + fmt2(p.a) + " / (1 + exp(-" + fmt2(p.k) + "(L - " + fmt2(p.L0) +
         "))) + " + fmt2(p.b);
}

std::string formula_string(const FlopsLawParams& p) {
  return "L(C) = " + fmt2(p.A) + " / C^" + fmt2(p.alpha) + " + " + fmt2(p.E);
}

} // namespace ladder
