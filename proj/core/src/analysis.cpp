#include "ladder/analysis.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "ladder/metrics.hpp"

namespace ladder {

std::pair<double, double> sd_last_n(std::span<const double> series, int n) {
  if (n < 1) throw std::invalid_argument("sd_last_n: n must be >= 1");
  std::size_t take = std::min<std::size_t>(series.size(), static_cast<std::size_t>(n));
  if (take < 2) throw std::invalid_argument("sd_last_n: need at least 2 of the last n");
  auto tail = series.subspan(series.size() - take);
  auto [lo, hi] = std::minmax_element(tail.begin(), tail.end());
  if (*lo == *hi) {
    // constant tail: avoid rounding noise from the mean accumulation
    if (*lo == 0.0)
      throw std::invalid_argument("sd_last_n: relative SD undefined for zero mean");
    return {0.0, 0.0};
  }
  double mean = 0.0;
  for (double v : tail) mean += v;
  mean /= static_cast<double>(take);
  double ss = 0.0;
  for (double v : tail) ss += (v - mean) * (v - mean);
  double sd = std::sqrt(ss / static_cast<double>(take - 1));
  if (mean == 0.0)
    throw std::invalid_argument("sd_last_n: relative SD undefined for zero mean");
  return {sd, sd / mean * 100.0};
}

std::pair<double, double> pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 3)
    throw std::invalid_argument("pearson: need equal lengths >= 3");
  double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0)
    throw std::invalid_argument("pearson: zero variance input");
  double r = sxy / std::sqrt(sxx * syy);
  double df = n - 2.0;
  double p;
  if (std::abs(r) >= 1.0) {
    p = 0.0;
  } else {
    double t = r * std::sqrt(df / (1.0 - r * r));
    boost::math::students_t dist(df);
    p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
  }
  return {r, p};
}

namespace {

struct Run {
  std::string model_id;
  double n = 0.0;
  double d_final = 0.0;
  std::vector<CheckpointRecord> records;
};

std::vector<Run> group_by_model(std::span<const CheckpointRecord> records) {
  std::vector<Run> runs;
  std::map<std::string, std::size_t> index;
  for (const auto& r : records) {
    auto it = index.find(r.model_id);
    if (it == index.end()) {
      it = index.emplace(r.model_id, runs.size()).first;
      runs.push_back(Run{r.model_id, static_cast<double>(r.n_params), 0.0, {}});
    }
    Run& run = runs[it->second];
    run.records.push_back(r);
    run.d_final = std::max(run.d_final, static_cast<double>(r.tokens_seen));
  }
  for (auto& run : runs)
    std::stable_sort(run.records.begin(), run.records.end(),
                     [](const auto& a, const auto& b) { return a.step < b.step; });
  return runs;
}

AblationPoint evaluate_prefix(std::span<const CheckpointRecord> records,
                              const std::vector<const Run*>& prefix,
                              const PredictionTarget& target, const FitConfig& cfg) {
  // pool in original record order so the full prefix reproduces the
  // unablated pipeline exactly
  std::set<std::string> included;
  for (const Run* run : prefix) included.insert(run->model_id);
  std::vector<CheckpointRecord> pooled;
  for (const auto& r : records)
    if (included.count(r.model_id)) pooled.push_back(r);

  AblationPoint pt;
  for (const Run* run : prefix) {
    pt.models_included.push_back(run->model_id);
    pt.cumulative_flops += 6.0 * run->n * run->d_final;
  }
  Step1Fit s1 = fit_step1(pooled, cfg);
  Step2Fit s2 = fit_step2(pooled, cfg);
  auto [loss, acc] = chain_predict(s1, s2, target.n, target.d);
  pt.step1_rel_err = relative_error(loss, target.actual_loss);
  pt.step2_rel_err =
      relative_error(eval_sigmoid(s2.params, target.actual_loss), target.actual_acc);
  pt.chained_rel_err = relative_error(acc, target.actual_acc);
  return pt;
}

std::vector<AblationPoint> sweep(std::span<const CheckpointRecord> records,
                                 const std::vector<std::vector<const Run*>>& prefixes,
                                 const PredictionTarget& target, const FitConfig& cfg,
                                 std::vector<std::string>* notes) {
  std::vector<AblationPoint> out;
  for (const auto& prefix : prefixes) {
    if (prefix.size() < 5) {
      if (notes)
        notes->push_back("skipped prefix of " + std::to_string(prefix.size()) +
                         " models (underdetermined)");
      continue;
    }
    try {
      out.push_back(evaluate_prefix(records, prefix, target, cfg));
    } catch (const std::exception& e) {
      if (notes)
        notes->push_back("skipped prefix of " + std::to_string(prefix.size()) +
                         " models: " + e.what());
    }
  }
  return out;
}

} // namespace

VarianceReport variance_report(std::span<const CheckpointRecord> records,
                               const std::string& task, int n) {
  auto runs = group_by_model(records);
  if (runs.empty()) throw std::invalid_argument("variance_report: no records");
  const Run* biggest = &runs[0];
  for (const auto& run : runs)
    if (6.0 * run.n * run.d_final > 6.0 * biggest->n * biggest->d_final) biggest = &run;

  std::vector<double> loss, acc;
  for (const auto& r : biggest->records) {
    loss.push_back(r.loss);
    if (r.accuracy) acc.push_back(*r.accuracy);
  }
  VarianceReport rep;
  rep.task = task;
  rep.n_checkpoints = static_cast<int>(std::min<std::size_t>(loss.size(),
                                                             static_cast<std::size_t>(n)));
  std::tie(rep.loss_sd_n, rep.loss_rel_sd_n) = sd_last_n(loss, n);
  if (acc.size() >= 2)
    std::tie(rep.acc_sd_n, rep.acc_rel_sd_n) = sd_last_n(acc, n);
  return rep;
}

std::vector<AblationPoint> ablate_by_flops(std::span<const CheckpointRecord> records,
                                           const PredictionTarget& target,
                                           const FitConfig& cfg,
                                           std::vector<std::string>* notes) {
  auto runs = group_by_model(records);
  std::vector<const Run*> ordered;
  for (const auto& run : runs) ordered.push_back(&run);
  std::stable_sort(ordered.begin(), ordered.end(), [](const Run* a, const Run* b) {
    return a->n * a->d_final < b->n * b->d_final;
  });

  std::vector<std::vector<const Run*>> prefixes;
  for (std::size_t k = 1; k <= ordered.size(); ++k)
    prefixes.emplace_back(ordered.begin(), ordered.begin() + static_cast<std::ptrdiff_t>(k));
  return sweep(records, prefixes, target, cfg, notes);
}

std::vector<AblationPoint> ablate_by_axis(std::span<const CheckpointRecord> records,
                                          AblationAxis axis,
                                          const PredictionTarget& target,
                                          const FitConfig& cfg,
                                          std::vector<std::string>* notes) {
  auto runs = group_by_model(records);
  auto key = [&](const Run& run) {
    if (axis == AblationAxis::model_size) return run.n;
    return run.d_final / (20.0 * run.n); // Chinchilla multiplier
  };
  std::vector<double> cuts;
  for (const auto& run : runs) cuts.push_back(key(run));
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [](double a, double b) { return std::abs(a - b) < 1e-6 * std::max(a, b); }),
             cuts.end());

  std::vector<std::vector<const Run*>> prefixes;
  for (double cut : cuts) {
    std::vector<const Run*> prefix;
    for (const auto& run : runs)
      if (key(run) <= cut * (1.0 + 1e-9)) prefix.push_back(&run);
    prefixes.push_back(std::move(prefix));
  }
  return sweep(records, prefixes, target, cfg, notes);
}

} // namespace ladder
