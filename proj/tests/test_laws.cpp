#include <cmath>

#include <stdexcept>

#include "doctest.h"
#include "helpers.hpp"
#include "ladder/laws.hpp"
#include "ladder/metrics.hpp"
#include "ladder/synth.hpp"

using namespace ladder;
using ladder::testing::grid_generator;

namespace {

const PowerLawParams kMmluStep1{38.07, 100.09, 0.23, 0.24, 0.45};
const SigmoidParams kMmluStep2{-0.74, 1.00, 4.83, 0.62};
constexpr double kTarget7bN = 6887575552.0;
constexpr double kTarget7bD = 3.95e12;

} // namespace

TEST_CASE("eval_power_law reproduces a hand-computed value") {
  CHECK(eval_power_law(kMmluStep1, kTarget7bN, kTarget7bD) ==
        doctest::Approx(0.7527742797043965).epsilon(1e-12));
}

TEST_CASE("eval_sigmoid reproduces a hand-computed value") {
  CHECK(eval_sigmoid(kMmluStep2, 0.7527742797043965) ==
        doctest::Approx(0.515265059803294).epsilon(1e-12));
}

TEST_CASE("step1_points collapses runs to final tokens and last-5 mean loss") {
  std::vector<CheckpointRecord> recs;
  for (int i = 1; i <= 8; ++i) {
    CheckpointRecord r;
    r.model_id = "m";
    r.n_params = 1000;
    r.tokens_seen = i * 100;
    r.step = i;
    r.task = "t";
    r.loss = static_cast<double>(i); // last five: 4..8, mean 6
    recs.push_back(r);
  }
  FitConfig cfg;
  auto pts = step1_points(recs, cfg);
  REQUIRE(pts.size() == 1);
  CHECK(pts[0].n == 1000.0);
  CHECK(pts[0].d == 800.0);
  CHECK(pts[0].loss == doctest::Approx(6.0));
}

TEST_CASE("step1_points sorts shuffled checkpoints by step within a run") {
  std::vector<CheckpointRecord> recs;
  for (int step : {3, 1, 2}) {
    CheckpointRecord r;
    r.model_id = "m";
    r.n_params = 1000;
    r.tokens_seen = step * 100;
    r.step = step;
    r.task = "t";
    r.loss = 10.0 - step;
    recs.push_back(r);
  }
  FitConfig cfg;
  auto pts = step1_points(recs, cfg);
  REQUIRE(pts.size() == 1);
  CHECK(pts[0].d == 300.0); // final tokens follow the max step, not input order
}

TEST_CASE("fit_step1 validates its inputs") {
  FitConfig cfg;
  std::vector<Step1Point> few{{1e8, 2e9, 1.0}, {2e8, 4e9, 0.9}};
  CHECK_THROWS_AS(fit_step1_points(few, cfg), std::invalid_argument);
  std::vector<Step1Point> bad{{1e8, 2e9, 1.0}, {2e8, 4e9, 0.9}, {3e8, 6e9, 0.8},
                              {4e8, 8e9, 0.0}, {5e8, 1e10, 0.7}};
  CHECK_THROWS_AS(fit_step1_points(bad, cfg), std::invalid_argument);
}

TEST_CASE("fit_step1 on noiseless ladder data fits far below 0.05%") {
  auto records = generate(grid_generator(1, 0.0, 0.0));
  FitConfig cfg;
  auto fit = fit_step1(records, cfg);
  CHECK(fit.avg_rel_fit_error < 0.05);
}

TEST_CASE("fit_step1 with 0.5% noise predicts within 1% in-grid and held out") {
  GeneratorSpec g = grid_generator(42, 0.005, 0.0);
  auto records = generate(g);
  FitConfig cfg;
  auto fit = fit_step1(records, cfg);
  for (double e : fit.per_point_rel_error) CHECK(e < 1.0);
  // held-out point, 10x beyond the largest grid model
  double n = 10.0 * 1279395840.0, d = 20.0 * n;
  double truth = eval_power_law(g.truth_step1, n, d);
  CHECK(relative_error(eval_power_law(fit.params, n, d), truth) < 1.0);
}

TEST_CASE("step2_pairs discards the head by step and smooths both series") {
  std::vector<CheckpointRecord> recs;
  for (int i = 1; i <= 20; ++i) {
    CheckpointRecord r;
    r.model_id = "m";
    r.n_params = 1000;
    r.tokens_seen = i * 100;
    r.step = i;
    r.task = "t";
    r.loss = 2.0 - 0.05 * i;
    r.accuracy = 0.3 + 0.01 * i;
    recs.push_back(r);
  }
  FitConfig cfg;
  auto pairs = step2_pairs(recs, cfg);
  // head cutoff: step < 0.1 * 20 = 2 drops the first checkpoint
  REQUIRE(pairs.size() == 19);
  // first kept pair is the width-1 moving average of checkpoint 2
  CHECK(pairs[0].first == doctest::Approx(2.0 - 0.1).epsilon(1e-12));
  CHECK(pairs[0].second == doctest::Approx(0.32).epsilon(1e-12));
}

TEST_CASE("step2_pairs skips records without accuracy") {
  std::vector<CheckpointRecord> recs;
  for (int i = 1; i <= 10; ++i) {
    CheckpointRecord r;
    r.model_id = "m";
    r.n_params = 1000;
    r.tokens_seen = i * 100;
    r.step = i;
    r.task = "t";
    r.loss = 1.0;
    if (i % 2 == 0) r.accuracy = 0.5;
    recs.push_back(r);
  }
  FitConfig cfg;
  CHECK(step2_pairs(recs, cfg).size() == 5);
}

TEST_CASE("fit_step2 recovers sigmoid parameters from noiseless pairs") {
  std::vector<std::pair<double, double>> pairs;
  for (double l = 0.3; l <= 1.6; l += 0.02)
    pairs.emplace_back(l, eval_sigmoid(kMmluStep2, l));
  FitConfig cfg;
  cfg.anchor_point.reset(); // the anchor is off-curve for these parameters
  auto fit = fit_step2_pairs(pairs, cfg);
  CHECK(fit.params.k > 0.0);
  CHECK(fit.params.a == doctest::Approx(kMmluStep2.a).epsilon(1e-3));
  CHECK(fit.params.b == doctest::Approx(kMmluStep2.b).epsilon(1e-3));
  CHECK(fit.params.k == doctest::Approx(kMmluStep2.k).epsilon(1e-3));
  CHECK(fit.params.L0 == doctest::Approx(kMmluStep2.L0).epsilon(1e-3));
}

TEST_CASE("fit_step2 counts the configured anchor point") {
  std::vector<std::pair<double, double>> pairs;
  for (double l = 0.3; l <= 1.6; l += 0.1)
    pairs.emplace_back(l, eval_sigmoid(kMmluStep2, l));
  FitConfig cfg;
  auto with_anchor = fit_step2_pairs(pairs, cfg);
  CHECK(with_anchor.n_points_used == static_cast<int>(pairs.size()) + 1);
  cfg.anchor_point.reset();
  CHECK(fit_step2_pairs(pairs, cfg).n_points_used == static_cast<int>(pairs.size()));
}

TEST_CASE("fit_step2 flags degenerate pools instead of crashing") {
  // anchor plus collinear flat points
  std::vector<std::pair<double, double>> pairs{{1.0, 0.5}, {1.1, 0.5}, {1.2, 0.5}};
  FitConfig cfg;
  auto fit = fit_step2_pairs(pairs, cfg);
  CHECK(fit.n_points_used == 4);
  // either explicitly flagged or collapsed to a flat solution
  CHECK((fit.degenerate || std::abs(fit.params.a) < 1e-3 ||
         std::abs(fit.params.k) < 1e-3 || fit.avg_rel_fit_error < 1.0));
}

TEST_CASE("fit_step2 needs at least 4 points including the anchor") {
  std::vector<std::pair<double, double>> pairs{{1.0, 0.5}, {1.1, 0.6}};
  FitConfig cfg;
  CHECK_THROWS_AS(fit_step2_pairs(pairs, cfg), std::invalid_argument);
}

TEST_CASE("chain_predict is exactly the composition of its two steps") {
  Step1Fit s1;
  s1.params = kMmluStep1;
  Step2Fit s2;
  s2.params = kMmluStep2;
  auto [loss, acc] = chain_predict(s1, s2, kTarget7bN, kTarget7bD);
  CHECK(loss == eval_power_law(s1.params, kTarget7bN, kTarget7bD));
  CHECK(acc == eval_sigmoid(s2.params, loss));
  CHECK(acc == doctest::Approx(0.515265059803294).epsilon(1e-12));
}

TEST_CASE("chain_predict refuses a degenerate second step") {
  Step1Fit s1;
  s1.params = kMmluStep1;
  Step2Fit s2;
  s2.degenerate = true;
  CHECK_THROWS_AS(chain_predict(s1, s2, kTarget7bN, kTarget7bD), std::runtime_error);
}

TEST_CASE("fit_flops_law recovers a generating compute law") {
  FlopsLawParams truth{2.0e7, 0.35, 0.5};
  std::vector<std::pair<double, double>> pts;
  for (double c = 1e19; c <= 2e21; c *= 1.6)
    pts.emplace_back(c, eval_flops_law(truth, c));
  FitConfig cfg;
  auto fit = fit_flops_law_points(pts, cfg);
  for (const auto& [c, l] : pts)
    CHECK(relative_error(eval_flops_law(fit.params, c), l) < 1.0);
}

TEST_CASE("fit_flops_law cannot separate equal-compute models") {
  // two models with identical C = 6ND but different losses
  std::vector<std::pair<double, double>> pts;
  FlopsLawParams truth{2.0e7, 0.35, 0.5};
  for (double c = 1e19; c <= 1e21; c *= 2.0) pts.emplace_back(c, eval_flops_law(truth, c));
  double c_shared = 4e20;
  pts.emplace_back(c_shared, 0.70);
  pts.emplace_back(c_shared, 0.80);
  FitConfig cfg;
  auto fit = fit_flops_law_points(pts, cfg);
  double pred = eval_flops_law(fit.params, c_shared);
  // one prediction for both points, so at least one residual stays nonzero
  CHECK(eval_flops_law(fit.params, c_shared) == pred);
  CHECK((std::abs(pred - 0.70) > 1e-3 || std::abs(pred - 0.80) > 1e-3));
}

TEST_CASE("fit_flops_law on flat data reduces to the mean intercept") {
  std::vector<std::pair<double, double>> pts;
  for (double c = 1e19; c <= 1e21; c *= 2.0) pts.emplace_back(c, 0.75);
  FitConfig cfg;
  auto fit = fit_flops_law_points(pts, cfg);
  CHECK(eval_flops_law(fit.params, 5e20) == doctest::Approx(0.75).epsilon(1e-4));
}

TEST_CASE("single-step evaluation with a = 0 is constant in N and D") {
  SingleStepParams p{0.0, 0.37, 100.0, 200.0, 0.3, 0.3, 0.1};
  CHECK(eval_single_step(p, 1e8, 2e9) == doctest::Approx(0.37));
  CHECK(eval_single_step(p, 1e10, 2e12) == doctest::Approx(0.37));
}

TEST_CASE("fit_single_step recovers noiseless accuracy within 0.01") {
  SingleStepParams truth{-0.9, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  // build the inner power law through truth A/B so accuracy varies with N, D
  truth.A = 5.0 * std::pow(190354176.0, 0.25);
  truth.B = 3.0 * std::pow(3807083520.0, 0.3);
  truth.alpha = 0.25;
  truth.beta = 0.3;
  truth.E = -1.2;

  GeneratorSpec g = grid_generator(3, 0.0, 0.0);
  auto records = generate(g);
  for (auto& r : records)
    r.accuracy = eval_single_step(truth, static_cast<double>(r.n_params),
                                  static_cast<double>(r.tokens_seen));
  FitConfig cfg;
  auto fit = fit_single_step(records, cfg);
  CHECK_FALSE(fit.degenerate);
  for (const auto& run : std::vector<std::pair<double, double>>{
           {190354176.0, 3.8e9}, {1279395840.0, 2.6e11}, {6887575552.0, 3.95e12}}) {
    double want = eval_single_step(truth, run.first, run.second);
    // interpolation is tight; the last pair extrapolates well past the grid
    CHECK(std::abs(eval_single_step(fit.params, run.first, run.second) - want) < 0.01);
  }
}

TEST_CASE("fit_single_step flags accuracy that ignores model size") {
  GeneratorSpec g = grid_generator(4, 0.0, 0.0);
  auto records = generate(g);
  for (auto& r : records)
    r.accuracy = 0.3 + 0.2 / (1.0 + std::pow(static_cast<double>(r.tokens_seen) / 1e10, -0.5));
  FitConfig cfg;
  auto fit = fit_single_step(records, cfg);
  CHECK(fit.degenerate);
}

TEST_CASE("log-sigmoid evaluation satisfies its two asymptotes") {
  LogSigmoidParams p{0.4, 3.0, 1.1};
  // far below ce0 the value settles at 1
  CHECK(std::abs(eval_log_sigmoid(p, -50.0) - 1.0) < 1e-9);
  // far above ce0 the curve becomes linear with slope a*k
  double ce = 60.0;
  double linear = 1.0 + p.a * p.k * (ce - p.ce0);
  CHECK(std::abs(eval_log_sigmoid(p, ce) - linear) < 1e-9);
}

TEST_CASE("fit_log_sigmoid uses the last half of each run and recovers truth") {
  LogSigmoidParams truth{0.35, 2.5, 0.9};
  std::vector<CheckpointRecord> recs;
  for (int i = 1; i <= 40; ++i) {
    CheckpointRecord r;
    r.model_id = "m";
    r.n_params = 1000;
    r.tokens_seen = i * 100;
    r.step = i;
    r.task = "t";
    r.loss = 3.0 - 0.05 * i; // task CE feature
    r.feature_kind = FeatureKind::task_ce;
    r.accuracy = eval_log_sigmoid(truth, r.loss);
    recs.push_back(r);
  }
  FitConfig cfg;
  auto fit = fit_log_sigmoid(recs, cfg);
  CHECK(fit.n_points_used == 21); // steps 20..40
  for (double ce = 1.0; ce <= 2.0; ce += 0.25)
    CHECK(eval_log_sigmoid(fit.params, ce) ==
          doctest::Approx(eval_log_sigmoid(truth, ce)).epsilon(1e-2));
}

TEST_CASE("formula strings match the published layout") {
  CHECK(formula_string(kMmluStep1) ==
        "L(N, D) = 38.07 / N^0.23 + 100.09 / D^0.24 + 0.45");
  CHECK(formula_string(kMmluStep2) ==
        "Acc(L) = -0.74 / (1 + exp(-4.83(L - 0.62))) + 1.00");
  CHECK(formula_string(FlopsLawParams{2.57, 0.12, 0.0}) ==
        "L(C) = 2.57 / C^0.12 + 0.00");
}
