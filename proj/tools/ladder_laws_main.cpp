#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ladder/analysis.hpp"
#include "ladder/curves.hpp"
#include "ladder/io.hpp"
#include "ladder/laws.hpp"
#include "ladder/metrics.hpp"
#include "ladder/plot.hpp"
#include "ladder/synth.hpp"
#include "ladder/types.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ladder;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitDegenerate = 3;

struct CliError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int thread_cap() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw < 1) hw = 1;
  if (const char* env = std::getenv("LADDER_LAWS_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) return std::min(v, hw);
  }
  return hw;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(thread_cap()), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<std::size_t> next{0};
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  for (auto& t : pool) t.join();
}

struct CommonOpts {
  std::vector<std::string> record_paths;
  std::string tasks_csv;
  std::string variant = "two_step_bpb";
  std::vector<std::string> target_strs;
  std::string out_dir;
  std::string presets_path;
  bool strict = false;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool need_records = true) {
  auto* rec = cmd->add_option("--records", o.record_paths, "checkpoint JSONL path");
  if (need_records) rec->required();
  cmd->add_option("--tasks", o.tasks_csv, "comma-separated task filter");
  cmd->add_option("--variant", o.variant, "prediction variant")
      ->check(CLI::IsMember(
          {"two_step_bpb", "flops", "task_ce", "lm_loss", "single_step"}));
  cmd->add_option("--target", o.target_strs,
                  "name:N:D[:actual_loss:actual_acc] or preset name");
  cmd->add_option("--out", o.out_dir, "output directory");
  cmd->add_option("--presets", o.presets_path, "presets JSON path");
  cmd->add_flag("--strict", o.strict, "degenerate fits exit nonzero");
}

std::vector<CheckpointRecord> load_records(const CommonOpts& o) {
  std::vector<CheckpointRecord> all;
  for (const auto& path : o.record_paths) {
    auto part = read_records_jsonl(path, o.strict);
    all.insert(all.end(), part.begin(), part.end());
  }
  auto violations = validate_records(all);
  if (!violations.empty()) {
    std::ostringstream msg;
    msg << violations.size() << " invalid record(s); first: record "
        << violations[0].record_index << ": " << violations[0].reason;
    throw CliError(msg.str());
  }
  return all;
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<std::string> task_list(const CommonOpts& o,
                                   std::span<const CheckpointRecord> records) {
  std::vector<std::string> tasks;
  if (!o.tasks_csv.empty()) {
    tasks = split_csv(o.tasks_csv);
    std::set<std::string> present;
    for (const auto& r : records) present.insert(r.task);
    for (const auto& t : tasks)
      if (!present.count(t)) throw CliError("no records for task '" + t + "'");
    return tasks;
  }
  for (const auto& r : records)
    if (std::find(tasks.begin(), tasks.end(), r.task) == tasks.end())
      tasks.push_back(r.task);
  if (tasks.empty()) throw CliError("no records loaded");
  return tasks;
}

std::vector<CheckpointRecord> filter_task(std::span<const CheckpointRecord> records,
                                          const std::string& task,
                                          std::optional<FeatureKind> kind) {
  std::vector<CheckpointRecord> out;
  for (const auto& r : records)
    if (r.task == task && (!kind || r.feature_kind == *kind)) out.push_back(r);
  return out;
}

std::optional<FeatureKind> variant_feature(const std::string& variant) {
  if (variant == "task_ce") return FeatureKind::task_ce;
  if (variant == "lm_loss") return FeatureKind::lm_loss;
  if (variant == "flops" || variant == "two_step_bpb" || variant == "single_step")
    return FeatureKind::bpb_correct;
  return std::nullopt;
}

TargetSpec parse_target(const std::string& s, const std::string& presets_path) {
  auto parts = split_csv([&] {
    std::string t = s;
    std::replace(t.begin(), t.end(), ':', ',');
    return t;
  }());
  if (parts.size() == 1) {
    if (presets_path.empty())
      throw CliError("bare target '" + s + "' needs --presets");
    for (const auto& t : load_presets(presets_path).targets)
      if (t.name == parts[0]) return t;
    throw CliError("target '" + s + "' not found in presets");
  }
  if (parts.size() != 3 && parts.size() != 5)
    throw CliError("target '" + s + "': expected name:N:D[:actual_loss:actual_acc]");
  TargetSpec t;
  t.name = parts[0];
  try {
    t.n_params = std::stoll(parts[1]);
    t.tokens = std::stoll(parts[2]);
    if (parts.size() == 5) {
      t.actual_loss = std::stod(parts[3]);
      t.actual_acc = std::stod(parts[4]);
    }
  } catch (const std::exception&) {
    throw CliError("target '" + s + "': numeric field unparsable");
  }
  if (t.n_params <= 0 || t.tokens <= 0)
    throw CliError("target '" + s + "': N and D must be positive");
  return t;
}

void ensure_out(const std::string& dir) {
  if (!dir.empty()) fs::create_directories(dir);
}

json power_law_json(const PowerLawParams& p) {
  return {{"A", p.A}, {"B", p.B}, {"alpha", p.alpha}, {"beta", p.beta}, {"E", p.E}};
}

json sigmoid_json(const SigmoidParams& p) {
  return {{"a", p.a}, {"b", p.b}, {"k", p.k}, {"L0", p.L0}};
}

MarkerShape marker_for_multiplier(double mult) {
  if (mult < 1.5) return MarkerShape::square;
  if (mult < 3.5) return MarkerShape::plus;
  if (mult < 7.5) return MarkerShape::pentagon;
  return MarkerShape::star;
}

void emit_fit_plot(const std::string& dir, const std::string& task,
                   std::span<const CheckpointRecord> records, const Step1Fit& s1) {
  std::map<std::string, PlotSeries> by_mult;
  double d_min = 0, d_max = 0;
  std::map<double, std::set<double>> n_by_series;
  for (const auto& r : records) {
    double mult = static_cast<double>(r.tokens_seen) /
                  (20.0 * static_cast<double>(r.n_params));
    double bucket = mult < 1.5 ? 1 : mult < 3.5 ? 2 : mult < 7.5 ? 5 : 10;
    std::string name = format_sig4(bucket) + "xC";
    auto& series = by_mult[name];
    series.name = name;
    series.marker = marker_for_multiplier(bucket);
    series.points.emplace_back(static_cast<double>(r.tokens_seen), r.loss);
    if (d_min == 0 || r.tokens_seen < d_min) d_min = static_cast<double>(r.tokens_seen);
    d_max = std::max(d_max, static_cast<double>(r.tokens_seen));
    n_by_series[bucket].insert(static_cast<double>(r.n_params));
  }
  std::vector<PlotSeries> series;
  for (auto& [_, s] : by_mult) series.push_back(std::move(s));

  std::set<double> sizes;
  for (const auto& r : records) sizes.insert(static_cast<double>(r.n_params));
  for (double n : sizes) {
    PlotSeries fitline;
    fitline.name = "fit N=" + format_sig4(n);
    fitline.fit_line = true;
    for (int i = 0; i <= 40; ++i) {
      double d = d_min * std::pow(d_max / d_min, i / 40.0);
      fitline.points.emplace_back(d, eval_power_law(s1.params, n, d));
    }
    series.push_back(std::move(fitline));
  }
  emit_plot(dir + "/fit_" + task + "_loss_vs_tokens.svg", PlotKind::loss_vs_tokens,
            series, task + " loss", "tokens", "loss");
}

int cmd_fit(const CommonOpts& o) {
  auto records = load_records(o);
  auto tasks = task_list(o, records);
  ensure_out(o.out_dir);
  auto kind = variant_feature(o.variant);

  struct TaskOut {
    json j;
    std::string text;
    bool degenerate = false;
  };
  std::vector<TaskOut> outs(tasks.size());
  std::vector<std::string> errors(tasks.size());

  FitConfig cfg;
  parallel_for(tasks.size(), [&](std::size_t i) {
    try {
      const std::string& task = tasks[i];
      auto recs = filter_task(records, task, kind);
      if (recs.empty()) throw CliError("no records for task '" + task + "'");
      TaskOut& out = outs[i];
      out.j["task"] = task;
      out.j["variant"] = o.variant;
      std::ostringstream text;
      if (o.variant == "two_step_bpb" || o.variant == "lm_loss") {
        Step1Fit s1 = fit_step1(recs, cfg);
        Step2Fit s2 = fit_step2(recs, cfg);
        out.j["step1"] = power_law_json(s1.params);
        out.j["step1_avg_rel_fit_error"] = s1.avg_rel_fit_error;
        out.j["step2"] = sigmoid_json(s2.params);
        out.j["step2_avg_rel_fit_error"] = s2.avg_rel_fit_error;
        out.j["step2_degenerate"] = s2.degenerate;
        out.degenerate = s2.degenerate;
        text << task << ": " << formula_string(s1.params) << '\n';
        text << task << ": " << formula_string(s2.params) << '\n';
        if (!o.out_dir.empty()) emit_fit_plot(o.out_dir, task, recs, s1);
      } else if (o.variant == "flops") {
        FlopsLawFit f = fit_flops_law(recs, cfg);
        Step2Fit s2 = fit_step2(recs, cfg);
        out.j["flops_law"] = {{"A", f.params.A}, {"alpha", f.params.alpha},
                              {"E", f.params.E}};
        out.j["flops_avg_rel_fit_error"] = f.avg_rel_fit_error;
        out.j["step2"] = sigmoid_json(s2.params);
        out.j["step2_degenerate"] = s2.degenerate;
        out.degenerate = s2.degenerate;
        text << task << ": " << formula_string(f.params) << '\n';
        text << task << ": " << formula_string(s2.params) << '\n';
      } else if (o.variant == "task_ce") {
        Step1Fit s1 = fit_step1(recs, cfg);
        LogSigmoidFit ls = fit_log_sigmoid(recs, cfg);
        out.j["step1"] = power_law_json(s1.params);
        out.j["log_sigmoid"] = {{"a", ls.params.a}, {"k", ls.params.k},
                                {"ce0", ls.params.ce0}};
        out.j["log_sigmoid_degenerate"] = ls.degenerate;
        out.degenerate = ls.degenerate;
        text << task << ": " << formula_string(s1.params) << '\n';
      } else { // single_step
        SingleStepFit ss = fit_single_step(recs, cfg);
        out.j["single_step"] = {{"a", ss.params.a},     {"b", ss.params.b},
                                {"A", ss.params.A},     {"B", ss.params.B},
                                {"alpha", ss.params.alpha},
                                {"beta", ss.params.beta}, {"E", ss.params.E}};
        out.j["single_step_degenerate"] = ss.degenerate;
        out.degenerate = ss.degenerate;
      }
      out.text = text.str();
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });

  bool any_degenerate = false;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (!errors[i].empty()) throw CliError(tasks[i] + ": " + errors[i]);
    std::cout << outs[i].text;
    if (outs[i].degenerate) {
      any_degenerate = true;
      std::cerr << "warning: degenerate fit for task '" << tasks[i] << "'\n";
    }
    if (!o.out_dir.empty()) {
      std::ofstream f(o.out_dir + "/fit_" + tasks[i] + "_" + o.variant + ".json");
      f << outs[i].j.dump(2) << '\n';
    }
  }
  return any_degenerate && o.strict ? kExitDegenerate : kExitOk;
}

struct Prediction {
  std::optional<double> loss;
  double acc = 0.0;
  bool degenerate = false;
};

Prediction predict_one(const std::string& variant,
                       std::span<const CheckpointRecord> recs, const FitConfig& cfg,
                       const TargetSpec& target) {
  Prediction p;
  double n = static_cast<double>(target.n_params);
  double d = static_cast<double>(target.tokens);
  if (variant == "two_step_bpb" || variant == "lm_loss") {
    Step1Fit s1 = fit_step1(recs, cfg);
    Step2Fit s2 = fit_step2(recs, cfg);
    p.degenerate = s2.degenerate;
    auto [loss, acc] = chain_predict(s1, s2, n, d);
    p.loss = loss;
    p.acc = acc;
  } else if (variant == "flops") {
    FlopsLawFit f = fit_flops_law(recs, cfg);
    Step2Fit s2 = fit_step2(recs, cfg);
    p.degenerate = s2.degenerate;
    double loss = eval_flops_law(f.params, compute_flops(target.n_params, target.tokens));
    p.loss = loss;
    p.acc = eval_sigmoid(s2.params, loss);
  } else if (variant == "task_ce") {
    Step1Fit s1 = fit_step1(recs, cfg);
    LogSigmoidFit ls = fit_log_sigmoid(recs, cfg);
    p.degenerate = ls.degenerate;
    double ce = eval_power_law(s1.params, n, d);
    p.loss = ce;
    p.acc = eval_log_sigmoid(ls.params, ce);
  } else { // single_step
    SingleStepFit ss = fit_single_step(recs, cfg);
    p.degenerate = ss.degenerate;
    p.acc = eval_single_step(ss.params, n, d);
  }
  return p;
}

int cmd_predict(const CommonOpts& o) {
  if (o.target_strs.empty()) throw CliError("predict needs at least one --target");
  std::vector<TargetSpec> targets;
  for (const auto& s : o.target_strs) targets.push_back(parse_target(s, o.presets_path));

  auto records = load_records(o);
  auto tasks = task_list(o, records);
  ensure_out(o.out_dir);
  auto kind = variant_feature(o.variant);
  FitConfig cfg;

  struct Cell {
    Prediction pred;
    std::optional<double> actual;
  };
  std::vector<std::vector<Cell>> table(tasks.size(),
                                       std::vector<Cell>(targets.size()));
  std::vector<std::string> errors(tasks.size());
  parallel_for(tasks.size(), [&](std::size_t i) {
    try {
      auto recs = filter_task(records, tasks[i], kind);
      if (recs.empty()) throw CliError("no records for task '" + tasks[i] + "'");
      for (std::size_t t = 0; t < targets.size(); ++t) {
        table[i][t].pred = predict_one(o.variant, recs, cfg, targets[t]);
        table[i][t].actual = targets[t].actual_acc;
      }
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < tasks.size(); ++i)
    if (!errors[i].empty()) throw CliError(tasks[i] + ": " + errors[i]);

  std::vector<std::string> header{"Task"};
  for (const auto& t : targets) {
    header.push_back(t.name + " Pred");
    header.push_back(t.name + " Actual");
    header.push_back(t.name + " Error");
    header.push_back(t.name + " %Error");
  }
  std::vector<std::vector<std::string>> rows;
  std::vector<double> abs_err_sum(targets.size(), 0.0), rel_err_sum(targets.size(), 0.0);
  std::vector<int> err_count(targets.size(), 0);
  bool any_degenerate = false;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    std::vector<std::string> row{tasks[i]};
    for (std::size_t t = 0; t < targets.size(); ++t) {
      const Cell& c = table[i][t];
      any_degenerate = any_degenerate || c.pred.degenerate;
      row.push_back(format_sig4(c.pred.acc));
      if (c.actual) {
        double err = std::abs(c.pred.acc - *c.actual);
        double rel = relative_error(c.pred.acc, *c.actual);
        row.push_back(format_sig4(*c.actual));
        row.push_back(format_sig4(err));
        row.push_back(format_sig4(rel));
        abs_err_sum[t] += err;
        rel_err_sum[t] += rel;
        ++err_count[t];
      } else {
        row.push_back("");
        row.push_back("");
        row.push_back("");
      }
    }
    rows.push_back(std::move(row));
  }
  std::vector<std::string> avg{"Average"};
  for (std::size_t t = 0; t < targets.size(); ++t) {
    avg.push_back("");
    avg.push_back("");
    if (err_count[t]) {
      avg.push_back(format_sig4(abs_err_sum[t] / err_count[t]));
      avg.push_back(format_sig4(rel_err_sum[t] / err_count[t]));
    } else {
      avg.push_back("");
      avg.push_back("");
    }
  }
  rows.push_back(std::move(avg));

  write_csv(std::cout, header, rows);
  if (!o.out_dir.empty()) {
    std::ofstream f(o.out_dir + "/predictions.csv");
    write_csv(f, header, rows);
  }

  if (any_degenerate) {
    std::cerr << "warning: at least one degenerate fit\n";
    if (o.strict) return kExitDegenerate;
  }
  return kExitOk;
}

int cmd_variance(const CommonOpts& o, int last_n) {
  auto records = load_records(o);
  auto tasks = task_list(o, records);
  ensure_out(o.out_dir);

  std::vector<VarianceReport> reports;
  for (const auto& task : tasks)
    reports.push_back(
        variance_report(filter_task(records, task, std::nullopt), task, last_n));

  double loss_mean = 0, acc_mean = 0;
  for (const auto& r : reports) {
    loss_mean += r.loss_rel_sd_n;
    acc_mean += r.acc_rel_sd_n;
  }
  loss_mean /= static_cast<double>(reports.size());
  acc_mean /= static_cast<double>(reports.size());

  std::vector<std::string> header{"Task",      "LossSD",       "LossRelSD%",
                                  "AccSD",     "AccRelSD%",    "LossAboveMean",
                                  "AccAboveMean"};
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : reports)
    rows.push_back({r.task, format_sig4(r.loss_sd_n), format_sig4(r.loss_rel_sd_n),
                    format_sig4(r.acc_sd_n), format_sig4(r.acc_rel_sd_n),
                    r.loss_rel_sd_n > loss_mean ? "1" : "0",
                    r.acc_rel_sd_n > acc_mean ? "1" : "0"});
  write_csv(std::cout, header, rows);
  if (!o.out_dir.empty()) {
    std::ofstream f(o.out_dir + "/variance.csv");
    write_csv(f, header, rows);
  }
  return kExitOk;
}

int cmd_ablate(const CommonOpts& o, const std::string& axis) {
  if (o.target_strs.size() != 1) throw CliError("ablate needs exactly one --target");
  TargetSpec tgt = parse_target(o.target_strs[0], o.presets_path);
  if (!tgt.actual_loss || !tgt.actual_acc)
    throw CliError("ablate target needs actual_loss and actual_acc");
  PredictionTarget target{static_cast<double>(tgt.n_params),
                          static_cast<double>(tgt.tokens), *tgt.actual_loss,
                          *tgt.actual_acc};

  auto records = load_records(o);
  auto tasks = task_list(o, records);
  if (tasks.size() != 1)
    throw CliError("ablate expects a single task; use --tasks to pick one");
  auto recs = filter_task(records, tasks[0], variant_feature(o.variant));
  ensure_out(o.out_dir);

  FitConfig cfg;
  std::vector<std::string> notes;
  std::vector<AblationPoint> points;
  if (axis == "flops")
    points = ablate_by_flops(recs, target, cfg, &notes);
  else
    points = ablate_by_axis(recs,
                            axis == "model_size" ? AblationAxis::model_size
                                                 : AblationAxis::chinchilla_mult,
                            target, cfg, &notes);

  for (const auto& n : notes) std::cerr << "note: " << n << '\n';
  std::vector<std::string> header{"NumModels", "CumulativeFLOPs", "Step1RelErr%",
                                  "Step2RelErr%", "ChainedRelErr%"};
  std::vector<std::vector<std::string>> rows;
  for (const auto& p : points)
    rows.push_back({std::to_string(p.models_included.size()),
                    format_sig4(p.cumulative_flops), format_sig4(p.step1_rel_err),
                    format_sig4(p.step2_rel_err), format_sig4(p.chained_rel_err)});
  write_csv(std::cout, header, rows);

  if (!o.out_dir.empty()) {
    std::ofstream f(o.out_dir + "/ablation_" + axis + ".csv");
    write_csv(f, header, rows);
    if (!points.empty()) {
      PlotSeries s;
      s.name = "chained error";
      s.marker = MarkerShape::square;
      for (const auto& p : points)
        s.points.emplace_back(p.cumulative_flops, p.chained_rel_err);
      std::vector<PlotSeries> series{std::move(s)};
      emit_plot(o.out_dir + "/ablation_" + axis + ".svg", PlotKind::error_vs_flops,
                series, tasks[0] + " ablation (" + axis + ")", "ladder FLOPs",
                "relative error %");
    }
  }
  return kExitOk;
}

int cmd_curve(const CommonOpts& o) {
  auto records = load_records(o);
  auto tasks = task_list(o, records);
  if (tasks.size() != 1)
    throw CliError("curve expects a single task; use --tasks to pick one");
  auto recs = filter_task(records, tasks[0], variant_feature(o.variant));
  ensure_out(o.out_dir);

  FitConfig cfg;
  CurveFit fit = fit_curve(recs, cfg);
  if (fit.f_unidentifiable)
    std::cerr << "warning: F unidentifiable (no spread in decayed LR fraction)\n";

  json j;
  j["task"] = tasks[0];
  j["base"] = power_law_json(fit.params.base);
  j["F"] = fit.params.F;
  j["f_unidentifiable"] = fit.f_unidentifiable;
  j["avg_rel_fit_error"] = fit.avg_rel_fit_error;
  std::cout << j.dump(2) << '\n';

  std::vector<std::string> header{"model_id", "step",   "tokens", "h",
                                  "actual",   "pred",   "rel_err%"};
  std::vector<std::vector<std::string>> rows;
  std::map<std::string, PlotSeries> actual_series, fit_series;
  for (const auto& r : recs) {
    if (!r.lr_state) continue;
    double h = std::clamp(
        (r.lr_state->peak_lr - r.lr_state->current_lr) / r.lr_state->peak_lr, 0.0, 1.0);
    double pred = eval_curve(fit.params, static_cast<double>(r.n_params),
                             static_cast<double>(r.tokens_seen), h);
    rows.push_back({r.model_id, std::to_string(r.step), format_sig4(
                        static_cast<double>(r.tokens_seen)),
                    format_sig4(h), format_sig4(r.loss), format_sig4(pred),
                    format_sig4(relative_error(pred, r.loss))});
    auto& as = actual_series[r.model_id];
    as.name = r.model_id;
    as.points.emplace_back(static_cast<double>(r.tokens_seen), r.loss);
    auto& fs = fit_series[r.model_id];
    fs.name = r.model_id + " fit";
    fs.fit_line = true;
    fs.points.emplace_back(static_cast<double>(r.tokens_seen), pred);
  }
  write_csv(std::cout, header, rows);
  if (!o.out_dir.empty()) {
    std::ofstream f(o.out_dir + "/curve_" + tasks[0] + ".csv");
    write_csv(f, header, rows);
    std::ofstream jf(o.out_dir + "/curve_" + tasks[0] + ".json");
    jf << j.dump(2) << '\n';
    std::vector<PlotSeries> series;
    for (auto& [_, s] : actual_series) series.push_back(std::move(s));
    for (auto& [_, s] : fit_series) series.push_back(std::move(s));
    emit_plot(o.out_dir + "/curve_" + tasks[0] + ".svg", PlotKind::curve_overlay,
              series, tasks[0] + " loss curves", "tokens", "loss");
  }
  return kExitOk;
}

int cmd_synth(const std::string& config_path, std::optional<std::uint64_t> seed,
              const std::string& out_file) {
  GeneratorSpec spec = read_generator_spec(config_path);
  if (seed) spec.seed = *seed;
  auto records = generate(spec);
  if (out_file.empty())
    write_records_jsonl(std::cout, records);
  else
    write_records_jsonl(out_file, records);
  return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Model-ladder scaling law fitting and task performance prediction"};
  app.require_subcommand(1);

  CommonOpts fit_o, pred_o, var_o, abl_o, curve_o;
  int last_n = 10;
  std::string ablate_axis = "flops";
  std::string synth_config, synth_out;
  std::optional<std::uint64_t> synth_seed;

  auto* fit_cmd = app.add_subcommand("fit", "fit scaling laws per task");
  add_common(fit_cmd, fit_o);

  auto* pred_cmd =
      app.add_subcommand("predict", "fit and predict target-model performance");
  add_common(pred_cmd, pred_o);
  pred_cmd->alias("chain");

  auto* var_cmd = app.add_subcommand("variance", "checkpoint-noise diagnostics");
  add_common(var_cmd, var_o);
  var_cmd->add_option("--last-n", last_n, "window of final checkpoints");

  auto* abl_cmd = app.add_subcommand("ablate", "prefix sweep of ladder inputs");
  add_common(abl_cmd, abl_o);
  abl_cmd->add_option("--axis", ablate_axis, "flops, model_size or chinchilla_mult")
      ->check(CLI::IsMember({"flops", "model_size", "chinchilla_mult"}));

  auto* curve_cmd = app.add_subcommand("curve", "intermediate loss-curve model");
  add_common(curve_cmd, curve_o);

  auto* synth_cmd = app.add_subcommand("synth", "generate synthetic ladder records");
  synth_cmd->add_option("--config", synth_config, "generator spec JSON")->required();
  synth_cmd->add_option("--seed", synth_seed, "seed override");
  synth_cmd->add_option("--out", synth_out, "output JSONL file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (fit_cmd->parsed()) return cmd_fit(fit_o);
    if (pred_cmd->parsed()) return cmd_predict(pred_o);
    if (var_cmd->parsed()) return cmd_variance(var_o, last_n);
    if (abl_cmd->parsed()) return cmd_ablate(abl_o, ablate_axis);
    if (curve_cmd->parsed()) return cmd_curve(curve_o);
    if (synth_cmd->parsed()) return cmd_synth(synth_config, synth_seed, synth_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitOk;
}
