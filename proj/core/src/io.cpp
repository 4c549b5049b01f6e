#include "ladder/io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "json.hpp"

using nlohmann::json;

namespace ladder {

namespace {

const std::set<std::string> kRecordFields = {
    "model_id", "n_params", "tokens_seen", "step",     "task",
    "loss",     "accuracy", "feature_kind", "lr_state"};

CheckpointRecord record_from_json(const json& j, bool strict,
                                  const std::string& where) {
  if (!j.is_object()) throw ParseError(where + ": expected a JSON object");
  if (strict)
    for (const auto& [key, _] : j.items())
      if (!kRecordFields.count(key))
        throw ParseError(where + ": unknown field '" + key + "'");

  CheckpointRecord r;
  try {
    r.model_id = j.at("model_id").get<std::string>();
    r.n_params = j.at("n_params").get<std::int64_t>();
    r.tokens_seen = j.at("tokens_seen").get<std::int64_t>();
    r.step = j.at("step").get<std::int64_t>();
    r.task = j.at("task").get<std::string>();
    r.loss = j.at("loss").get<double>();
    if (j.contains("accuracy") && !j["accuracy"].is_null())
      r.accuracy = j["accuracy"].get<double>();
    if (j.contains("feature_kind"))
      r.feature_kind = feature_kind_from_string(j["feature_kind"].get<std::string>());
    if (j.contains("lr_state") && !j["lr_state"].is_null()) {
      const json& s = j["lr_state"];
      r.lr_state = LrState{s.at("peak_lr").get<double>(),
                           s.at("current_lr").get<double>()};
    }
  } catch (const json::exception& e) {
    throw ParseError(where + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(where + ": " + e.what());
  }
  return r;
}

json record_to_json(const CheckpointRecord& r) {
  json j;
  j["model_id"] = r.model_id;
  j["n_params"] = r.n_params;
  j["tokens_seen"] = r.tokens_seen;
  j["step"] = r.step;
  j["task"] = r.task;
  j["loss"] = r.loss;
  if (r.accuracy) j["accuracy"] = *r.accuracy;
  j["feature_kind"] = to_string(r.feature_kind);
  if (r.lr_state)
    j["lr_state"] = {{"peak_lr", r.lr_state->peak_lr},
                     {"current_lr", r.lr_state->current_lr}};
  return j;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return j;
}

LRSchedule schedule_from_json(const json& j, const std::string& where) {
  LRSchedule s;
  try {
    std::string kind = j.value("kind", "cosine");
    if (kind == "cosine")
      s.kind = LRSchedule::Kind::cosine;
    else if (kind == "constant")
      s.kind = LRSchedule::Kind::constant;
    else
      throw ParseError(where + ": unknown schedule kind '" + kind + "'");
    s.peak_lr = j.value("peak_lr", s.peak_lr);
    s.warmup_steps = j.value("warmup_steps", s.warmup_steps);
    s.total_decay_steps = j.value("total_decay_steps", s.total_decay_steps);
    s.final_lr_fraction = j.value("final_lr_fraction", s.final_lr_fraction);
  } catch (const json::exception& e) {
    throw ParseError(where + ": " + e.what());
  }
  return s;
}

} // namespace

std::vector<CheckpointRecord> read_records_jsonl(std::istream& in,
                                                 const std::string& label,
                                                 bool strict) {
  std::vector<CheckpointRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::string where = label + ":" + std::to_string(lineno);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(where + ": " + e.what());
    }
    out.push_back(record_from_json(j, strict, where));
  }
  return out;
}

std::vector<CheckpointRecord> read_records_jsonl(const std::string& path, bool strict) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open");
  return read_records_jsonl(in, path, strict);
}

void write_records_jsonl(std::ostream& out, std::span<const CheckpointRecord> records) {
  for (const auto& r : records) out << record_to_json(r).dump() << '\n';
}

void write_records_jsonl(const std::string& path,
                         std::span<const CheckpointRecord> records) {
  std::ofstream out(path);
  if (!out) throw ParseError(path + ": cannot open for writing");
  write_records_jsonl(out, records);
}

GeneratorSpec read_generator_spec(const std::string& path) {
  json j = load_json_file(path);
  GeneratorSpec spec;
  try {
    const json& s1 = j.at("truth_step1");
    spec.truth_step1 = {s1.at("A").get<double>(), s1.at("B").get<double>(),
                        s1.at("alpha").get<double>(), s1.at("beta").get<double>(),
                        s1.at("E").get<double>()};
    const json& s2 = j.at("truth_step2");
    spec.truth_step2 = {s2.at("a").get<double>(), s2.at("b").get<double>(),
                        s2.at("k").get<double>(), s2.at("L0").get<double>()};
    spec.truth_F = j.value("truth_F", 0.0);
    spec.ladder.tokens_per_param = j.value("tokens_per_param", 20.0);
    for (const json& e : j.at("ladder")) {
      spec.ladder.entries.push_back({e.at("model_id").get<std::string>(),
                                     e.at("n_params").get<std::int64_t>(),
                                     e.at("chinchilla_multiplier").get<double>()});
    }
    if (j.contains("default_schedule"))
      spec.default_schedule =
          schedule_from_json(j["default_schedule"], path + ":default_schedule");
    if (j.contains("schedules"))
      for (const auto& [id, js] : j["schedules"].items())
        spec.schedules[id] = schedule_from_json(js, path + ":schedules." + id);
    spec.checkpoints_per_run = j.value("checkpoints_per_run", spec.checkpoints_per_run);
    spec.steps_per_run = j.value("steps_per_run", spec.steps_per_run);
    if (j.contains("noise")) {
      spec.noise.loss_lognormal_sigma =
          j["noise"].value("loss_lognormal_sigma", 0.0);
      spec.noise.acc_gaussian_sigma = j["noise"].value("acc_gaussian_sigma", 0.0);
    }
    spec.seed = j.value("seed", std::uint64_t{0});
    spec.task = j.value("task", spec.task);
    if (j.contains("feature_kind"))
      spec.feature_kind =
          feature_kind_from_string(j["feature_kind"].get<std::string>());
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return spec;
}

Presets load_presets(const std::string& path) {
  json j = load_json_file(path);
  Presets p;
  try {
    p.tokens_per_param = j.value("tokens_per_param", 20.0);
    for (const json& e : j.at("ladder")) {
      PresetEntry entry;
      entry.model_id = e.at("model_id").get<std::string>();
      entry.n_params = e.at("n_params").get<std::int64_t>();
      entry.chinchilla_multiplier = e.at("chinchilla_multiplier").get<double>();
      entry.batch_tokens = e.value("batch_tokens", std::int64_t{0});
      entry.peak_lr = e.value("peak_lr", 0.0);
      entry.warmup_steps = e.value("warmup_steps", std::int64_t{0});
      p.ladder.push_back(std::move(entry));
    }
    for (const json& t : j.value("targets", json::array())) {
      TargetSpec target;
      target.name = t.at("name").get<std::string>();
      target.n_params = t.at("n_params").get<std::int64_t>();
      target.tokens = t.at("tokens").get<std::int64_t>();
      if (t.contains("actual_loss")) target.actual_loss = t["actual_loss"].get<double>();
      if (t.contains("actual_acc")) target.actual_acc = t["actual_acc"].get<double>();
      p.targets.push_back(std::move(target));
    }
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return p;
}

std::string format_sig4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

void write_csv(std::ostream& out, std::span<const std::string> header,
               std::span<const std::vector<std::string>> rows) {
  auto emit = [&out](const auto& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ',';
      out << cells[i];
    }
    out << '\n';
  };
  emit(header);
  for (const auto& row : rows) emit(row);
}

} // namespace ladder
