#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ladder/synth.hpp"
#include "ladder/types.hpp"

namespace ladder {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One JSON object per line, snake_case fields. Strict mode rejects
/// unknown fields. Errors carry "path:line: reason".
std::vector<CheckpointRecord> read_records_jsonl(const std::string& path,
                                                 bool strict = false);
std::vector<CheckpointRecord> read_records_jsonl(std::istream& in,
                                                 const std::string& label,
                                                 bool strict = false);

void write_records_jsonl(std::ostream& out, std::span<const CheckpointRecord> records);
void write_records_jsonl(const std::string& path,
                         std::span<const CheckpointRecord> records);

GeneratorSpec read_generator_spec(const std::string& path);

struct TargetSpec {
  std::string name;
  std::int64_t n_params = 0;
  std::int64_t tokens = 0;
  std::optional<double> actual_loss;
  std::optional<double> actual_acc;
};

struct PresetEntry {
  std::string model_id;
  std::int64_t n_params = 0;
  double chinchilla_multiplier = 1.0;
  std::int64_t batch_tokens = 0;
  double peak_lr = 0.0;
  std::int64_t warmup_steps = 0;
};

struct Presets {
  double tokens_per_param = 20.0;
  std::vector<PresetEntry> ladder;
  std::vector<TargetSpec> targets;
};

Presets load_presets(const std::string& path);

/// 4 significant digits, the table print precision.
std::string format_sig4(double v);

void write_csv(std::ostream& out, std::span<const std::string> header,
               std::span<const std::vector<std::string>> rows);

} // namespace ladder
