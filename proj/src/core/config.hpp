#pragma once

#include <optional>
#include <string>

#include "core/learning.hpp"
#include "core/model.hpp"
#include "core/timescale.hpp"
#include "core/types.hpp"

namespace berknash {

struct LearningConfig {
  StepSchedule schedule;
  double tol = 1e-6;
  long max_steps = 200000;
  int window = 100;
};

struct DesignerConfig {
  double gamma_budget = 0.0;
  Vector a_weights;
  Vector b_weights;   // noise-cost weights; the optimal distortion noise is zero
  double b_hat = 0.05;
  double k1 = 10.0;
  long inner_steps_per_outer = 1;
  long total_steps = 20000;
  std::optional<Vector> delta0;
};

// One scenario document: sections game, attention, conjecture, learning,
// designer, plus the top-level seed. Model parameters are always explicit in
// the JSON; only numeric knobs carry defaults.
struct ScenarioConfig {
  NetworkGame game;
  std::optional<AttentionStructure> attention;
  ConjectureClass conjecture;
  std::uint64_t seed = 0;
  LearningConfig learning;
  std::optional<DesignerConfig> designer;
  std::optional<Vector> coverage;   // informational, written by the generator
};

// Throws ConfigError naming the offending field; game parameters are
// validated on construction.
ScenarioConfig parse_config(const std::string& text);

// Reads the file, then parse_config. Throws IoError when unreadable.
ScenarioConfig load_config(const std::string& path);

// Canonical JSON (sorted keys, shortest round-trip numbers).
std::string config_to_json(const ScenarioConfig& config);

// FNV-1a 64-bit hash of the canonical JSON, as 16 hex digits.
std::string config_hash_hex(const ScenarioConfig& config);

// Assembles the coupled-simulation settings; requires the designer section.
TwoScaleConfig two_scale_config(const ScenarioConfig& config);

}  // namespace berknash
