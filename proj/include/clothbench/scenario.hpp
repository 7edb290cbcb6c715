#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "clothbench/sim.hpp"

namespace clothbench {

enum class ScenarioKind { Drape, Incline, Pull, Primitive, Sweep };

std::string_view to_string(ScenarioKind kind) noexcept;
ScenarioKind parse_scenario_kind(std::string_view text);

/// Simulation run description read from a JSON file. Every field except
/// "scenario" is optional and defaults to the simulator defaults, e.g.
///
///   {"scenario": "drape", "params": {"k_bend": 0.5}, "plate": {"diameter_mm": 180}}
///
/// A sweep repeats `sweep_scenario` once per value of `sweep_parameter`.
struct ScenarioConfig {
  ScenarioKind scenario = ScenarioKind::Drape;
  sim::SimParams params;
  sim::SettleCriteria settle;
  std::optional<PlateSpec> plate;  // drape; default sized from the cloth
  double plate_height_mm = 0.0;    // drape; 0 = automatic
  sim::InclineOptions incline;
  double force_n = sim::kProtocolForceN;
  PrimitiveSpec primitive = canonical_primitive(PrimitiveKind::Lift);
  double grip_speed = 0.1;  // m/s
  ScenarioKind sweep_scenario = ScenarioKind::Drape;
  std::string sweep_parameter;
  std::vector<double> sweep_values;
  std::string trajectory_csv;  // empty = no dump
  int dump_every = 100;
};

/// Throws SchemaInvalid on malformed documents and InvalidArgument on
/// out-of-domain values.
[[nodiscard]] ScenarioConfig parse_scenario(std::string_view json_text);
/// Throws IoError when the file cannot be read.
[[nodiscard]] ScenarioConfig load_scenario(const std::filesystem::path& path);

/// Sets a SimParams field by name ("k_bend", "friction", "nx", ...).
void set_param(sim::SimParams& params, std::string_view name, double value);

struct ScenarioOutcome {
  ScenarioKind scenario = ScenarioKind::Drape;
  std::vector<std::pair<std::string, double>> metrics;  // in insertion order

  [[nodiscard]] double metric(std::string_view name) const;
};

/// Runs the scenario (one outcome, or one per sweep value). Writes the
/// trajectory CSV when requested.
[[nodiscard]] std::vector<ScenarioOutcome> run_scenario(const ScenarioConfig& config);

/// One JSON object per line.
[[nodiscard]] std::string outcomes_to_json(const std::vector<ScenarioOutcome>& outcomes);

}  // namespace clothbench
