#include "clothbench/scenario.hpp"

#include <fstream>
#include <memory>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "clothbench/error.hpp"

namespace clothbench {
namespace {

using nlohmann::json;

constexpr double kMmPerM = 1000.0;

[[noreturn]] void schema_error(const std::string& what) { throw Error(ErrorCode::SchemaInvalid, what); }

double number_at(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) schema_error(fmt::format("'{}' must be a number", key));
  return j.at(key).get<double>();
}

std::string string_at(const json& j, const char* key, const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_string()) schema_error(fmt::format("'{}' must be a string", key));
  return j.at(key).get<std::string>();
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const char* where) {
  if (!j.is_object()) schema_error(fmt::format("'{}' must be an object", where));
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) schema_error(fmt::format("unknown key '{}' in {}", key, where));
  }
}

PrimitiveSpec parse_primitive_field(const json& j) {
  if (j.is_string()) return canonical_primitive(parse_primitive(j.get<std::string>()));
  check_keys(j, {"kind", "travel_mm", "grasp_height_mm", "fix_opposite_side"}, "primitive");
  PrimitiveSpec spec = canonical_primitive(parse_primitive(string_at(j, "kind", "lift")));
  spec.travel_mm = number_at(j, "travel_mm", spec.travel_mm);
  spec.grasp_height_mm = number_at(j, "grasp_height_mm", spec.grasp_height_mm);
  if (j.contains("fix_opposite_side")) {
    if (!j.at("fix_opposite_side").is_boolean()) schema_error("'fix_opposite_side' must be a boolean");
    spec.fix_opposite_side = j.at("fix_opposite_side").get<bool>();
  }
  validate(spec);
  return spec;
}

// Observer writing every `every`-th step as rows of step,time_s,particle,x_mm,y_mm,z_mm.
class TrajectoryWriter {
 public:
  TrajectoryWriter(const std::string& path, int every) : out_(path), every_(every) {
    if (!out_) throw Error(ErrorCode::IoError, fmt::format("cannot write '{}'", path));
    out_ << "step,time_s,particle,x_mm,y_mm,z_mm\n";
  }

  void operator()(const sim::SimState& s) {
    if (s.steps % every_ != 0) return;
    for (std::size_t p = 0; p < s.size(); ++p) {
      const auto& x = s.position[p];
      out_ << fmt::format("{},{:.6f},{},{:.4f},{:.4f},{:.4f}\n", s.steps, s.time, p, x.x() * kMmPerM,
                          x.y() * kMmPerM, x.z() * kMmPerM);
    }
  }

 private:
  std::ofstream out_;
  int every_;
};

ScenarioOutcome run_single(ScenarioKind kind, const ScenarioConfig& config, const sim::SimParams& params,
                           const sim::StepObserver& observer) {
  ScenarioOutcome outcome;
  outcome.scenario = kind;
  auto add = [&](const char* name, double v) { outcome.metrics.emplace_back(name, v); };
  switch (kind) {
    case ScenarioKind::Drape: {
      sim::DrapeOptions options;
      options.settle = config.settle;
      options.observer = observer;
      options.plate_height_mm = config.plate_height_mm;
      const PlateSpec plate = config.plate ? *config.plate : sim::default_plate(params);
      const auto r = sim::run_drape(params, plate, options);
      add("stiffness", r.stiffness);
      add("a1_mm2", r.areas.a1_mm2);
      add("a2_mm2", r.areas.a2_mm2);
      add("a3_mm2", r.areas.a3_mm2);
      add("settle_steps", static_cast<double>(r.settle_steps));
      break;
    }
    case ScenarioKind::Incline: {
      sim::InclineOptions options = config.incline;
      options.settle = config.settle;
      options.observer = observer;
      const auto r = sim::run_incline(params, options);
      add("mu", r.mu);
      add("slide_angle_deg", r.slide_angle_deg);
      add("total_steps", static_cast<double>(r.total_steps));
      break;
    }
    case ScenarioKind::Pull: {
      const auto r = sim::run_pull(params, config.force_n, {config.settle, observer});
      add("elasticity", r.elasticity);
      add("li_mm", r.lengths.li_mm);
      add("lf_mm", r.lengths.lf_mm);
      add("settle_steps", static_cast<double>(r.settle_steps));
      break;
    }
    case ScenarioKind::Primitive: {
      const auto r = sim::run_primitive(config.primitive, params, {config.settle, observer}, config.grip_speed);
      add("fr", r.result.fr);
      add("area_before_mm2", r.area_before_mm2);
      add("area_after_mm2", r.area_after_mm2);
      if (config.primitive.kind == PrimitiveKind::Fold) add("uncovered_bottom_mm2", r.uncovered_bottom_mm2);
      break;
    }
    case ScenarioKind::Sweep:
      throw Error(ErrorCode::InvalidArgument, "a sweep cannot contain another sweep");
  }
  return outcome;
}

}  // namespace

std::string_view to_string(ScenarioKind kind) noexcept {
  switch (kind) {
    case ScenarioKind::Drape: return "drape";
    case ScenarioKind::Incline: return "incline";
    case ScenarioKind::Pull: return "pull";
    case ScenarioKind::Primitive: return "primitive";
    case ScenarioKind::Sweep: return "sweep";
  }
  return "?";
}

ScenarioKind parse_scenario_kind(std::string_view text) {
  for (auto kind : {ScenarioKind::Drape, ScenarioKind::Incline, ScenarioKind::Pull, ScenarioKind::Primitive,
                    ScenarioKind::Sweep}) {
    if (to_string(kind) == text) return kind;
  }
  throw Error(ErrorCode::InvalidArgument, fmt::format("unknown scenario '{}'", text));
}

void set_param(sim::SimParams& p, std::string_view name, double value) {
  if (name == "nx") p.nx = static_cast<int>(value);
  else if (name == "ny") p.ny = static_cast<int>(value);
  else if (name == "width_mm") p.width_mm = value;
  else if (name == "height_mm") p.height_mm = value;
  else if (name == "density_g_per_mm2") p.density_g_per_mm2 = value;
  else if (name == "k_stretch") p.k_stretch = value;
  else if (name == "k_bend") p.k_bend = value;
  else if (name == "friction") p.friction = value;
  else if (name == "damping") p.damping = value;
  else if (name == "dt") p.dt = value;
  else if (name == "gravity") p.gravity = value;
  else throw Error(ErrorCode::InvalidArgument, fmt::format("unknown simulation parameter '{}'", name));
}

ScenarioConfig parse_scenario(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    schema_error(fmt::format("not valid JSON: {}", e.what()));
  }
  check_keys(doc,
             {"scenario", "params", "settle", "plate", "incline", "force_n", "primitive", "grip_speed", "sweep",
              "trajectory_csv", "dump_every"},
             "scenario file");
  if (!doc.contains("scenario")) schema_error("missing 'scenario'");

  ScenarioConfig c;
  c.scenario = parse_scenario_kind(string_at(doc, "scenario", ""));
  if (doc.contains("params")) {
    for (const auto& [key, value] : doc.at("params").items()) {
      if (!value.is_number()) schema_error(fmt::format("parameter '{}' must be a number", key));
      set_param(c.params, key, value.get<double>());
    }
  }
  sim::validate(c.params);
  if (doc.contains("settle")) {
    const json& s = doc.at("settle");
    check_keys(s, {"v_max", "hold_steps", "max_steps"}, "settle");
    c.settle.v_max = number_at(s, "v_max", c.settle.v_max);
    c.settle.hold_steps = static_cast<int>(number_at(s, "hold_steps", c.settle.hold_steps));
    c.settle.max_steps = static_cast<long>(number_at(s, "max_steps", static_cast<double>(c.settle.max_steps)));
  }
  if (doc.contains("plate")) {
    const json& p = doc.at("plate");
    check_keys(p, {"diameter_mm", "coverage_ratio", "height_mm"}, "plate");
    PlateSpec plate = sim::default_plate(c.params);
    plate.coverage_ratio = number_at(p, "coverage_ratio", plate.coverage_ratio);
    if (p.contains("coverage_ratio") && !p.contains("diameter_mm")) {
      plate.diameter_mm = plate_diameter(std::min(c.params.width_mm, c.params.height_mm), plate.coverage_ratio);
    }
    plate.diameter_mm = number_at(p, "diameter_mm", plate.diameter_mm);
    c.plate = plate;
    c.plate_height_mm = number_at(p, "height_mm", 0.0);
  }
  if (doc.contains("incline")) {
    const json& i = doc.at("incline");
    check_keys(i, {"increment_deg", "slide_threshold_mm", "max_angle_deg"}, "incline");
    c.incline.increment_deg = number_at(i, "increment_deg", c.incline.increment_deg);
    c.incline.slide_threshold_mm = number_at(i, "slide_threshold_mm", c.incline.slide_threshold_mm);
    c.incline.max_angle_deg = number_at(i, "max_angle_deg", c.incline.max_angle_deg);
  }
  c.force_n = number_at(doc, "force_n", c.force_n);
  if (doc.contains("primitive")) c.primitive = parse_primitive_field(doc.at("primitive"));
  c.grip_speed = number_at(doc, "grip_speed", c.grip_speed);
  if (!(c.grip_speed > 0.0)) throw Error(ErrorCode::InvalidArgument, "grip_speed must be > 0");
  if (doc.contains("sweep")) {
    const json& s = doc.at("sweep");
    check_keys(s, {"parameter", "values", "scenario"}, "sweep");
    c.sweep_parameter = string_at(s, "parameter", "");
    c.sweep_scenario = parse_scenario_kind(string_at(s, "scenario", "drape"));
    if (!s.contains("values") || !s.at("values").is_array()) schema_error("sweep needs a 'values' array");
    for (const auto& v : s.at("values")) {
      if (!v.is_number()) schema_error("sweep values must be numbers");
      c.sweep_values.push_back(v.get<double>());
    }
  }
  if (c.scenario == ScenarioKind::Sweep) {
    if (c.sweep_scenario == ScenarioKind::Sweep) {
      throw Error(ErrorCode::InvalidArgument, "a sweep cannot contain another sweep");
    }
    if (c.sweep_values.empty()) throw Error(ErrorCode::InvalidArgument, "sweep needs at least one value");
    sim::SimParams probe = c.params;
    set_param(probe, c.sweep_parameter, c.sweep_values.front());
  }
  c.trajectory_csv = string_at(doc, "trajectory_csv", "");
  c.dump_every = static_cast<int>(number_at(doc, "dump_every", c.dump_every));
  if (c.dump_every <= 0) throw Error(ErrorCode::InvalidArgument, "dump_every must be > 0");
  return c;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, fmt::format("cannot read '{}'", path.string()));
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scenario(text.str());
}

double ScenarioOutcome::metric(std::string_view name) const {
  for (const auto& [key, value] : metrics) {
    if (key == name) return value;
  }
  throw Error(ErrorCode::InvalidArgument, fmt::format("no metric '{}'", name));
}

std::vector<ScenarioOutcome> run_scenario(const ScenarioConfig& config) {
  std::shared_ptr<TrajectoryWriter> writer;
  sim::StepObserver observer;
  if (!config.trajectory_csv.empty()) {
    writer = std::make_shared<TrajectoryWriter>(config.trajectory_csv, config.dump_every);
    observer = [writer](const sim::SimState& s) { (*writer)(s); };
  }
  if (config.scenario != ScenarioKind::Sweep) {
    return {run_single(config.scenario, config, config.params, observer)};
  }
  std::vector<ScenarioOutcome> outcomes;
  for (double value : config.sweep_values) {
    sim::SimParams params = config.params;
    set_param(params, config.sweep_parameter, value);
    ScenarioOutcome outcome = run_single(config.sweep_scenario, config, params, observer);
    outcome.metrics.insert(outcome.metrics.begin(), {config.sweep_parameter, value});
    outcomes.push_back(std::move(outcome));
  }
  return outcomes;
}

std::string outcomes_to_json(const std::vector<ScenarioOutcome>& outcomes) {
  std::string out;
  for (const auto& o : outcomes) {
    json j = json::object();
    j["scenario"] = to_string(o.scenario);
    for (const auto& [key, value] : o.metrics) j[key] = value;
    out += j.dump() + "\n";
  }
  return out;
}

}  // namespace clothbench
