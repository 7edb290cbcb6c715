#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "clothbench/error.hpp"
#include "clothbench/manip_eval.hpp"
#include "clothbench/mask.hpp"
#include "clothbench/measurement.hpp"
#include "clothbench/radar.hpp"
#include "clothbench/registry.hpp"
#include "clothbench/scenario.hpp"

namespace cb = clothbench;
namespace fs = std::filesystem;

namespace {

constexpr int kExitDomainError = 1;
constexpr int kExitUsageError = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

cb::Registry read_registry(const fs::path& path) {
  if (!fs::exists(path)) return {};
  return cb::load(path);
}

// Loads, applies `change` and saves under the registry lock.
template <typename Change>
void update_registry(const fs::path& path, Change change) {
  cb::RegistryLock lock(path);
  cb::Registry registry = read_registry(path);
  change(registry);
  cb::save(registry, path);
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw cb::Error(cb::ErrorCode::IoError, fmt::format("cannot write '{}'", path.string()));
  out << text;
}

std::string optional_value(const std::optional<double>& v) {
  return v ? fmt::format("{}", *v) : std::string("-");
}

void print_object(const cb::ClothObject& o) {
  std::cout << "id: " << o.id << "\n";
  std::cout << "name: " << o.name << "\n";
  std::cout << "shape: " << cb::to_label(o.shape) << "\n";
  for (const auto& d : o.dimensions) {
    std::cout << fmt::format("dimension {}: {} mm\n", cb::to_string(d.line), d.length_mm);
  }
  std::cout << fmt::format("weight: {} g\n", o.weight_g);
  std::string colors;
  for (auto c : o.colors) colors += (colors.empty() ? "" : ",") + std::string(cb::to_string(c));
  std::cout << "colors: " << colors << "\n";
  std::cout << "print: " << (o.has_print ? "yes" : "no") << "\n";
  std::string materials;
  for (const auto& m : o.materials) materials += (materials.empty() ? "" : ",") + cb::to_label(m);
  std::cout << "materials: " << materials << "\n";
  std::cout << "construction: " << cb::to_label(o.construction) << "\n";
  if (o.mechanical) {
    std::cout << "stiffness: " << optional_value(o.mechanical->stiffness) << "\n";
    std::cout << "elasticity: " << optional_value(o.mechanical->elasticity) << "\n";
    for (const auto& l : o.mechanical->per_line) {
      std::cout << fmt::format("elasticity {}: {}\n", cb::to_string(l.line), l.ratio);
    }
    std::cout << "friction: " << optional_value(o.mechanical->friction) << "\n";
  }
}

cb::Dimension parse_dimension(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw UsageError(fmt::format("dimension '{}' must look like L1=300", text));
  try {
    return {cb::parse_reference_line(text.substr(0, eq)), std::stod(text.substr(eq + 1))};
  } catch (const std::logic_error&) {
    throw UsageError(fmt::format("dimension '{}' has no numeric length", text));
  }
}

std::vector<cb::RadarProfile> profiles_for(const cb::Registry& registry, const std::vector<std::string>& ids) {
  std::vector<cb::RadarProfile> profiles;
  for (const auto& id : ids) {
    auto profile = cb::radar_profile(cb::find_set(registry, id), registry.objects);
    for (const auto& w : profile.warnings) std::cerr << "warning: " << id << ": " << w << "\n";
    profiles.push_back(std::move(profile));
  }
  return profiles;
}

void record_measurement(const fs::path& registry_path, cb::MeasurementRecord record, const std::string& notes) {
  record.timestamp = utc_timestamp();
  record.notes = notes;
  std::cout << fmt::format("{:.6f}\n", record.value);
  update_registry(registry_path, [&](cb::Registry& r) { cb::add_measurement(r, std::move(record)); });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"clothbench: cloth property measurement, benchmarking and simulation"};
  app.require_subcommand(1);
  std::string registry_option;
  app.add_option("--registry", registry_option, "Registry file (default: $CLOTHBENCH_REGISTRY or ./clothbench.json)");
  auto registry_path = [&]() -> fs::path {
    return registry_option.empty() ? cb::default_registry_path() : fs::path(registry_option);
  };

  // -- object ----------------------------------------------------------------
  auto* object = app.add_subcommand("object", "Manage cloth objects")->require_subcommand(1);

  struct {
    std::string id, name, shape = "rectangular", construction = "woven";
    std::vector<std::string> dims, colors, materials;
    double weight = 0.0;
    bool print = false;
    std::optional<double> stiffness, elasticity, friction;
  } add;
  auto* object_add = object->add_subcommand("add", "Register a cloth object");
  object_add->add_option("--id", add.id)->required();
  object_add->add_option("--name", add.name);
  object_add->add_option("--shape", add.shape);
  object_add->add_option("--dim", add.dims, "Reference line length, e.g. L1=300 (mm)");
  object_add->add_option("--weight", add.weight, "Weight (g)")->required();
  object_add->add_option("--color", add.colors);
  object_add->add_flag("--print", add.print, "Object has a printed pattern");
  object_add->add_option("--material", add.materials);
  object_add->add_option("--construction", add.construction);
  object_add->add_option("--stiffness", add.stiffness);
  object_add->add_option("--elasticity", add.elasticity);
  object_add->add_option("--friction", add.friction);
  object_add->callback([&] {
    cb::ClothObject o;
    o.id = add.id;
    o.name = add.name;
    o.shape = cb::parse_shape(add.shape);
    for (const auto& d : add.dims) o.dimensions.push_back(parse_dimension(d));
    o.weight_g = add.weight;
    for (const auto& c : add.colors) o.colors.insert(cb::parse_color(c));
    o.has_print = add.print;
    for (const auto& m : add.materials) o.materials.insert(cb::parse_material(m));
    o.construction = cb::parse_construction(add.construction);
    if (add.stiffness || add.elasticity || add.friction) {
      o.mechanical = cb::MechanicalProperties{add.stiffness, add.elasticity, {}, add.friction};
    }
    update_registry(registry_path(), [&](cb::Registry& r) { cb::add_object(r, std::move(o)); });
  });

  object->add_subcommand("list", "List registered objects")->callback([&] {
    const auto registry = read_registry(registry_path());
    for (const auto& [id, o] : registry.objects) {
      std::cout << fmt::format("{}\t{}\t{}\n", id, o.name, cb::to_label(o.shape));
    }
  });

  std::string show_id;
  auto* object_show = object->add_subcommand("show", "Show one object");
  object_show->add_option("id", show_id)->required();
  object_show->callback([&] { print_object(cb::find_object(read_registry(registry_path()), show_id)); });

  // -- set -------------------------------------------------------------------
  auto* set = app.add_subcommand("set", "Manage cloth sets")->require_subcommand(1);
  cb::ClothSet new_set;
  auto* set_create = set->add_subcommand("create", "Create a cloth set");
  set_create->add_option("--id", new_set.id)->required();
  set_create->add_option("--name", new_set.name);
  set_create->add_option("--source", new_set.source, "Citation of the set's origin");
  set_create->add_option("--member", new_set.members);
  set_create->callback(
      [&] { update_registry(registry_path(), [&](cb::Registry& r) { cb::create_set(r, new_set); }); });

  std::string member_set, member_object;
  auto* set_add = set->add_subcommand("add-member", "Add an object to a set");
  set_add->add_option("set", member_set)->required();
  set_add->add_option("object", member_object)->required();
  set_add->callback([&] {
    update_registry(registry_path(), [&](cb::Registry& r) { cb::add_member(r, member_set, member_object); });
  });

  set->add_subcommand("list", "List cloth sets")->callback([&] {
    const auto registry = read_registry(registry_path());
    for (const auto& [id, s] : registry.sets) {
      std::cout << fmt::format("{}\t{}\t{} member(s)\n", id, s.name, s.members.size());
    }
  });

  // -- measure ---------------------------------------------------------------
  auto* measure = app.add_subcommand("measure", "Derive a mechanical property")->require_subcommand(1);
  std::string measure_object;

  struct {
    std::string flat, draped, plate_mask;
    double plate_diameter = 0.0, coverage = cb::kDefaultCoverageRatio;
    std::optional<double> scale;
    int threshold = 128, closing = 0, folds = 0;
    bool brighter = false;
  } stiff;
  auto* m_stiff = measure->add_subcommand("stiffness", "Drape stiffness from zenithal images");
  m_stiff->add_option("--flat", stiff.flat, "Image of the flat cloth")->required()->check(CLI::ExistingFile);
  m_stiff->add_option("--draped", stiff.draped, "Image of the draped cloth")->required()->check(CLI::ExistingFile);
  m_stiff->add_option("--plate-diameter", stiff.plate_diameter, "Plate diameter (mm)")->required();
  auto* scale_opt = m_stiff->add_option("--scale", stiff.scale, "Image scale (mm/px)");
  m_stiff->add_option("--plate-mask", stiff.plate_mask, "Mask of the bare plate for calibration")
      ->check(CLI::ExistingFile)
      ->excludes(scale_opt);
  m_stiff->add_option("--coverage", stiff.coverage, "Plate coverage ratio used to size the plate");
  m_stiff->add_option("--threshold", stiff.threshold, "Segmentation threshold (0-255)");
  m_stiff->add_flag("--cloth-brighter", stiff.brighter, "Cloth is brighter than the background");
  m_stiff->add_option("--closing", stiff.closing, "Morphological closing radius (px)");
  m_stiff->add_option("--folds", stiff.folds, "Number of folds applied before draping");
  m_stiff->add_option("--object", measure_object, "Attach the result to this object");
  m_stiff->callback([&] {
    if (!stiff.scale && stiff.plate_mask.empty()) throw UsageError("one of --scale or --plate-mask is required");
    cb::SegmentationConfig seg;
    seg.threshold = stiff.threshold;
    seg.polarity = stiff.brighter ? cb::Polarity::ClothBrighter : cb::Polarity::ClothDarker;
    seg.closing_radius = stiff.closing;
    cb::ImageCalibration calibration;
    calibration.scale_mm_per_px = stiff.scale;
    if (!stiff.plate_mask.empty()) calibration.plate_mask = cb::load_mask(stiff.plate_mask);
    auto record = cb::stiffness_from_images(cb::load_image(stiff.flat), cb::load_image(stiff.draped),
                                            {stiff.plate_diameter, stiff.coverage}, seg, calibration, {},
                                            stiff.folds);
    record.object_id = measure_object;
    record_measurement(registry_path(), std::move(record),
                       fmt::format("plate {} mm; folds {}", stiff.plate_diameter, stiff.folds));
  });

  cb::ElasticityInputs elastic;
  std::string elastic_line = "L1";
  auto* m_elastic = measure->add_subcommand("elasticity", "Elongation ratio under the tensile load");
  m_elastic->add_option("--line", elastic_line, "Reference line (L1-L4)");
  m_elastic->add_option("--li", elastic.li_mm, "Rest length (mm)")->required();
  m_elastic->add_option("--lf", elastic.lf_mm, "Length under load (mm)")->required();
  m_elastic->add_option("--load", elastic.load_g, "Tensile load (g)");
  m_elastic->add_option("--object", measure_object, "Attach the result to this object");
  m_elastic->callback([&] {
    elastic.line = cb::parse_reference_line(elastic_line);
    record_measurement(registry_path(), cb::make_record(measure_object, elastic),
                       fmt::format("load {} g", elastic.load_g));
  });

  cb::FrictionRaw friction;
  auto* m_friction = measure->add_subcommand("friction", "Friction coefficient from the incline test");
  m_friction->add_option("--height", friction.inputs.height_mm, "Lifted height at slide onset (mm)")->required();
  m_friction->add_option("--length", friction.inputs.length_mm, "Incline length (mm)")->required();
  m_friction->add_option("--surface", friction.surface, "Incline surface");
  m_friction->add_option("--object", measure_object, "Attach the result to this object");
  m_friction->callback([&] {
    record_measurement(registry_path(), cb::make_record(measure_object, friction),
                       fmt::format("surface {}", friction.surface));
  });

  // -- radar -----------------------------------------------------------------
  auto* radar = app.add_subcommand("radar", "Cloth-set benchmarking")->require_subcommand(1);
  std::string profile_set;
  auto* r_profile = radar->add_subcommand("profile", "Per-axis ranges of one set");
  r_profile->add_option("set", profile_set)->required();
  r_profile->callback([&] {
    const auto profile = profiles_for(read_registry(registry_path()), {profile_set}).front();
    std::cout << "axis,unit,min,max,range,count,members,skipped\n";
    for (const auto& a : profile.axes) {
      const bool cat = cb::is_categorical(a.axis);
      std::cout << fmt::format("{},{},{},{},{},{},{},{}\n", cb::to_string(a.axis), cb::unit_of(a.axis),
                               cat || a.missing ? "" : fmt::format("{}", a.min),
                               cat || a.missing ? "" : fmt::format("{}", a.max),
                               cat || a.missing ? "" : fmt::format("{}", a.range),
                               cat ? fmt::format("{}", a.count) : "", a.members_used, a.members_skipped);
    }
  });

  std::vector<std::string> compare_sets;
  std::string svg_out, csv_out, chart_title;
  auto* r_compare = radar->add_subcommand("compare", "Compare sets and draw the radar chart");
  r_compare->add_option("sets", compare_sets)->required();
  r_compare->add_option("--svg", svg_out, "Write the radar chart here");
  r_compare->add_option("--csv", csv_out, "Write the comparison table here (default: stdout)");
  r_compare->add_option("--title", chart_title, "Chart title");
  r_compare->callback([&] {
    const auto profiles = profiles_for(read_registry(registry_path()), compare_sets);
    if (!svg_out.empty()) write_file(svg_out, cb::render_radar(profiles, {640, chart_title}));
    if (profiles.size() >= 2) {
      const std::string table = cb::compare_report(profiles);
      if (csv_out.empty()) std::cout << table;
      else write_file(csv_out, table);
    } else if (!csv_out.empty()) {
      throw UsageError("--csv needs at least two sets");
    }
  });

  // -- eval ------------------------------------------------------------------
  auto* eval = app.add_subcommand("eval", "Manipulation outcome metrics")->require_subcommand(1);
  std::string before_mask, after_mask, uncovered_mask;
  std::optional<double> eval_scale;
  auto scaled = [&](cb::BinaryMask mask) {
    if (eval_scale) mask.set_scale(*eval_scale);
    return mask;
  };
  auto* e_fr = eval->add_subcommand("fr", "Shape-retention final ratio");
  e_fr->add_option("--before", before_mask)->required()->check(CLI::ExistingFile);
  e_fr->add_option("--after", after_mask)->required()->check(CLI::ExistingFile);
  e_fr->add_option("--scale", eval_scale, "Scale applied to both masks (mm/px)");
  e_fr->callback([&] {
    const double fr = cb::final_ratio(scaled(cb::load_mask(before_mask)), scaled(cb::load_mask(after_mask)));
    std::cout << fmt::format("{:.6f}\n", fr);
    if (auto w = cb::retention_warning(fr)) std::cerr << "warning: " << *w << "\n";
  });

  auto* e_fold = eval->add_subcommand("fold", "Fold-alignment final ratio");
  e_fold->add_option("--after", after_mask)->required()->check(CLI::ExistingFile);
  e_fold->add_option("--uncovered", uncovered_mask, "Uncovered bottom-half mask")
      ->required()
      ->check(CLI::ExistingFile);
  e_fold->add_option("--scale", eval_scale, "Scale applied to both masks (mm/px)");
  e_fold->callback([&] {
    std::cout << fmt::format("{:.6f}\n", cb::fold_ratio(scaled(cb::load_mask(after_mask)),
                                                       scaled(cb::load_mask(uncovered_mask))));
  });

  std::vector<double> runs;
  auto* e_agg = eval->add_subcommand("aggregate", "Mean and population std of repetitions");
  e_agg->add_option("values", runs, "Per-run FR values");
  e_agg->callback([&] {
    const auto agg = cb::aggregate(runs);
    std::cout << fmt::format("mean {:.6f}\nstddev {:.6f}\n", agg.mean, agg.stddev);
  });

  // -- sim -------------------------------------------------------------------
  auto* sim = app.add_subcommand("sim", "Mass-spring simulation oracle")->require_subcommand(1);
  std::string config_path;
  for (auto kind : {cb::ScenarioKind::Drape, cb::ScenarioKind::Incline, cb::ScenarioKind::Pull,
                    cb::ScenarioKind::Primitive, cb::ScenarioKind::Sweep}) {
    auto* sub = sim->add_subcommand(std::string(cb::to_string(kind)),
                                    fmt::format("Run the {} scenario", cb::to_string(kind)));
    sub->add_option("--config", config_path, "Scenario JSON file")->required()->check(CLI::ExistingFile);
    sub->callback([&, kind] {
      const auto config = cb::load_scenario(config_path);
      if (config.scenario != kind) {
        throw UsageError(fmt::format("config describes a {} scenario, not {}", cb::to_string(config.scenario),
                                     cb::to_string(kind)));
      }
      std::cout << cb::outcomes_to_json(cb::run_scenario(config));
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsageError;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsageError;
  } catch (const cb::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomainError;
  }
  return 0;
}
