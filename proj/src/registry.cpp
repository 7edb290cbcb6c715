#include "clothbench/registry.hpp"

#include <sys/file.h>
#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "clothbench/error.hpp"

namespace clothbench {
namespace {

using nlohmann::json;

[[noreturn]] void schema_error(const std::string& what) { throw Error(ErrorCode::SchemaInvalid, what); }

json quantity(double value, std::string_view unit) { return json{{"value", value}, {"unit", unit}}; }

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) schema_error(fmt::format("missing field '{}'", key));
  return j.at(key);
}

std::string read_string(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_string()) schema_error(fmt::format("field '{}' must be a string", key));
  return v.get<std::string>();
}

double read_number(const json& v, const char* key) {
  if (!v.is_number()) schema_error(fmt::format("field '{}' must be a number", key));
  return v.get<double>();
}

double read_quantity(const json& j, const char* key, std::string_view unit) {
  const json& q = field(j, key);
  const std::string found = read_string(q, "unit");
  if (found != unit) {
    schema_error(fmt::format("field '{}' must be in '{}', found '{}'", key, unit, found));
  }
  return read_number(field(q, "value"), key);
}

std::optional<double> read_optional_quantity(const json& j, const char* key, std::string_view unit) {
  if (!j.contains(key)) return std::nullopt;
  return read_quantity(j, key, unit);
}

int read_int(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number_integer()) schema_error(fmt::format("field '{}' must be an integer", key));
  return v.get<int>();
}

template <typename Parse>
auto parse_label(const json& v, Parse parse) {
  if (!v.is_string()) schema_error("labels must be strings");
  try {
    return parse(v.get<std::string>());
  } catch (const Error& e) {
    schema_error(e.what());
  }
}

// -- objects -----------------------------------------------------------------

json object_to_json(const ClothObject& o) {
  json dims = json::array();
  for (const auto& d : o.dimensions) {
    dims.push_back({{"line", to_string(d.line)}, {"length", quantity(d.length_mm, "mm")}});
  }
  json colors = json::array();
  for (auto c : o.colors) colors.push_back(to_string(c));
  json materials = json::array();
  for (const auto& m : o.materials) materials.push_back(to_label(m));

  json j = {{"id", o.id},
            {"name", o.name},
            {"shape", to_label(o.shape)},
            {"dimensions", dims},
            {"weight", quantity(o.weight_g, "g")},
            {"colors", colors},
            {"has_print", o.has_print},
            {"materials", materials},
            {"construction", to_label(o.construction)}};
  if (o.mechanical) {
    const auto& m = *o.mechanical;
    json mech = json::object();
    if (m.stiffness) mech["stiffness"] = quantity(*m.stiffness, "ratio");
    if (m.elasticity) mech["elasticity"] = quantity(*m.elasticity, "ratio");
    json lines = json::array();
    for (const auto& l : m.per_line) {
      lines.push_back({{"line", to_string(l.line)}, {"elasticity", quantity(l.ratio, "ratio")}});
    }
    mech["per_line"] = lines;
    if (m.friction) mech["friction"] = quantity(*m.friction, "ratio");
    j["mechanical"] = mech;
  }
  return j;
}

ClothObject object_from_json(const json& j) {
  ClothObject o;
  o.id = read_string(j, "id");
  o.name = read_string(j, "name");
  o.shape = parse_label(field(j, "shape"), parse_shape);
  for (const auto& d : field(j, "dimensions")) {
    o.dimensions.push_back(
        {parse_label(field(d, "line"), parse_reference_line), read_quantity(d, "length", "mm")});
  }
  o.weight_g = read_quantity(j, "weight", "g");
  for (const auto& c : field(j, "colors")) o.colors.insert(parse_label(c, parse_color));
  const json& print = field(j, "has_print");
  if (!print.is_boolean()) schema_error("field 'has_print' must be a boolean");
  o.has_print = print.get<bool>();
  for (const auto& m : field(j, "materials")) o.materials.insert(parse_label(m, parse_material));
  o.construction = parse_label(field(j, "construction"), parse_construction);
  if (j.contains("mechanical")) {
    const json& mj = j.at("mechanical");
    MechanicalProperties m;
    m.stiffness = read_optional_quantity(mj, "stiffness", "ratio");
    m.elasticity = read_optional_quantity(mj, "elasticity", "ratio");
    if (mj.contains("per_line")) {
      for (const auto& l : mj.at("per_line")) {
        m.per_line.push_back(
            {parse_label(field(l, "line"), parse_reference_line), read_quantity(l, "elasticity", "ratio")});
      }
    }
    m.friction = read_optional_quantity(mj, "friction", "ratio");
    o.mechanical = std::move(m);
  }
  return o;
}

// -- sets --------------------------------------------------------------------

json set_to_json(const ClothSet& s) {
  return {{"id", s.id}, {"name", s.name}, {"source", s.source}, {"members", s.members}};
}

ClothSet set_from_json(const json& j) {
  ClothSet s;
  s.id = read_string(j, "id");
  s.name = read_string(j, "name");
  s.source = read_string(j, "source");
  for (const auto& m : field(j, "members")) {
    if (!m.is_string()) schema_error("set members must be object ids");
    s.members.push_back(m.get<std::string>());
  }
  return s;
}

// -- measurement records -----------------------------------------------------

json raw_to_json(const RawInputs& raw) {
  struct Visitor {
    json operator()(const StiffnessRaw& r) const {
      json j = {{"a1", quantity(r.areas.a1_mm2, "mm2")},
                {"a2", quantity(r.areas.a2_mm2, "mm2")},
                {"a3", quantity(r.areas.a3_mm2, "mm2")},
                {"plate_diameter", quantity(r.plate_diameter_mm, "mm")},
                {"coverage_ratio", quantity(r.coverage_ratio, "ratio")},
                {"fold_count", r.fold_count}};
      if (r.scale_mm_per_px) j["scale"] = quantity(*r.scale_mm_per_px, "mm/px");
      return j;
    }
    json operator()(const ElasticityInputs& r) const {
      return {{"line", to_string(r.line)},
              {"li", quantity(r.li_mm, "mm")},
              {"lf", quantity(r.lf_mm, "mm")},
              {"load", quantity(r.load_g, "g")}};
    }
    json operator()(const FrictionRaw& r) const {
      return {{"height", quantity(r.inputs.height_mm, "mm")},
              {"length", quantity(r.inputs.length_mm, "mm")},
              {"surface", r.surface}};
    }
  };
  return std::visit(Visitor{}, raw);
}

RawInputs raw_from_json(PropertyKind kind, const json& j) {
  switch (kind) {
    case PropertyKind::Stiffness: {
      StiffnessRaw r;
      r.areas = {read_quantity(j, "a1", "mm2"), read_quantity(j, "a2", "mm2"), read_quantity(j, "a3", "mm2")};
      r.plate_diameter_mm = read_quantity(j, "plate_diameter", "mm");
      r.coverage_ratio = read_quantity(j, "coverage_ratio", "ratio");
      r.fold_count = read_int(j, "fold_count");
      r.scale_mm_per_px = read_optional_quantity(j, "scale", "mm/px");
      return r;
    }
    case PropertyKind::Elasticity:
      return ElasticityInputs{parse_label(field(j, "line"), parse_reference_line),
                              read_quantity(j, "li", "mm"), read_quantity(j, "lf", "mm"),
                              read_quantity(j, "load", "g")};
    case PropertyKind::Friction:
      return FrictionRaw{{read_quantity(j, "height", "mm"), read_quantity(j, "length", "mm")},
                         read_string(j, "surface")};
  }
  schema_error("unknown property kind");
}

json record_to_json(const MeasurementRecord& r) {
  return {{"object_id", r.object_id},
          {"property", to_string(r.kind())},
          {"raw", raw_to_json(r.raw)},
          {"value", quantity(r.value, "ratio")},
          {"timestamp", r.timestamp},
          {"notes", r.notes}};
}

MeasurementRecord record_from_json(const json& j) {
  MeasurementRecord r;
  r.object_id = read_string(j, "object_id");
  const auto kind = parse_label(field(j, "property"), parse_property_kind);
  r.raw = raw_from_json(kind, field(j, "raw"));
  r.value = read_quantity(j, "value", "ratio");
  r.timestamp = read_string(j, "timestamp");
  r.notes = read_string(j, "notes");
  return r;
}

std::string join_violations(const std::vector<Violation>& violations) {
  std::string out;
  for (const auto& v : violations) {
    if (!out.empty()) out += "; ";
    out += fmt::format("{} ({})", to_string(v.kind), v.detail);
  }
  return out;
}

std::vector<Violation> blocking_violations(const ClothObject& object) {
  auto violations = validate_object(object);
  std::erase_if(violations, [](const Violation& v) { return v.kind == ViolationKind::NoColors; });
  return violations;
}

}  // namespace

void add_object(Registry& registry, ClothObject object) {
  const auto violations = blocking_violations(object);
  if (!violations.empty()) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("object '{}' is invalid: {}", object.id, join_violations(violations)));
  }
  if (registry.objects.contains(object.id)) {
    throw Error(ErrorCode::DuplicateId, fmt::format("object '{}' already exists", object.id));
  }
  const std::string id = object.id;
  registry.objects.emplace(id, std::move(object));
}

void create_set(Registry& registry, ClothSet set) {
  if (set.id.empty()) throw Error(ErrorCode::InvalidArgument, "set id must not be empty");
  if (registry.sets.contains(set.id)) {
    throw Error(ErrorCode::DuplicateId, fmt::format("set '{}' already exists", set.id));
  }
  for (const auto& m : set.members) static_cast<void>(find_object(registry, m));
  const std::string id = set.id;
  registry.sets.emplace(id, std::move(set));
}

void add_member(Registry& registry, const std::string& set_id, const std::string& object_id) {
  static_cast<void>(find_object(registry, object_id));
  const auto it = registry.sets.find(set_id);
  if (it == registry.sets.end()) throw Error(ErrorCode::UnknownId, fmt::format("unknown set '{}'", set_id));
  auto& members = it->second.members;
  if (std::find(members.begin(), members.end(), object_id) == members.end()) members.push_back(object_id);
}

void add_measurement(Registry& registry, MeasurementRecord record) {
  if (!record.object_id.empty()) {
    static_cast<void>(find_object(registry, record.object_id));
    ClothObject& obj = registry.objects.at(record.object_id);
    if (!obj.mechanical) obj.mechanical.emplace();
    auto& m = *obj.mechanical;
    switch (record.kind()) {
      case PropertyKind::Stiffness:
        m.stiffness = record.value;
        break;
      case PropertyKind::Friction:
        m.friction = record.value;
        break;
      case PropertyKind::Elasticity: {
        const auto line = std::get<ElasticityInputs>(record.raw).line;
        std::erase_if(m.per_line, [line](const LineElasticity& l) { return l.line == line; });
        m.per_line.push_back({line, record.value});
        std::sort(m.per_line.begin(), m.per_line.end(),
                  [](const LineElasticity& a, const LineElasticity& b) { return a.line < b.line; });
        m.elasticity = elasticity_summary(m.per_line);
        break;
      }
    }
  }
  registry.measurements.push_back(std::move(record));
}

const ClothObject& find_object(const Registry& registry, const std::string& id) {
  const auto it = registry.objects.find(id);
  if (it == registry.objects.end()) throw Error(ErrorCode::UnknownId, fmt::format("unknown object '{}'", id));
  return it->second;
}

const ClothSet& find_set(const Registry& registry, const std::string& id) {
  const auto it = registry.sets.find(id);
  if (it == registry.sets.end()) throw Error(ErrorCode::UnknownId, fmt::format("unknown set '{}'", id));
  return it->second;
}

void check_registry(const Registry& registry) {
  for (const auto& [id, set] : registry.sets) {
    for (const auto& m : set.members) {
      if (!registry.objects.contains(m)) {
        throw Error(ErrorCode::ReferentialIntegrity,
                    fmt::format("set '{}' references missing object '{}'", id, m));
      }
    }
  }
  for (std::size_t i = 0; i < registry.measurements.size(); ++i) {
    const auto& r = registry.measurements[i];
    if (!r.object_id.empty() && !registry.objects.contains(r.object_id)) {
      throw Error(ErrorCode::ReferentialIntegrity,
                  fmt::format("measurement {} references missing object '{}'", i, r.object_id));
    }
    double derived = 0.0;
    try {
      derived = rederive(r.raw);
    } catch (const Error& e) {
      throw Error(ErrorCode::DerivationMismatch,
                  fmt::format("measurement {} raw inputs do not derive: {}", i, e.what()));
    }
    if (!(std::abs(derived - r.value) <= kDerivationTolerance)) {
      throw Error(ErrorCode::DerivationMismatch,
                  fmt::format("measurement {} stores {} but its inputs give {}", i, r.value, derived));
    }
  }
}

std::string to_json(const Registry& registry) {
  json objects = json::array();
  for (const auto& [id, o] : registry.objects) objects.push_back(object_to_json(o));
  json sets = json::array();
  for (const auto& [id, s] : registry.sets) sets.push_back(set_to_json(s));
  json records = json::array();
  for (const auto& r : registry.measurements) records.push_back(record_to_json(r));
  const json doc = {{"version", registry.version},
                    {"objects", objects},
                    {"sets", sets},
                    {"measurements", records}};
  return doc.dump(2) + "\n";
}

Registry registry_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    schema_error(fmt::format("not valid JSON: {}", e.what()));
  }
  if (!doc.is_object()) schema_error("registry document must be an object");
  const int version = read_int(doc, "version");
  if (version != kRegistryVersion) {
    throw Error(ErrorCode::SchemaVersionMismatch,
                fmt::format("registry version {} is not supported (expected {})", version, kRegistryVersion));
  }

  Registry registry;
  try {
    for (const auto& oj : field(doc, "objects")) {
      ClothObject o = object_from_json(oj);
      const auto violations = blocking_violations(o);
      if (!violations.empty()) {
        schema_error(fmt::format("object '{}' is invalid: {}", o.id, join_violations(violations)));
      }
      if (registry.objects.contains(o.id)) {
        throw Error(ErrorCode::DuplicateId, fmt::format("object '{}' appears twice", o.id));
      }
      const std::string id = o.id;
      registry.objects.emplace(id, std::move(o));
    }
    for (const auto& sj : field(doc, "sets")) {
      ClothSet s = set_from_json(sj);
      if (registry.sets.contains(s.id)) {
        throw Error(ErrorCode::DuplicateId, fmt::format("set '{}' appears twice", s.id));
      }
      const std::string id = s.id;
      registry.sets.emplace(id, std::move(s));
    }
    for (const auto& rj : field(doc, "measurements")) registry.measurements.push_back(record_from_json(rj));
  } catch (const json::exception& e) {
    schema_error(e.what());
  }
  check_registry(registry);
  return registry;
}

void save(const Registry& registry, const std::filesystem::path& path) {
  const std::string text = to_json(registry);
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, fmt::format("cannot write '{}'", tmp.string()));
    out << text;
    out.flush();
    if (!out) throw Error(ErrorCode::IoError, fmt::format("failed writing '{}'", tmp.string()));
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    throw Error(ErrorCode::IoError, fmt::format("cannot replace '{}': {}", path.string(), ec.message()));
  }
}

Registry load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, fmt::format("cannot read '{}'", path.string()));
  std::ostringstream text;
  text << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::IoError, fmt::format("failed reading '{}'", path.string()));
  return registry_from_json(text.str());
}

std::filesystem::path default_registry_path() {
  if (const char* env = std::getenv(kRegistryEnvVar); env != nullptr && *env != '\0') return env;
  return kDefaultRegistryFile;
}

RegistryLock::RegistryLock(const std::filesystem::path& registry_path) {
  std::filesystem::path lock_path = registry_path;
  lock_path += ".lock";
  fd_ = ::open(lock_path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
  if (fd_ < 0) {
    throw Error(ErrorCode::IoError,
                fmt::format("cannot open lock file '{}': {}", lock_path.string(), std::strerror(errno)));
  }
  if (::flock(fd_, LOCK_EX) != 0) {
    const int err = errno;
    ::close(fd_);
    throw Error(ErrorCode::IoError,
                fmt::format("cannot lock '{}': {}", lock_path.string(), std::strerror(err)));
  }
}

RegistryLock::~RegistryLock() {
  if (fd_ >= 0) {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
}

}  // namespace clothbench
