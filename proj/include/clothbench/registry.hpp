#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "clothbench/cloth_model.hpp"
#include "clothbench/measurement.hpp"

namespace clothbench {

inline constexpr int kRegistryVersion = 1;
inline constexpr const char* kRegistryEnvVar = "CLOTHBENCH_REGISTRY";
inline constexpr const char* kDefaultRegistryFile = "clothbench.json";
/// Largest accepted difference between a stored and a re-derived value.
inline constexpr double kDerivationTolerance = 1e-9;

struct Registry {
  int version = kRegistryVersion;
  std::map<std::string, ClothObject> objects;
  std::map<std::string, ClothSet> sets;
  std::vector<MeasurementRecord> measurements;

  bool operator==(const Registry&) const = default;
};

/// Adds a validated object. Throws DuplicateId, or InvalidArgument listing the
/// violations (a missing colour list is tolerated for partial records).
void add_object(Registry& registry, ClothObject object);
/// Throws DuplicateId, or UnknownId when a member is not registered.
void create_set(Registry& registry, ClothSet set);
/// Throws UnknownId for an unknown set or object; adding an existing member is a no-op.
void add_member(Registry& registry, const std::string& set_id, const std::string& object_id);
/// Appends the record and, when it is attached to an object, stores the value
/// in the object's mechanical properties. Throws UnknownId.
void add_measurement(Registry& registry, MeasurementRecord record);

[[nodiscard]] const ClothObject& find_object(const Registry& registry, const std::string& id);
[[nodiscard]] const ClothSet& find_set(const Registry& registry, const std::string& id);

/// Throws ReferentialIntegrity for dangling set members or record object ids,
/// and DerivationMismatch when a stored value does not re-derive from its raw
/// inputs within kDerivationTolerance.
void check_registry(const Registry& registry);

[[nodiscard]] std::string to_json(const Registry& registry);
/// Parses and checks a registry document. Throws SchemaVersionMismatch,
/// SchemaInvalid, DuplicateId, ReferentialIntegrity, DerivationMismatch.
[[nodiscard]] Registry registry_from_json(std::string_view text);

/// Writes atomically (temporary file + rename). Throws IoError.
void save(const Registry& registry, const std::filesystem::path& path);
/// Throws IoError when the file cannot be read, then as registry_from_json.
[[nodiscard]] Registry load(const std::filesystem::path& path);

/// CLOTHBENCH_REGISTRY when set, otherwise ./clothbench.json.
[[nodiscard]] std::filesystem::path default_registry_path();

/// Exclusive advisory lock on "<registry>.lock", held for the object's lifetime.
class RegistryLock {
 public:
  explicit RegistryLock(const std::filesystem::path& registry_path);
  ~RegistryLock();
  RegistryLock(const RegistryLock&) = delete;
  RegistryLock& operator=(const RegistryLock&) = delete;

 private:
  int fd_ = -1;
};

}  // namespace clothbench
