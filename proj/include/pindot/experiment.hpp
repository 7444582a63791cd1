#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pindot/io.hpp"

namespace pindot {

inline constexpr const char* kToolVersion = "pindot 0.1.0";

/// A configuration that violates a precondition; maps to exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Generator documents, e.g. {"type": "cantor", "ratio": "1/3", "branches": 2,
/// "depth": 6, "level": 10, "power": 2}. Other types: cantor_dimension,
/// product, interval, point, sharpness, slab, random, file.
void validate_generator(const json& g);
PointCloud generate(const json& g);
/// generate() through a write-once content-addressed cache directory.
PointCloud generate_cached(const json& g, const std::filesystem::path& cache_dir);

/// Hex SHA-256 of the canonical (sorted-key, compact) serialization.
std::string content_hash(const json& j);

enum class ExperimentKind { keylemma, calibrate, scan, pins, translation, restricted, trees, sharpness };
std::string to_string(ExperimentKind k);
ExperimentKind parse_experiment(const std::string& s);

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::keylemma;
  json generator;  // null when the experiment builds its own inputs
  json params = json::object();
  std::uint64_t seed = 1;
  std::string output = "out";
  std::string cache;  // default: <output>/cache

  /// Parses and validates against the target module's preconditions. Throws ConfigError.
  static ExperimentConfig from_json(const json& j);
  json to_json() const;
  std::string hash() const { return content_hash(to_json()); }
};

struct RunRecord {
  std::string experiment;
  std::string config_hash;
  std::string tool_version = kToolVersion;
  double wall_time = 0.0;
  std::vector<std::string> outputs;  // relative to the output directory
  bool pass = false;
  bool exploratory = false;
  std::vector<std::string> warnings;
  json summary = json::object();
};

json to_json(const RunRecord& r);
RunRecord record_from_json(const json& j);

/// Runs the experiment, writes its JSON and CSV artifacts plus record.json.
/// Artifacts are byte-identical across reruns of the same config.
RunRecord run(const ExperimentConfig& cfg);

struct Summary {
  json document;
  std::string table;
  bool pass = false;
};

/// Single-shot utilities behind the gen, project, dotset and dim commands.
/// Each takes {"generator": ..., ...}, writes its artifact into out_dir and
/// returns a short description of what it wrote.
json run_tool(const std::string& op, const json& cfg, const std::filesystem::path& out_dir);

/// Throws ConfigError on an empty list.
Summary report(const std::vector<RunRecord>& records);

// Calibration corpus shared by the calibrate experiment and the acceptance run.

struct CorpusMember {
  CantorSpec spec;
  int power = 1;
};

struct CalibrationRow {
  CorpusMember member;
  int level = 0;
  double analytic = 0.0;
  double dyadic = 0.0;
  double native = 0.0;  // base = ratio denominator, levels [1, min(depth, kmax)]
  int native_base = 2;
};

std::vector<CorpusMember> calibration_corpus();
CalibrationRow calibrate_member(const CorpusMember& m);

}  // namespace pindot
