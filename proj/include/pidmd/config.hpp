#pragma once

// Declarative run configuration shared by every CLI subcommand.
//
// Paths are kept out of the config hash: the hash identifies the experiment,
// so the same config run into two output directories produces identical
// reports.

#include "pidmd/datagen.hpp"
#include "pidmd/io.hpp"
#include "pidmd/param_map.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace pidmd {

struct AffineGenerator {
  Index n = 8;
  double spectral_radius_target = 0.95;
  double coupling = 0.5;
  double noise_std = 0.0;
  double dt = 1.0;
};

struct ShearGenerator {
  ShearFamilySpec family;
  RealVector x0 = (RealVector(2) << 1.0, 0.3).finished();
  double dt = 1.0;
};

using GeneratorConfig = std::variant<AdvDiffSpec, AffineGenerator, ShearGenerator>;

struct Ranks {
  Index r_tilde = 10;
  Index r_hat = 10;
  /// Truncation rank for exact DMD and both baselines.
  Index r = 10;
};

struct RunConfig {
  std::filesystem::path data_dir = "data";
  std::filesystem::path output_dir = "out";
  std::optional<GeneratorConfig> generator;
  std::vector<Method> methods;
  std::vector<RealVector> training;
  std::vector<RealVector> test;
  std::string label_prefix = "theta";
  Ranks ranks;
  bool keep_pairs = false;
  Index horizon = 100;
  /// Transitions per trajectory used for fitting (training sets and the
  /// per-test exact DMD fits alike).
  Index train_snapshots = 100;
  Index transient_skip = 0;
  ParamMap param_map;
  std::uint64_t seed = 0;

  Index p() const { return training.empty() ? 0 : training.front().size(); }
  /// Transitions stored per generated trajectory.
  Index stored_transitions() const { return std::max(train_snapshots, horizon); }

  std::string label(const RealVector& theta) const { return theta_label(label_prefix, theta); }
  std::filesystem::path snapshot_path(const RealVector& theta) const {
    return data_dir / (label(theta) + ".pdmd");
  }
};

/// Parses and validates a config. Relative paths are resolved against
/// `base_dir`. Unknown keys anywhere are rejected.
RunConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// Canonical JSON with every default filled in and paths omitted.
nlohmann::json canonical_json(const RunConfig& config);
std::string config_hash(const RunConfig& config);

}  // namespace pidmd
