#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pbsrdd/core/network.hpp"
#include "pbsrdd/mfm/fields.hpp"

namespace pbsrdd::cli {

inline constexpr std::string_view kVersion = "0.1.0";

/// Initial profile of one species: either an expression in x or values on a
/// uniform periodic grid (linearly interpolated), scaled to `mass`.
struct ProfileSpec {
  std::string expression;
  std::vector<double> values;
  double mass = 0.0;

  bool operator==(const ProfileSpec&) const = default;
};

struct ExperimentConfig {
  double length = 6.283185307179586;
  int voxels = 64;  // CRDME lattice
  std::array<SpeciesSpec, 3> species{SpeciesSpec{"A", 0.25, 0.05}, SpeciesSpec{"B", 0.25, 0.05},
                                     SpeciesSpec{"C", 0.5, 0.1}};
  double kappa = 200.0;
  double cutoff_factor = 3.0;
  double binding_rate = 1.0;
  double unbinding_rate = 0.05;
  double kernel_width = 0.15;
  std::array<ProfileSpec, 3> initial{ProfileSpec{"exp(-5 * dist(x, 0.75 * pi)^2)", {}, 0.5},
                                     ProfileSpec{"exp(-5 * dist(x, 1.25 * pi)^2)", {}, 0.5},
                                     ProfileSpec{"0", {}, 0.0}};
  std::vector<double> gammas{50, 100, 150, 200, 250, 350, 500, 1000};
  std::uint64_t replicates = 10000;
  double t_end = 40.0;
  std::vector<double> record_times;  // empty means 81 uniform times on [0, t_end]
  std::vector<double> field_times;   // empty means {t_end}
  std::uint64_t seed = 1;
  bool free_reference = true;  // also solve the mean-field model with kappa = 0
  mfm::SolverSettings solver;
  int workers = 1;
  std::string output_dir = "pbsrdd-out";

  /// Fills the record and field grids when empty, then checks every field.
  /// Throws ModelError naming the offending key.
  void finalize();

  std::vector<std::string> species_names() const;
};

bool operator==(const SpeciesSpec& a, const SpeciesSpec& b);

/// Parses a JSON object. Unknown keys and type mismatches throw ModelError
/// with the key path; missing keys keep their defaults.
ExperimentConfig parse_config_text(std::string_view json_text);
ExperimentConfig parse_config(const std::string& path);

/// Complete JSON of a finalized config, every default explicit.
std::string echo_config(const ExperimentConfig& config);

/// FNV-1a of the echoed config without the settings that cannot change
/// results (worker count and output directory).
std::uint64_t config_hash(const ExperimentConfig& config);
std::string hash_hex(std::uint64_t hash);

}  // namespace pbsrdd::cli
