#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "pbsrdd/crdme/lattice.hpp"
#include "pbsrdd/crdme/simulator.hpp"

namespace pbsrdd::crdme {

struct EnsembleConfig {
  std::shared_ptr<const CrdmeTables> tables;
  std::vector<InitialProfile> initial;
  std::vector<double> record_times;
  std::uint64_t replicates = 1;
  std::uint64_t base_seed = 0;
  int workers = 1;
  /// Optional progress hook, called with the number of finished replicates.
  std::function<void(std::uint64_t)> progress;
};

/// Replicate-averaged observables. Concentrations are counts / (h gamma);
/// molar masses are total counts / gamma. Standard errors are sample standard
/// deviations over sqrt(R) (zero when R = 1).
struct EnsembleStats {
  std::vector<double> times;
  int species = 0;
  int voxels = 0;
  double gamma = 1.0;
  double spacing = 1.0;
  std::uint64_t replicates = 0;
  std::uint64_t events = 0;
  std::uint64_t rejections = 0;

  std::vector<double> concentration;         // [t][s][i]
  std::vector<double> concentration_stderr;  // [t][s][i]
  std::vector<double> molar_mass;            // [t][s]
  std::vector<double> molar_mass_stderr;     // [t][s]

  double mean_concentration(std::size_t t, int s, int i) const {
    return concentration[(t * static_cast<std::size_t>(species) + static_cast<std::size_t>(s)) * voxels + i];
  }
  double mass(std::size_t t, int s) const { return molar_mass[t * static_cast<std::size_t>(species) + s]; }
  double mass_stderr(std::size_t t, int s) const { return molar_mass_stderr[t * static_cast<std::size_t>(species) + s]; }
};

/// Runs R independent replicates. Replicate r draws its initial state and its
/// trajectory from PhiloxStream(base_seed, r). Sums are accumulated in exact
/// integer arithmetic, so the result is bit-identical for any worker count.
EnsembleStats run_ensemble(const EnsembleConfig& config);

}  // namespace pbsrdd::crdme
