#pragma once

#include <span>

#include "pbsrdd/core/mesh.hpp"
#include "pbsrdd/core/potential.hpp"

namespace pbsrdd {

/// A particle of a given species at a position.
struct Placed {
  int species = 0;
  double x = 0.0;
};

/// Lattice occupancy viewed as the scaled measure (1/gamma) sum_i n_{s,i} delta_{x_i}.
/// `counts` is species-major: counts[s * N + i].
struct LatticeBath {
  const Mesh& mesh;
  std::span<const int> counts;
  double gamma;
  const PotentialTable& table;

  int count(int s, int i) const { return counts[static_cast<std::size_t>(s) * mesh.voxels() + i]; }
  int species_count() const { return static_cast<int>(counts.size()) / mesh.voxels(); }
};

/// Concentration fields c_s(x_i) on a periodic grid; integrals against them use
/// the trapezoidal rule h * sum_i. `values` is species-major.
struct FieldBath {
  const Mesh& grid;
  std::span<const double> values;
  const PotentialTable& table;

  double value(int s, int i) const { return values[static_cast<std::size_t>(s) * grid.voxels() + i]; }
  int species_count() const { return static_cast<int>(values.size()) / grid.voxels(); }
};

/// sum_{s'} int u_{s,s'}(|x - y|) mu^{s'}(dy) minus u^gamma(x, x_e) for every
/// excluded particle e. Exclusions are matched to lattice nodes; an exclusion
/// without a matching particle in the state throws StateError.
double interaction_energy(int s, double x, const LatticeBath& bath, std::span<const Placed> exclusions);

/// Mean-field version: sum_{s'} int u_{s,s'}(|x - y|) c_{s'}(y) dy, trapezoidal.
double interaction_energy(int s, double x, const FieldBath& bath);

}  // namespace pbsrdd
