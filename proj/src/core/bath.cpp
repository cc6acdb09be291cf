#include "pbsrdd/core/bath.hpp"

#include <cmath>
#include <map>
#include <utility>

#include "pbsrdd/core/error.hpp"

namespace pbsrdd {

double interaction_energy(int s, double x, const LatticeBath& bath, std::span<const Placed> exclusions) {
  const Mesh& mesh = bath.mesh;
  const int n = mesh.voxels();
  const int species = bath.species_count();
  double sum = 0.0;
  for (int t = 0; t < species; ++t) {
    if (bath.table.cutoff(t, s) <= 0.0) continue;
    for (int k = 0; k < n; ++k) {
      int c = bath.count(t, k);
      if (c == 0) continue;
      sum += c * bath.table.pair(s, t, periodic_distance(x, mesh.node(k), mesh.length()));
    }
  }

  std::map<std::pair<int, int>, int> used;
  for (const auto& e : exclusions) {
    int k = mesh.nearest_voxel(e.x);
    if (periodic_distance(e.x, mesh.node(k), mesh.length()) > 1e-9 * mesh.spacing())
      throw StateError("inconsistent exclusion: position is not a mesh node");
    if (e.species < 0 || e.species >= species) throw StateError("inconsistent exclusion: unknown species");
    if (++used[{e.species, k}] > bath.count(e.species, k))
      throw StateError("inconsistent exclusion: voxel " + std::to_string(k) + " holds no such particle");
    sum -= bath.table.pair(s, e.species, periodic_distance(x, mesh.node(k), mesh.length()));
  }
  return sum / bath.gamma;
}

double interaction_energy(int s, double x, const FieldBath& bath) {
  const Mesh& grid = bath.grid;
  const int n = grid.voxels();
  double sum = 0.0;
  for (int t = 0; t < bath.species_count(); ++t) {
    if (bath.table.cutoff(t, s) <= 0.0) continue;
    for (int k = 0; k < n; ++k)
      sum += bath.value(t, k) * bath.table.pair(s, t, periodic_distance(x, grid.node(k), grid.length()));
  }
  return grid.spacing() * sum;
}

}  // namespace pbsrdd
