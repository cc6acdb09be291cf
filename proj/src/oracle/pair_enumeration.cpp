#include "pbsrdd/oracle/pair_enumeration.hpp"

#include <utility>
#include <vector>

#include "pbsrdd/core/error.hpp"

namespace pbsrdd::oracle {

double total_energy(const crdme::LatticeState& state, const PotentialTable& table) {
  const Mesh& mesh = state.mesh();
  std::vector<std::pair<int, int>> particles;
  for (int s = 0; s < state.species(); ++s)
    for (int i = 0; i < mesh.voxels(); ++i)
      for (int c = 0; c < state.count(s, i); ++c) particles.emplace_back(s, i);
  double pairs = 0.0, single = 0.0;
  for (std::size_t p = 0; p < particles.size(); ++p) {
    single += table.one_body(particles[p].first, mesh.node(particles[p].second));
    for (std::size_t q = 0; q < p; ++q)
      pairs += table.pair(particles[p].first, particles[q].first,
                          mesh.node_distance(particles[p].second, particles[q].second));
  }
  return pairs / state.gamma() + single;
}

double move_delta(const crdme::LatticeState& state, int s, int i, int j, const PotentialTable& table) {
  if (state.count(s, i) == 0) throw StateError("no particle to move");
  crdme::LatticeState after = state;
  after.add(s, i, -1);
  after.add(s, j, 1);
  return total_energy(after, table) - total_energy(state, table);
}

}  // namespace pbsrdd::oracle
