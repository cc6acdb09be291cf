#pragma once

#include <span>
#include <vector>

#include "pbsrdd/core/bath.hpp"
#include "pbsrdd/core/mesh.hpp"
#include "pbsrdd/core/random.hpp"

namespace pbsrdd::crdme {

/// Per-voxel particle counts for every species on a periodic mesh, plus the
/// population scale gamma and the simulation clock.
class LatticeState {
 public:
  LatticeState(Mesh mesh, int species, double gamma);

  const Mesh& mesh() const { return mesh_; }
  int species() const { return species_; }
  double gamma() const { return gamma_; }

  double time = 0.0;

  int count(int s, int i) const { return counts_[index(s, i)]; }
  void set(int s, int i, int n);
  void add(int s, int i, int delta);
  long total(int s) const;

  std::span<const int> counts() const { return counts_; }
  std::span<const int> counts(int s) const {
    return std::span<const int>(counts_).subspan(static_cast<std::size_t>(s) * mesh_.voxels(), mesh_.voxels());
  }

  LatticeBath bath(const PotentialTable& table) const { return LatticeBath{mesh_, counts_, gamma_, table}; }

  bool operator==(const LatticeState& other) const;

 private:
  std::size_t index(int s, int i) const {
    return static_cast<std::size_t>(s) * mesh_.voxels() + static_cast<std::size_t>(mesh_.wrap(i));
  }

  Mesh mesh_;
  int species_;
  double gamma_;
  std::vector<int> counts_;
};

/// Initial placement law for one species: particles are drawn i.i.d. from the
/// discrete distribution proportional to `weights` (one value per node); the
/// number of particles is floor(mass * gamma).
struct InitialProfile {
  std::vector<double> weights;
  double mass = 0.0;
};

int initial_count(const InitialProfile& profile, double gamma);

/// Samples each particle's voxel independently. Throws ModelError when a species
/// with particles has an all-zero or negative profile.
LatticeState initialize_particles(double gamma, std::span<const InitialProfile> profiles, const Mesh& mesh,
                                  PhiloxStream& rng);

}  // namespace pbsrdd::crdme
