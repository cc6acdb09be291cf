#include "pbsrdd/crdme/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "pbsrdd/core/error.hpp"

namespace pbsrdd::crdme {

LatticeState::LatticeState(Mesh mesh, int species, double gamma)
    : mesh_(mesh), species_(species), gamma_(gamma),
      counts_(static_cast<std::size_t>(species) * static_cast<std::size_t>(mesh.voxels()), 0) {
  if (species < 1) throw ModelError("lattice state needs at least one species");
  if (!(gamma > 0.0)) throw ModelError("gamma must be > 0");
}

void LatticeState::set(int s, int i, int n) {
  if (n < 0) throw StateError("negative particle count");
  counts_[index(s, i)] = n;
}

void LatticeState::add(int s, int i, int delta) {
  int& c = counts_[index(s, i)];
  if (c + delta < 0) throw StateError("particle count would become negative");
  c += delta;
}

long LatticeState::total(int s) const {
  auto span = counts(s);
  return std::accumulate(span.begin(), span.end(), 0L);
}

bool LatticeState::operator==(const LatticeState& other) const {
  return species_ == other.species_ && gamma_ == other.gamma_ && mesh_.voxels() == other.mesh_.voxels() &&
         mesh_.length() == other.mesh_.length() && time == other.time && counts_ == other.counts_;
}

int initial_count(const InitialProfile& profile, double gamma) {
  return static_cast<int>(std::floor(profile.mass * gamma + 1e-9));
}

LatticeState initialize_particles(double gamma, std::span<const InitialProfile> profiles, const Mesh& mesh,
                                  PhiloxStream& rng) {
  LatticeState state(mesh, static_cast<int>(profiles.size()), gamma);
  const int n = mesh.voxels();
  std::vector<double> cdf(static_cast<std::size_t>(n));
  for (std::size_t s = 0; s < profiles.size(); ++s) {
    const auto& p = profiles[s];
    int count = initial_count(p, gamma);
    if (count == 0) continue;
    if (p.weights.size() != static_cast<std::size_t>(n))
      throw ModelError("initial profile for species " + std::to_string(s) + " has " +
                       std::to_string(p.weights.size()) + " values, mesh has " + std::to_string(n));
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      double w = p.weights[static_cast<std::size_t>(i)];
      if (!(w >= 0.0) || !std::isfinite(w)) throw ModelError("initial profile values must be finite and >= 0");
      acc += w;
      cdf[static_cast<std::size_t>(i)] = acc;
    }
    if (!(acc > 0.0)) throw ModelError("initial profile for species " + std::to_string(s) + " is identically zero");
    for (int k = 0; k < count; ++k) {
      double target = rng.uniform() * acc;
      auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
      int voxel = it == cdf.end() ? n - 1 : static_cast<int>(it - cdf.begin());
      // skip zero-weight voxels that share a cdf value with their predecessor
      while (p.weights[static_cast<std::size_t>(voxel)] == 0.0 && voxel > 0) --voxel;
      state.add(static_cast<int>(s), voxel, 1);
    }
  }
  return state;
}

}  // namespace pbsrdd::crdme
