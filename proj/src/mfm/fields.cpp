#include "pbsrdd/mfm/fields.hpp"

#include <algorithm>
#include <cmath>

#include "pbsrdd/core/error.hpp"

namespace pbsrdd::mfm {

void SolverSettings::validate() const {
  if (!(dt_min > 0.0) || !(dt_max >= dt_min)) throw ModelError("solver needs 0 < dt_min <= dt_max");
  if (!(newton_tol > 0.0) || !(krylov_tol > 0.0) || !(positivity_tol > 0.0))
    throw ModelError("solver tolerances must be > 0");
  if (newton_max_iters < 1 || krylov_restart < 1 || krylov_max_iters < 1)
    throw ModelError("solver iteration limits must be >= 1");
  if (collocation_points < 4) throw ModelError("at least 4 collocation points are needed");
}

SpectralFields::SpectralFields(Mesh g, int n_species)
    : grid(g), species(n_species), values(static_cast<std::size_t>(n_species) * g.voxels(), 0.0) {}

double SpectralFields::mass(int s) const {
  double sum = 0.0;
  for (double v : field(s)) sum += v;
  return grid.spacing() * sum;
}

double SpectralFields::min_value() const { return *std::min_element(values.begin(), values.end()); }

std::vector<double> normalized_profile(const Mesh& grid, const std::function<double(double)>& f, double mass) {
  std::vector<double> out(static_cast<std::size_t>(grid.voxels()), 0.0);
  if (mass == 0.0) return out;
  double sum = 0.0;
  for (int i = 0; i < grid.voxels(); ++i) {
    double v = f(grid.node(i));
    if (!std::isfinite(v) || v < 0.0) throw ModelError("initial profile values must be finite and >= 0");
    out[static_cast<std::size_t>(i)] = v;
    sum += v;
  }
  if (!(sum > 0.0)) throw ModelError("initial profile is identically zero");
  const double scale = mass / (grid.spacing() * sum);
  for (double& v : out) v *= scale;
  return out;
}

}  // namespace pbsrdd::mfm
