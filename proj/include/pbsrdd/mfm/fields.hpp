#pragma once

#include <functional>
#include <span>
#include <vector>

#include "pbsrdd/core/mesh.hpp"

namespace pbsrdd::mfm {

enum class ConvolutionPath { fft, dense };

struct SolverSettings {
  double dt_max = 1e-4;
  double dt_min = 1e-7;
  double newton_tol = 1e-10;  // max-norm of the implicit residual
  int newton_max_iters = 20;
  double krylov_tol = 1e-3;   // relative, per Newton step
  int krylov_restart = 30;
  int krylov_max_iters = 300;
  double positivity_tol = 1e-8;
  int collocation_points = 512;
  ConvolutionPath convolution = ConvolutionPath::fft;

  void validate() const;
};

/// Nodal values of every species on the collocation grid x_i = i L / N,
/// species-major, plus the time they belong to.
struct SpectralFields {
  Mesh grid;
  int species = 0;
  double time = 0.0;
  std::vector<double> values;

  SpectralFields(Mesh grid, int species);

  int points() const { return grid.voxels(); }
  double& at(int s, int i) { return values[static_cast<std::size_t>(s) * grid.voxels() + i]; }
  double at(int s, int i) const { return values[static_cast<std::size_t>(s) * grid.voxels() + i]; }
  std::span<double> field(int s) {
    return std::span<double>(values).subspan(static_cast<std::size_t>(s) * grid.voxels(), grid.voxels());
  }
  std::span<const double> field(int s) const {
    return std::span<const double>(values).subspan(static_cast<std::size_t>(s) * grid.voxels(), grid.voxels());
  }

  /// Trapezoidal integral h * sum_i.
  double mass(int s) const;
  double min_value() const;
};

/// Samples f on the grid and rescales it to the requested trapezoidal mass.
/// A zero mass gives the zero field; an all-zero profile with nonzero mass throws.
std::vector<double> normalized_profile(const Mesh& grid, const std::function<double(double)>& f, double mass);

}  // namespace pbsrdd::mfm
