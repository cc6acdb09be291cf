#pragma once

#include <span>
#include <vector>

namespace pbsrdd::cli {

struct SeriesComparison {
  std::vector<double> times;
  std::vector<double> errors;  // |particle - meanfield| per record time
  double sup_error = 0.0;
  double sup_time = 0.0;
  std::size_t sup_index = 0;  // first index attaining the sup
};

/// Pointwise absolute differences on a common record grid. Grids must agree
/// exactly; anything else throws ModelError.
SeriesComparison compare_series(std::span<const double> particle_times, std::span<const double> particle,
                                std::span<const double> meanfield_times, std::span<const double> meanfield);

}  // namespace pbsrdd::cli
