#include "pbsrdd/cli/compare.hpp"

#include <algorithm>
#include <cmath>

#include "pbsrdd/core/error.hpp"

namespace pbsrdd::cli {

SeriesComparison compare_series(std::span<const double> particle_times, std::span<const double> particle,
                                std::span<const double> meanfield_times, std::span<const double> meanfield) {
  if (particle_times.size() != particle.size() || meanfield_times.size() != meanfield.size())
    throw ModelError("series and time grids differ in length");
  if (!std::equal(particle_times.begin(), particle_times.end(), meanfield_times.begin(), meanfield_times.end()))
    throw ModelError("particle and mean-field series use different record grids");
  if (particle.empty()) throw ModelError("cannot compare empty series");
  SeriesComparison c;
  c.times.assign(particle_times.begin(), particle_times.end());
  for (std::size_t k = 0; k < particle.size(); ++k) {
    double e = std::abs(particle[k] - meanfield[k]);
    c.errors.push_back(e);
    if (e > c.sup_error) {
      c.sup_error = e;
      c.sup_index = k;
    }
  }
  c.sup_time = c.times[c.sup_index];
  return c;
}

}  // namespace pbsrdd::cli
