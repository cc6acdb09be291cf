#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "pbsrdd/mfm/imex.hpp"

namespace pbsrdd::mfm {

struct MfmSolution {
  std::vector<double> times;
  std::vector<SpectralFields> fields;
  std::vector<std::array<double, 3>> masses;  // trapezoidal molar masses per output time
  std::uint64_t steps = 0;
  std::uint64_t retries = 0;
  std::uint64_t newton_iterations = 0;
  std::uint64_t krylov_iterations = 0;
  double smallest_dt = 0.0;
};

/// Integrates from `initial` through the sorted output times. Steps are
/// shortened to land exactly on each output time. `progress` (optional) is
/// called with the current time after every output.
MfmSolution solve(const PideSystem& system, const SpectralFields& initial, std::span<const double> output_times,
                  const SolverSettings& settings, const std::function<void(double)>& progress = {});

/// CSV `time,x,A,B,C` (species names from the network header).
void write_fields_csv(std::ostream& out, const MfmSolution& solution, const std::vector<std::string>& names);
/// CSV `time,mass_A,mass_B,mass_C`.
void write_mass_csv(std::ostream& out, const MfmSolution& solution, const std::vector<std::string>& names);

}  // namespace pbsrdd::mfm
