#include "pbsrdd/mfm/solve.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "pbsrdd/core/error.hpp"

namespace pbsrdd::mfm {

MfmSolution solve(const PideSystem& system, const SpectralFields& initial, std::span<const double> output_times,
                  const SolverSettings& settings, const std::function<void(double)>& progress) {
  settings.validate();
  if (!std::is_sorted(output_times.begin(), output_times.end()))
    throw ModelError("output times must be sorted");
  if (!output_times.empty() && output_times.front() < initial.time)
    throw ModelError("output times must not precede the initial time");

  MfmSolution sol;
  sol.smallest_dt = settings.dt_max;
  SpectralFields state = initial;
  double dt = settings.dt_max;
  auto record = [&](double t) {
    state.time = t;
    sol.times.push_back(t);
    sol.fields.push_back(state);
    sol.masses.push_back({state.mass(0), state.mass(1), state.mass(2)});
    if (progress) progress(t);
  };

  for (double target : output_times) {
    while (state.time < target) {
      double remaining = target - state.time;
      // merge a sliver into the final step instead of leaving it for a tiny one
      bool last = dt >= remaining * (1.0 - 1e-9) || remaining - dt < 1e-9 * dt;
      double step = last ? remaining : dt;
      StepResult r = imex_step(system, state, step, settings);
      ++sol.steps;
      sol.retries += static_cast<std::uint64_t>(r.retries);
      sol.newton_iterations += static_cast<std::uint64_t>(r.newton_iterations);
      sol.krylov_iterations += static_cast<std::uint64_t>(r.krylov_iterations);
      sol.smallest_dt = std::min(sol.smallest_dt, r.dt);
      if (r.retries > 0) dt = r.dt;
      if (last && r.retries == 0) state.time = target;
      dt = std::min(settings.dt_max, 2.0 * dt);
    }
    record(target);
  }
  return sol;
}

namespace {

void check_names(const std::vector<std::string>& names) {
  if (names.size() != 3) throw ModelError("three species names are needed");
}

}  // namespace

void write_fields_csv(std::ostream& out, const MfmSolution& solution, const std::vector<std::string>& names) {
  check_names(names);
  out << "time,x," << names[0] << ',' << names[1] << ',' << names[2] << '\n';
  out.precision(17);
  for (std::size_t k = 0; k < solution.fields.size(); ++k) {
    const auto& f = solution.fields[k];
    for (int i = 0; i < f.points(); ++i)
      out << solution.times[k] << ',' << f.grid.node(i) << ',' << f.at(0, i) << ',' << f.at(1, i) << ','
          << f.at(2, i) << '\n';
  }
}

void write_mass_csv(std::ostream& out, const MfmSolution& solution, const std::vector<std::string>& names) {
  check_names(names);
  out << "time,mass_" << names[0] << ",mass_" << names[1] << ",mass_" << names[2] << '\n';
  out.precision(17);
  for (std::size_t k = 0; k < solution.times.size(); ++k)
    out << solution.times[k] << ',' << solution.masses[k][0] << ',' << solution.masses[k][1] << ','
        << solution.masses[k][2] << '\n';
}

}  // namespace pbsrdd::mfm
