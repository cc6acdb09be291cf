#include "pbsrdd/oracle/wellmixed.hpp"

#include <algorithm>
#include <boost/numeric/odeint.hpp>

#include "pbsrdd/core/error.hpp"

namespace pbsrdd::oracle {

std::vector<Concentrations> wellmixed_ode(Concentrations initial, double lambda, double mu,
                                          std::span<const double> times, double tolerance) {
  namespace odeint = boost::numeric::odeint;
  if (std::any_of(initial.begin(), initial.end(), [](double v) { return v < 0.0; }))
    throw ModelError("well-mixed initial data must be nonnegative");
  if (!std::is_sorted(times.begin(), times.end())) throw ModelError("output times must be sorted");
  auto rhs = [&](const Concentrations& y, Concentrations& dy, double) {
    double flux = lambda * y[0] * y[1] - mu * y[2];
    dy = {-flux, -flux, flux};
  };
  std::vector<Concentrations> out;
  out.reserve(times.size());
  std::vector<double> grid{0.0};
  grid.insert(grid.end(), times.begin(), times.end());
  if (grid.size() > 1 && grid[1] < 0.0) throw ModelError("output times must be >= 0");
  Concentrations y = initial;
  bool skip_origin = true;
  odeint::integrate_times(odeint::make_dense_output(tolerance, tolerance, odeint::runge_kutta_dopri5<Concentrations>()),
                          rhs, y, grid.begin(), grid.end(), 1e-3, [&](const Concentrations& state, double) {
                            if (skip_origin) {
                              skip_origin = false;
                              return;
                            }
                            out.push_back(state);
                          });
  return out;
}

Concentrations wellmixed_ode(Concentrations initial, double lambda, double mu, double t, double tolerance) {
  const double times[] = {t};
  return wellmixed_ode(initial, lambda, mu, times, tolerance)[0];
}

}  // namespace pbsrdd::oracle
