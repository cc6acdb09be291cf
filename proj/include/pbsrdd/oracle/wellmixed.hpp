#pragma once

#include <array>
#include <span>
#include <vector>

namespace pbsrdd::oracle {

using Concentrations = std::array<double, 3>;  // (a, b, c)

/// a' = -lambda a b + mu c, b' = -lambda a b + mu c, c' = lambda a b - mu c,
/// integrated with adaptive Dormand-Prince at absolute and relative tolerance
/// `tolerance`, reported at each of the sorted `times`.
std::vector<Concentrations> wellmixed_ode(Concentrations initial, double lambda, double mu,
                                          std::span<const double> times, double tolerance = 1e-12);

Concentrations wellmixed_ode(Concentrations initial, double lambda, double mu, double t, double tolerance = 1e-12);

}  // namespace pbsrdd::oracle
