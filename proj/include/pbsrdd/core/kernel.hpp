#pragma once

#include "pbsrdd/core/network.hpp"

namespace pbsrdd {

/// Z = (1 / sqrt(2 pi sigma^2)) * int_0^L exp(-|x - y|^2 / (2 sigma^2)) dx by
/// the periodic trapezoidal rule on quadrature_points nodes (>= 64).
double kernel_normalization(double width, double length, int quadrature_points);

KernelSpec make_kernel(double width, double length, int quadrature_points = 4096);

/// K(x, y) using the periodic distance.
double kernel_eval(double x, double y, const KernelSpec& kernel);

/// K as a function of the periodic distance r.
double kernel_at_distance(double r, const KernelSpec& kernel);

}  // namespace pbsrdd
