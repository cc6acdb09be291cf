#include "pbsrdd/core/kernel.hpp"

#include <cmath>
#include <numbers>

#include "pbsrdd/core/error.hpp"
#include "pbsrdd/core/mesh.hpp"

namespace pbsrdd {

namespace {

double gaussian(double r, double width) {
  return std::exp(-r * r / (2.0 * width * width)) / std::sqrt(2.0 * std::numbers::pi * width * width);
}

}  // namespace

double kernel_normalization(double width, double length, int quadrature_points) {
  if (!(width > 0.0)) throw ModelError("kernel width must be > 0");
  if (!(length > 0.0)) throw ModelError("kernel domain length must be > 0");
  if (quadrature_points < 64) throw ModelError("kernel normalization needs at least 64 quadrature points");
  const double h = length / quadrature_points;
  double sum = 0.0;
  for (int m = 0; m < quadrature_points; ++m) sum += gaussian(periodic_distance(m * h, 0.0, length), width);
  return h * sum;
}

KernelSpec make_kernel(double width, double length, int quadrature_points) {
  return KernelSpec{width, kernel_normalization(width, length, quadrature_points), length};
}

double kernel_at_distance(double r, const KernelSpec& k) { return gaussian(r, k.width) / k.normalization; }

double kernel_eval(double x, double y, const KernelSpec& k) {
  return kernel_at_distance(periodic_distance(x, y, k.length), k);
}

}  // namespace pbsrdd
