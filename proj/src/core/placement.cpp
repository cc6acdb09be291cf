#include "pbsrdd/core/placement.hpp"

#include <cmath>

#include "pbsrdd/core/error.hpp"
#include "pbsrdd/core/kernel.hpp"

namespace pbsrdd {

double sample_forward_placement(double x_a, double x_b, PhiloxStream& rng) {
  return rng.uniform() < 0.5 ? x_a : x_b;
}

double BackwardPlacement::pair_probability(int a, int b) const {
  double p = 0.0;
  if (a == z) p += 0.5 * weights[static_cast<std::size_t>(b)];
  if (b == z) p += 0.5 * weights[static_cast<std::size_t>(a)];
  return p / normalizer;
}

BackwardPlacement backward_placement_distribution(int z, const Mesh& mesh, const KernelSpec& kernel,
                                                  const PotentialTable& table, int first_product,
                                                  int second_product, double gamma) {
  BackwardPlacement out;
  out.z = mesh.wrap(z);
  const int n = mesh.voxels();
  const double h = mesh.spacing();
  out.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double r = mesh.node_distance(i, out.z);
    double w = h * kernel_at_distance(r, kernel) * std::exp(-table.pair(first_product, second_product, r) / gamma);
    out.weights[static_cast<std::size_t>(i)] = w;
    out.normalizer += w;
  }
  if (!(out.normalizer > 0.0)) throw ModelError("backward placement weights vanish identically");
  return out;
}

double unbinding_normalizer(const Mesh& mesh, const KernelSpec& kernel, const PotentialTable& table,
                            int first_product, int second_product, double gamma) {
  return backward_placement_distribution(0, mesh, kernel, table, first_product, second_product, gamma).normalizer;
}

}  // namespace pbsrdd
