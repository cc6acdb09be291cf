#pragma once

#include <vector>

#include "pbsrdd/core/mesh.hpp"
#include "pbsrdd/core/network.hpp"
#include "pbsrdd/core/potential.hpp"
#include "pbsrdd/core/random.hpp"

namespace pbsrdd {

/// Forward placement of a single product: x_a or x_b with probability 1/2 each.
double sample_forward_placement(double x_a, double x_b, PhiloxStream& rng);

/// Partner distribution for a 1 -> 2 unbinding of a particle at node z.
/// With probability 1/2 the first product sits at z and the second at voxel i,
/// otherwise the roles swap; in both branches the partner voxel is drawn from
///   w_i = h K(x_i, z) exp(-u^gamma_{p1,p2}(x_i, z)).
struct BackwardPlacement {
  int z = 0;
  std::vector<double> weights;
  double normalizer = 0.0;  // sum of weights

  /// Probability that the first product lands in voxel a and the second in b.
  double pair_probability(int a, int b) const;
};

BackwardPlacement backward_placement_distribution(int z, const Mesh& mesh, const KernelSpec& kernel,
                                                  const PotentialTable& table, int first_product,
                                                  int second_product, double gamma);

/// Z_AB on the mesh: sum_i h K(x_i, x_0) exp(-u^gamma(x_i, x_0)).
double unbinding_normalizer(const Mesh& mesh, const KernelSpec& kernel, const PotentialTable& table,
                            int first_product, int second_product, double gamma);

}  // namespace pbsrdd
