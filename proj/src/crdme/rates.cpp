#include "pbsrdd/crdme/rates.hpp"

#include <array>
#include <cmath>

#include "pbsrdd/core/error.hpp"
#include "pbsrdd/core/kernel.hpp"
#include "pbsrdd/core/placement.hpp"

namespace pbsrdd::crdme {

double hop_delta(const LatticeState& state, int s, int i, int j, const PotentialTable& table) {
  const Mesh& mesh = state.mesh();
  if (state.count(s, i) < 1) throw StateError("hop from an empty voxel");
  const std::array<Placed, 1> self{Placed{s, mesh.node(i)}};
  auto bath = state.bath(table);
  double after = table.one_body(s, mesh.node(j)) + interaction_energy(s, mesh.node(j), bath, self);
  double before = table.one_body(s, mesh.node(i)) + interaction_energy(s, mesh.node(i), bath, self);
  return after - before;
}

double bernoulli(double x) {
  const double ax = std::fabs(x);
  if (ax < 1e-8) return 1.0 - 0.5 * x;
  if (ax < 0.5) {
    // x / (e^x - 1) = 1 - x/2 + sum_k B_2k x^2k / (2k)!, truncated where the terms drop below 1e-17
    const double y = x * x;
    double p = -3617.0 / 10670622842880000.0;
    p = 7.0 / 523069747200.0 + y * p;
    p = -691.0 / 1307674368000.0 + y * p;
    p = 1.0 / 47900160.0 + y * p;
    p = -1.0 / 1209600.0 + y * p;
    p = 1.0 / 30240.0 + y * p;
    p = -1.0 / 720.0 + y * p;
    p = 1.0 / 12.0 + y * p;
    return 1.0 - 0.5 * x + y * p;
  }
  if (x > 0.0) {
    double e = std::exp(-x);
    return x * e / (1.0 - e);
  }
  return x / (std::exp(x) - 1.0);
}

double hop_rate(double diffusivity, double spacing, double delta) {
  return diffusivity / (spacing * spacing) * bernoulli(delta);
}

double binding_proposal_rate(int i, int j, const Mesh& mesh, const KernelSpec& kernel, double lambda, double gamma) {
  return lambda * kernel_at_distance(mesh.node_distance(i, j), kernel) / gamma;
}

double unbinding_proposal_rate(int k, const Mesh& mesh, const KernelSpec& kernel, const PotentialTable& table,
                               int first_product, int second_product, double gamma, double mu) {
  double z = unbinding_normalizer(mesh, kernel, table, first_product, second_product, gamma);
  auto local = backward_placement_distribution(k, mesh, kernel, table, first_product, second_product, gamma);
  return mu * local.normalizer / z;
}

}  // namespace pbsrdd::crdme
