#pragma once

#include "pbsrdd/core/network.hpp"
#include "pbsrdd/core/potential.hpp"
#include "pbsrdd/crdme/lattice.hpp"

namespace pbsrdd::crdme {

/// Energy change when one particle of species s hops from voxel i to the
/// adjacent voxel j, with the particle's own contribution removed from the
/// bath. Throws StateError when voxel i holds no particle of species s.
double hop_delta(const LatticeState& state, int s, int i, int j, const PotentialTable& table);

/// Bernoulli function x / (e^x - 1), evaluated without overflow or cancellation.
double bernoulli(double x);

/// (D / h^2) * delta / (e^delta - 1).
double hop_rate(double diffusivity, double spacing, double delta);

/// Proposal rate for one (A in voxel i, B in voxel j) pair: lambda K(x_i, x_j) / gamma.
double binding_proposal_rate(int i, int j, const Mesh& mesh, const KernelSpec& kernel, double lambda,
                             double gamma);

/// Proposed unbinding rate per substrate particle in voxel k:
///   (mu / Z_AB) sum_i h K(x_i, z_k) exp(-u^gamma(x_i, z_k)).
double unbinding_proposal_rate(int k, const Mesh& mesh, const KernelSpec& kernel, const PotentialTable& table,
                               int first_product, int second_product, double gamma, double mu);

}  // namespace pbsrdd::crdme
