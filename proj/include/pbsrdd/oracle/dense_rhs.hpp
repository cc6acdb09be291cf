#pragma once

#include <vector>

#include "pbsrdd/core/network.hpp"
#include "pbsrdd/core/potential.hpp"
#include "pbsrdd/mfm/fields.hpp"

namespace pbsrdd::oracle {

/// Mean-field reaction terms by direct trapezoidal quadrature over every
/// (x_i, y_j) pair, with each acceptance factor taken from
/// acceptance_probability_meanfield. O(N^3); meant for small grids.
/// Supports 2 -> 1 with distinct substrates and 1 -> 2 channels.
std::vector<double> dense_reaction_rhs(const mfm::SpectralFields& fields, const ReactionNetwork& network,
                                       const PotentialTable& table);

}  // namespace pbsrdd::oracle
