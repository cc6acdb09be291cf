#pragma once

#include "pbsrdd/core/potential.hpp"
#include "pbsrdd/crdme/lattice.hpp"

namespace pbsrdd::oracle {

/// Total energy of a lattice state by enumerating every unordered particle
/// pair: sum_{p<q} u(|x_p - x_q|) / gamma + sum_p v(x_p).
double total_energy(const crdme::LatticeState& state, const PotentialTable& table);

/// Energy change of moving one particle of species s from voxel i to voxel j,
/// as a difference of two total energies.
double move_delta(const crdme::LatticeState& state, int s, int i, int j, const PotentialTable& table);

}  // namespace pbsrdd::oracle
