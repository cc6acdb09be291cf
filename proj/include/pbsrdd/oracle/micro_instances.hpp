#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "pbsrdd/crdme/simulator.hpp"
#include "pbsrdd/oracle/micro_ctmc.hpp"

namespace pbsrdd::oracle {

/// A tiny CRDME system small enough for the exact chain.
struct MicroInstance {
  std::string name;
  crdme::CrdmeModel model;
  crdme::LatticeState initial;
};

/// One A particle hopping on a 5-voxel ring (h = 0.3) with kappa = 200 and no reactions.
MicroInstance single_hopper();

/// One A and one B (voxels 0 and 1) on `voxels` voxels of width 0.3 with
/// kappa = 200, gamma = 1 and A + B -> C; `unbinding` adds C -> A + B.
MicroInstance pair_instance(int voxels, bool unbinding);

/// The three systems compared against the simulator: single_hopper(),
/// pair_instance(2, false), pair_instance(2, true).
std::vector<MicroInstance> ssa_micro_instances();

/// Empirical distribution over the chain's states of `replicates` simulator
/// runs of the instance, observed at time t. Replicate r uses PhiloxStream(seed, r).
Eigen::VectorXd empirical_distribution(const MicroInstance& instance, const MicroCtmc& chain, double t,
                                       std::uint64_t replicates, std::uint64_t seed);

/// Half the l1 distance between two probability vectors.
double total_variation(const Eigen::VectorXd& p, const Eigen::VectorXd& q);

}  // namespace pbsrdd::oracle
