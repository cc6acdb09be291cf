#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <map>
#include <vector>

#include "pbsrdd/core/network.hpp"
#include "pbsrdd/core/potential.hpp"
#include "pbsrdd/crdme/lattice.hpp"

namespace pbsrdd::oracle {

/// Exact continuous-time Markov chain of a tiny lattice system. States are
/// species-major occupancy tuples, indexed in lexicographic order.
class MicroCtmc {
 public:
  /// Enumerates every state reachable from `initial` under all hop and
  /// reaction channels. Throws ModelError beyond `max_states` states.
  MicroCtmc(const crdme::LatticeState& initial, const ReactionNetwork& network, const PotentialTable& table,
            std::size_t max_states = 100000);

  std::size_t size() const { return states_.size(); }
  const std::vector<std::vector<int>>& states() const { return states_; }
  /// Index of an occupancy tuple, or size() when it is not a reachable state.
  std::size_t index_of(const std::vector<int>& counts) const;
  std::size_t index_of(const crdme::LatticeState& state) const;

  const Eigen::MatrixXd& generator() const { return q_; }
  const Eigen::VectorXd& initial_distribution() const { return p0_; }

  /// p(t) = p(0) e^{Qt} by scaling and squaring a truncated Taylor series.
  Eigen::VectorXd distribution(double t) const;
  /// The same by uniformization: Poisson-weighted powers of I + Q / q_max.
  Eigen::VectorXd distribution_uniformized(double t) const;

  /// Solves pi Q = 0, sum pi = 1 by subtraction-free elimination. Throws
  /// ModelError when the chain is not irreducible.
  Eigen::VectorXd stationary() const;

  /// Largest |pi_a Q_ab - pi_b Q_ba| over every state pair, relative to the
  /// larger of the two fluxes.
  double flux_balance_error(const Eigen::VectorXd& pi) const;

 private:
  std::vector<std::vector<int>> states_;
  std::map<std::vector<int>, std::size_t> index_;
  Eigen::MatrixXd q_;
  Eigen::VectorXd p0_;
};

}  // namespace pbsrdd::oracle
