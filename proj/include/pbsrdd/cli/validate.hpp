#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pbsrdd/cli/config.hpp"
#include "pbsrdd/cli/study.hpp"
#include "pbsrdd/core/bath.hpp"
#include "pbsrdd/crdme/lattice.hpp"

namespace pbsrdd::cli {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// One proposed reaction with substrate and product nodes.
struct ReactionSample {
  int reaction = 0;
  std::vector<Placed> substrates;
  std::vector<Placed> products;
};

/// A frozen lattice state: `particles` split 2:2:1 over the three species,
/// A and B drawn from their initial profiles and C from their average.
crdme::LatticeState frozen_state(const ExperimentConfig& config, const Mesh& mesh, int particles, std::uint64_t seed);

/// Random binding and unbinding proposals on occupied voxels of `state`,
/// alternating between the two reactions.
std::vector<ReactionSample> sample_reactions(const crdme::LatticeState& state, const ReactionNetwork& network,
                                             int count, std::uint64_t seed);

/// max over samples of |pi^gamma - pi|, where pi^gamma sees the counts of
/// `state` scaled by 1/gamma and pi sees the same measure as a field.
double acceptance_gap(const crdme::LatticeState& state, const ReactionNetwork& network, const PotentialTable& table,
                      double gamma, const std::vector<ReactionSample>& samples);

/// Fast invariant and oracle checks at the configured parameters.
std::vector<CheckResult> run_validation(const ExperimentConfig& config, const Progress& progress = {});

}  // namespace pbsrdd::cli
