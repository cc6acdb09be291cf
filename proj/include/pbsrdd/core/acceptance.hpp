#pragma once

#include <span>

#include "pbsrdd/core/bath.hpp"
#include "pbsrdd/core/network.hpp"

namespace pbsrdd {

/// Energies entering the Metropolis factor of one proposed reaction, all in
/// k_B T. `substrate_bath` and `product_bath` are one-body plus bath energies
/// with every substrate excluded from the bath (pre-reaction state);
/// `substrate_pairs` / `product_pairs` are the internal pair terms U^gamma.
struct ReactionEnergy {
  double substrate_bath = 0.0;
  double product_bath = 0.0;
  double substrate_pairs = 0.0;
  double product_pairs = 0.0;

  /// Phi^- and Phi^+ up to the common non-reactant energy.
  double before() const { return substrate_bath + substrate_pairs; }
  double after() const { return product_bath + product_pairs; }

  /// Delta Phi for the given form:
  ///   binding   -> Phi^+ - (Phi^- - U(x))
  ///   unbinding -> (Phi^+ - U(y)) - Phi^-
  ///   swap      -> Phi^+ - Phi^-
  ///   none      -> 0
  double delta(AcceptanceForm form) const;
};

ReactionEnergy reaction_energy(std::span<const Placed> substrates, std::span<const Placed> products,
                               const LatticeBath& bath);

/// min{1, exp(-Delta Phi)} on the pre-reaction lattice state.
double acceptance_probability(const ReactionSpec& reaction, std::span<const Placed> substrates,
                              std::span<const Placed> products, const LatticeBath& bath);

/// Limit gamma -> infinity: no exclusions, no internal pair terms.
double meanfield_energy_change(std::span<const Placed> substrates, std::span<const Placed> products,
                               const FieldBath& bath);

double acceptance_probability_meanfield(const ReactionSpec& reaction, std::span<const Placed> substrates,
                                        std::span<const Placed> products, const FieldBath& bath);

/// min{1, exp(-delta)}, kept strictly positive.
double metropolis(double delta);

}  // namespace pbsrdd
