#include "pbsrdd/core/acceptance.hpp"

#include <cmath>
#include <limits>

namespace pbsrdd {

namespace {

double internal_pairs(std::span<const Placed> group, const LatticeBath& bath) {
  double sum = 0.0;
  for (std::size_t a = 0; a < group.size(); ++a)
    for (std::size_t b = 0; b < a; ++b)
      sum += bath.table.pair(group[a].species, group[b].species,
                             periodic_distance(group[a].x, group[b].x, bath.mesh.length()));
  return sum / bath.gamma;
}

}  // namespace

double ReactionEnergy::delta(AcceptanceForm form) const {
  switch (form) {
    case AcceptanceForm::binding: return after() - substrate_bath;
    case AcceptanceForm::unbinding: return product_bath - before();
    case AcceptanceForm::swap: return after() - before();
    case AcceptanceForm::none: break;
  }
  return 0.0;
}

ReactionEnergy reaction_energy(std::span<const Placed> substrates, std::span<const Placed> products,
                               const LatticeBath& bath) {
  ReactionEnergy e;
  for (const auto& p : substrates)
    e.substrate_bath += bath.table.one_body(p.species, p.x) + interaction_energy(p.species, p.x, bath, substrates);
  for (const auto& p : products)
    e.product_bath += bath.table.one_body(p.species, p.x) + interaction_energy(p.species, p.x, bath, substrates);
  e.substrate_pairs = internal_pairs(substrates, bath);
  e.product_pairs = internal_pairs(products, bath);
  return e;
}

double metropolis(double delta) {
  if (delta <= 0.0) return 1.0;
  return std::max(std::exp(-delta), std::numeric_limits<double>::denorm_min());
}

double acceptance_probability(const ReactionSpec& reaction, std::span<const Placed> substrates,
                              std::span<const Placed> products, const LatticeBath& bath) {
  if (reaction.form == AcceptanceForm::none) return 1.0;
  return metropolis(reaction_energy(substrates, products, bath).delta(reaction.form));
}

double meanfield_energy_change(std::span<const Placed> substrates, std::span<const Placed> products,
                               const FieldBath& bath) {
  double before = 0.0;
  double after = 0.0;
  for (const auto& p : substrates) before += bath.table.one_body(p.species, p.x) + interaction_energy(p.species, p.x, bath);
  for (const auto& p : products) after += bath.table.one_body(p.species, p.x) + interaction_energy(p.species, p.x, bath);
  return after - before;
}

double acceptance_probability_meanfield(const ReactionSpec& reaction, std::span<const Placed> substrates,
                                        std::span<const Placed> products, const FieldBath& bath) {
  if (reaction.form == AcceptanceForm::none) return 1.0;
  return metropolis(meanfield_energy_change(substrates, products, bath));
}

}  // namespace pbsrdd
