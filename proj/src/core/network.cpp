#include "pbsrdd/core/network.hpp"

#include <cmath>
#include <set>

#include "pbsrdd/core/error.hpp"
#include "pbsrdd/core/kernel.hpp"

namespace pbsrdd {

AcceptanceForm acceptance_form_for(std::size_t substrates, std::size_t products) {
  if (substrates == 2 && products == 1) return AcceptanceForm::binding;
  if (substrates == 1 && products == 2) return AcceptanceForm::unbinding;
  if (substrates == 2 && products == 2) return AcceptanceForm::swap;
  if (substrates == 1 && products == 1) return AcceptanceForm::none;
  throw ModelError("unsupported reaction order " + std::to_string(substrates) + " -> " +
                   std::to_string(products));
}

PlacementRule placement_rule_for(std::size_t substrates, std::size_t products) {
  switch (acceptance_form_for(substrates, products)) {
    case AcceptanceForm::binding: return PlacementRule::split_delta;
    case AcceptanceForm::unbinding: return PlacementRule::boltzmann_backward;
    case AcceptanceForm::swap: return PlacementRule::identity_pair;
    case AcceptanceForm::none: break;
  }
  return PlacementRule::in_place;
}

ReactionNetwork::ReactionNetwork(std::vector<SpeciesSpec> species, std::vector<ReactionSpec> reactions)
    : species_(std::move(species)), reactions_(std::move(reactions)) {
  validate();
}

int ReactionNetwork::find(std::string_view name) const {
  for (std::size_t i = 0; i < species_.size(); ++i)
    if (species_[i].name == name) return static_cast<int>(i);
  return -1;
}

void ReactionNetwork::validate() const {
  std::set<std::string> names;
  for (const auto& s : species_) {
    if (s.name.empty()) throw ModelError("species name must not be empty");
    if (!names.insert(s.name).second) throw ModelError("duplicate species name '" + s.name + "'");
    if (!(s.diffusivity > 0.0)) throw ModelError("species '" + s.name + "': diffusivity must be > 0");
    if (!(s.radius >= 0.0)) throw ModelError("species '" + s.name + "': radius must be >= 0");
  }
  const int n = species_count();
  for (std::size_t r = 0; r < reactions_.size(); ++r) {
    const auto& rx = reactions_[r];
    const std::string tag = "reaction " + std::to_string(r);
    if (rx.substrates.empty() || rx.products.empty())
      throw ModelError(tag + ": reactions need at least one substrate and one product");
    if (rx.substrates.size() > 2 || rx.products.size() > 2)
      throw ModelError(tag + ": at most two substrates and two products are supported");
    for (int s : rx.substrates)
      if (s < 0 || s >= n) throw ModelError(tag + ": substrate index out of range");
    for (int s : rx.products)
      if (s < 0 || s >= n) throw ModelError(tag + ": product index out of range");
    if (!(rx.rate >= 0.0) || !std::isfinite(rx.rate)) throw ModelError(tag + ": rate must be finite and >= 0");
    if (rx.form != acceptance_form_for(rx.substrates.size(), rx.products.size()))
      throw ModelError(tag + ": acceptance form does not match the reaction order");
    if (rx.placement != placement_rule_for(rx.substrates.size(), rx.products.size()))
      throw ModelError(tag + ": placement rule does not match the reaction order");
    bool needs_kernel = rx.substrates.size() == 2 || rx.products.size() == 2;
    if (needs_kernel && !rx.kernel) throw ModelError(tag + ": kernel required");
    if (rx.kernel) {
      if (!(rx.kernel->width > 0.0)) throw ModelError(tag + ": kernel width must be > 0");
      if (!(rx.kernel->normalization > 0.0)) throw ModelError(tag + ": kernel normalization must be > 0");
      if (!(rx.kernel->length > 0.0)) throw ModelError(tag + ": kernel domain length must be > 0");
    }
  }
}

ReactionNetwork make_binding_network(const BindingModelParams& p, int quadrature_points) {
  std::vector<SpeciesSpec> species{
      {"A", p.diffusivity_a, p.radius_a}, {"B", p.diffusivity_b, p.radius_b}, {"C", p.diffusivity_c, p.radius_c}};
  KernelSpec kernel = make_kernel(p.kernel_width, p.length, quadrature_points);
  ReactionSpec forward{{0, 1}, {2}, p.binding_rate, kernel, PlacementRule::split_delta, AcceptanceForm::binding};
  ReactionSpec backward{{2}, {0, 1}, p.unbinding_rate, kernel, PlacementRule::boltzmann_backward,
                        AcceptanceForm::unbinding};
  return ReactionNetwork(std::move(species), {forward, backward});
}

}  // namespace pbsrdd
