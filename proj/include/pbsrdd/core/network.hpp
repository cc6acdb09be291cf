#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pbsrdd {

struct SpeciesSpec {
  std::string name;
  double diffusivity = 0.0;  // length^2 / time
  double radius = 0.0;       // length
};

/// Periodic Gaussian reaction kernel on [0, L),
///   K(x, y) = exp(-|x - y|^2 / (2 sigma^2)) / (Z sqrt(2 pi sigma^2)).
struct KernelSpec {
  double width = 0.0;          // sigma
  double normalization = 1.0;  // Z
  double length = 0.0;         // L
};

enum class AcceptanceForm { binding, unbinding, swap, none };

enum class PlacementRule {
  split_delta,         // 2 -> 1: product at either substrate, probability 1/2 each
  boltzmann_backward,  // 1 -> 2: one product at the substrate, partner ~ K e^{-u^gamma}
  identity_pair,       // 2 -> 2: products take the substrate positions in order
  in_place,            // 1 -> 1: product replaces the substrate
};

/// One reaction channel. Bimolecular rates are per substrate pair after kernel
/// normalisation (lambda); unimolecular rates are per particle (mu).
struct ReactionSpec {
  std::vector<int> substrates;
  std::vector<int> products;
  double rate = 0.0;
  std::optional<KernelSpec> kernel;
  PlacementRule placement = PlacementRule::in_place;
  AcceptanceForm form = AcceptanceForm::none;
};

/// The acceptance form and placement rule implied by the reaction orders.
AcceptanceForm acceptance_form_for(std::size_t substrates, std::size_t products);
PlacementRule placement_rule_for(std::size_t substrates, std::size_t products);

class ReactionNetwork {
 public:
  ReactionNetwork() = default;
  ReactionNetwork(std::vector<SpeciesSpec> species, std::vector<ReactionSpec> reactions);

  const std::vector<SpeciesSpec>& species() const { return species_; }
  const std::vector<ReactionSpec>& reactions() const { return reactions_; }
  int species_count() const { return static_cast<int>(species_.size()); }

  /// Index of the named species, or -1.
  int find(std::string_view name) const;

  /// Throws ModelError on any violated invariant.
  void validate() const;

 private:
  std::vector<SpeciesSpec> species_;
  std::vector<ReactionSpec> reactions_;
};

/// Parameters of the reversible A + B <-> C model problem.
struct BindingModelParams {
  double length = 6.283185307179586;
  double diffusivity_a = 0.25;
  double diffusivity_b = 0.25;
  double diffusivity_c = 0.5;
  double radius_a = 0.05;
  double radius_b = 0.05;
  double radius_c = 0.1;
  double kernel_width = 0.15;
  double binding_rate = 1.0;     // lambda
  double unbinding_rate = 0.05;  // mu
};

/// Builds A + B -> C (binding, split placement) and C -> A + B (unbinding,
/// Boltzmann-weighted placement). Species indices are A = 0, B = 1, C = 2.
ReactionNetwork make_binding_network(const BindingModelParams& params,
                                     int quadrature_points = 4096);

}  // namespace pbsrdd
