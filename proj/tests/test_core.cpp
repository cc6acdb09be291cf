#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "pbsrdd/core/acceptance.hpp"
#include "pbsrdd/core/bath.hpp"
#include "pbsrdd/core/error.hpp"
#include "pbsrdd/core/kernel.hpp"
#include "pbsrdd/core/mesh.hpp"
#include "pbsrdd/core/network.hpp"
#include "pbsrdd/core/placement.hpp"
#include "pbsrdd/core/potential.hpp"
#include "pbsrdd/core/random.hpp"

using namespace pbsrdd;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

PotentialTable default_table(double kappa = 200.0) { return PotentialTable({0.05, 0.05, 0.1}, kappa); }
}  // namespace

TEST_CASE("periodic distance") {
  CHECK(periodic_distance(0.1, 6.2, kTwoPi) == doctest::Approx(kTwoPi - 6.1).epsilon(1e-14));
  CHECK(periodic_distance(1.3, 1.3, kTwoPi) == 0.0);
  CHECK(periodic_distance(0.0, 0.5 * kTwoPi, kTwoPi) == doctest::Approx(0.5 * kTwoPi));
  CHECK(periodic_distance(-0.1, 0.1, 1.0) == doctest::Approx(0.2));
  CHECK(wrap_position(-1e-17, 1.0) < 1.0);
}

TEST_CASE("mesh nodes and wrapping") {
  Mesh m = build_mesh(kTwoPi, 4);
  CHECK(m.spacing() == doctest::Approx(kTwoPi / 4));
  CHECK(m.node(2) == doctest::Approx(std::numbers::pi));
  CHECK(m.wrap(5) == 1);
  CHECK(m.wrap(-1) == 3);
  CHECK(m.distance_index(0, 3) == 1);
  CHECK(build_mesh(kTwoPi, 512).spacing() == doctest::Approx(kTwoPi / 512));
  CHECK_THROWS_AS(build_mesh(kTwoPi, 2), ModelError);
  CHECK(Mesh::micro(1.0, 2).voxels() == 2);
  CHECK(m.nearest_voxel(m.node(3) + 0.1 * m.spacing()) == 3);
}

TEST_CASE("harmonic pair potential") {
  auto table = default_table();
  CHECK(pair_potential(0, 1, 0.0, table) == doctest::Approx(18.0).epsilon(1e-14));
  CHECK(pair_potential(0, 1, 0.3, table) == doctest::Approx(0.0));
  CHECK(pair_potential(0, 1, 0.5, table) == 0.0);
  CHECK(pair_potential(1, 0, 0.17, table) == pair_potential(0, 1, 0.17, table));
  CHECK(table.cutoff(2, 2) == doctest::Approx(0.6));
  CHECK(default_table(0.0).is_zero());
  CHECK(pair_potential(2, 2, 0.1, default_table(0.0)) == 0.0);
  // slope against a centred difference
  double r = 0.2, e = 1e-6;
  CHECK(table.pair_slope(0, 2, r) ==
        doctest::Approx((table.pair(0, 2, r + e) - table.pair(0, 2, r - e)) / (2 * e)).epsilon(1e-8));
}

TEST_CASE("tabulated pair override") {
  auto table = default_table();
  table.set_tabulated(0, 0, TabulatedPair{0.1, {2.0, 1.0, 0.0}});
  CHECK(table.pair(0, 0, 0.05) == doctest::Approx(1.5));
  CHECK(table.pair(0, 0, 0.25) == 0.0);
  CHECK(table.cutoff(0, 0) == doctest::Approx(0.2));
  CHECK_THROWS_AS(table.set_tabulated(0, 1, TabulatedPair{0.1, {2.0, 1.0}}), ModelError);
}

TEST_CASE("kernel normalization and marginal") {
  double z = kernel_normalization(0.15, kTwoPi, 4096);
  CHECK(std::fabs(z - 1.0) < 1e-12);
  CHECK(std::fabs(kernel_normalization(0.15, kTwoPi, 8192) - z) < 1e-12);
  auto k = make_kernel(0.15, kTwoPi);
  CHECK(kernel_eval(1.0, 1.0, k) == doctest::Approx(1.0 / std::sqrt(2 * std::numbers::pi * 0.0225)).epsilon(1e-12));
  CHECK(kernel_eval(0.3, 6.1, k) == kernel_eval(6.1, 0.3, k));
  CHECK_THROWS_AS(kernel_normalization(0.15, kTwoPi, 32), ModelError);
  // wide kernel: integrand flattens
  double wide = 50.0;
  CHECK(kernel_normalization(wide, kTwoPi, 64) ==
        doctest::Approx(kTwoPi / std::sqrt(2 * std::numbers::pi * wide * wide)).epsilon(1e-3));
  Mesh m = build_mesh(kTwoPi, 512);
  for (int y : {0, 17, 300}) {
    double s = 0.0;
    for (int i = 0; i < m.voxels(); ++i) s += m.spacing() * kernel_eval(m.node(i), m.node(y), k);
    CHECK(std::fabs(s - 1.0) < 1e-10);
  }
}

TEST_CASE("network validation") {
  auto net = make_binding_network({});
  CHECK(net.species_count() == 3);
  CHECK(net.find("C") == 2);
  CHECK(net.reactions()[0].form == AcceptanceForm::binding);
  CHECK(net.reactions()[1].form == AcceptanceForm::unbinding);
  CHECK(acceptance_form_for(2, 2) == AcceptanceForm::swap);
  CHECK_THROWS_AS(acceptance_form_for(3, 1), ModelError);
  std::vector<SpeciesSpec> dup{{"A", 1.0, 0.0}, {"A", 1.0, 0.0}};
  CHECK_THROWS_AS(ReactionNetwork(dup, {}), ModelError);
  std::vector<SpeciesSpec> bad{{"A", 0.0, 0.0}};
  CHECK_THROWS_AS(ReactionNetwork(bad, {}), ModelError);
  ReactionSpec no_kernel{{0, 0}, {0}, 1.0, std::nullopt, PlacementRule::split_delta, AcceptanceForm::binding};
  CHECK_THROWS_AS(ReactionNetwork({{"A", 1.0, 0.0}}, {no_kernel}), ModelError);
}

TEST_CASE("lattice interaction energy") {
  Mesh m = build_mesh(kTwoPi, 64);
  auto table = default_table();
  std::vector<int> counts(3 * 64, 0);
  counts[64 + 5] = 2;  // two B at node 5
  LatticeBath bath{m, counts, 100.0, table};
  CHECK(interaction_energy(0, m.node(5), bath, {}) == doctest::Approx(0.36).epsilon(1e-14));
  CHECK(interaction_energy(0, m.node(40), bath, {}) == 0.0);
  std::array<Placed, 1> one{Placed{1, m.node(5)}};
  CHECK(interaction_energy(0, m.node(5), bath, one) == doctest::Approx(0.18).epsilon(1e-14));
  std::array<Placed, 1> missing{Placed{1, m.node(6)}};
  CHECK_THROWS_WITH_AS(interaction_energy(0, m.node(5), bath, missing), doctest::Contains("inconsistent exclusion"),
                       StateError);
  auto zero = default_table(0.0);
  LatticeBath flat{m, counts, 100.0, zero};
  CHECK(interaction_energy(0, m.node(5), flat, {}) == 0.0);
}

TEST_CASE("acceptance probability forms") {
  CHECK(metropolis(-5.0) == 1.0);
  CHECK(metropolis(std::log(2.0)) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(metropolis(1e6) > 0.0);

  Mesh m = build_mesh(kTwoPi, 64);
  auto net = make_binding_network({});
  auto zero = default_table(0.0);
  std::vector<int> counts(3 * 64, 0);
  counts[3] = 1;
  counts[64 + 4] = 1;
  LatticeBath flat{m, counts, 50.0, zero};
  std::array<Placed, 2> ab{Placed{0, m.node(3)}, Placed{1, m.node(4)}};
  std::array<Placed, 1> c{Placed{2, m.node(3)}};
  CHECK(acceptance_probability(net.reactions()[0], ab, c, flat) == 1.0);

  // A crowded product site makes binding costly; the reverse move is its mirror image
  auto table = default_table();
  counts[2 * 64 + 3] = 3;
  LatticeBath crowded{m, counts, 50.0, table};
  auto forward = reaction_energy(ab, c, crowded);
  double dphi = forward.delta(AcceptanceForm::binding);
  CHECK(dphi > 0.0);
  CHECK(acceptance_probability(net.reactions()[0], ab, c, crowded) == doctest::Approx(std::exp(-dphi)));
  // bath seen by the reverse move: the C is placed, A and B removed
  std::vector<int> after = counts;
  after[3] -= 1;
  after[64 + 4] -= 1;
  after[2 * 64 + 3] += 1;
  LatticeBath reverse_bath{m, after, 50.0, table};
  auto backward = reaction_energy(c, ab, reverse_bath);
  CHECK(backward.delta(AcceptanceForm::unbinding) == doctest::Approx(-dphi).epsilon(1e-13));
}

TEST_CASE("mean-field acceptance") {
  Mesh m = build_mesh(kTwoPi, 64);
  auto net = make_binding_network({});
  std::vector<double> fields(3 * 64, 0.3);
  auto zero = default_table(0.0);
  FieldBath flat{m, fields, zero};
  std::array<Placed, 2> ab{Placed{0, 1.0}, Placed{1, 1.1}};
  std::array<Placed, 1> c{Placed{2, 1.0}};
  CHECK(acceptance_probability_meanfield(net.reactions()[0], ab, c, flat) == 1.0);
  auto table = default_table();
  FieldBath bath{m, fields, table};
  std::array<Placed, 1> a{Placed{0, 2.0}};
  CHECK(acceptance_probability_meanfield(net.reactions()[0], a, a, bath) == 1.0);
  CHECK(meanfield_energy_change(a, a, bath) == 0.0);
}

TEST_CASE("placement") {
  PhiloxStream rng(7, 0);
  int hits = 0;
  for (int k = 0; k < 100000; ++k) hits += sample_forward_placement(1.0, 2.0, rng) == 1.0;
  CHECK(std::fabs(hits / 1e5 - 0.5) < 0.005);
  PhiloxStream same(7, 0);
  CHECK(sample_forward_placement(3.0, 3.0, same) == 3.0);

  Mesh m = build_mesh(kTwoPi, 512);
  auto k = make_kernel(0.15, kTwoPi);
  auto table = default_table();
  auto bp = backward_placement_distribution(10, m, k, table, 0, 1, 50.0);
  double s = 0.0;
  for (double w : bp.weights) s += w;
  CHECK(s == doctest::Approx(bp.normalizer).epsilon(1e-14));
  double total = 0.0;
  for (int a = 0; a < 512; ++a) {
    total += bp.pair_probability(a, 10);
    if (a != 10) total += bp.pair_probability(10, a);
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
  // repulsion lowers Z_AB below the kernel mass; it returns to one as gamma grows
  CHECK(unbinding_normalizer(m, k, table, 0, 1, 50.0) < 0.9);
  CHECK(unbinding_normalizer(m, k, table, 0, 1, 1e7) == doctest::Approx(1.0).epsilon(1e-6));
  auto flat = backward_placement_distribution(10, m, k, default_table(0.0), 0, 1, 50.0);
  CHECK(flat.weights[12] == doctest::Approx(m.spacing() * kernel_eval(m.node(12), m.node(10), k)));
}

TEST_CASE("philox known answers") {
  auto z = PhiloxStream::bijection({0, 0, 0, 0}, {0, 0});
  CHECK(z == PhiloxStream::Block{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  auto pi = PhiloxStream::bijection({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
  CHECK(pi == PhiloxStream::Block{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("philox streams") {
  PhiloxStream a(1, 0), b(1, 0), c(1, 1);
  bool differs = false;
  for (int k = 0; k < 10; ++k) {
    auto x = a.next_u64();
    CHECK(x == b.next_u64());
    differs |= x != c.next_u64();
  }
  CHECK(differs);
  double mean = 0.0;
  for (int k = 0; k < 100000; ++k) {
    double u = a.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    mean += u;
  }
  CHECK(std::fabs(mean / 1e5 - 0.5) < 0.005);
  for (int k = 0; k < 1000; ++k) CHECK(a.below(7) < 7);
}
