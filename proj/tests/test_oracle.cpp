#include <cmath>
#include <numbers>

#include "doctest.h"
#include "pbsrdd/core/error.hpp"
#include "pbsrdd/core/kernel.hpp"
#include "pbsrdd/crdme/rates.hpp"
#include "pbsrdd/oracle/micro_ctmc.hpp"
#include "pbsrdd/oracle/micro_instances.hpp"
#include "pbsrdd/oracle/pair_enumeration.hpp"
#include "pbsrdd/oracle/wellmixed.hpp"

using namespace pbsrdd;
using namespace pbsrdd::oracle;

namespace {

double max_row_sum(const Eigen::MatrixXd& q) { return q.rowwise().sum().cwiseAbs().maxCoeff(); }

std::vector<int> occupancy(const crdme::LatticeState& st) { return {st.counts().begin(), st.counts().end()}; }

}  // namespace

TEST_CASE("pair enumeration energies") {
  Mesh mesh(1.0, 10);
  PotentialTable table({0.05, 0.05, 0.1}, 200.0);
  crdme::LatticeState st(mesh, 3, 4.0);
  st.set(0, 2, 2);
  st.set(1, 3, 1);
  // two A in voxel 2 and one B at distance 0.1
  const double want = (table.pair(0, 0, 0.0) + 2 * table.pair(0, 1, 0.1)) / 4.0;
  CHECK(total_energy(st, table) == doctest::Approx(want).epsilon(1e-14));
  CHECK(move_delta(st, 1, 3, 4, table) ==
        doctest::Approx(2 * (table.pair(0, 1, 0.2) - table.pair(0, 1, 0.1)) / 4.0).epsilon(1e-14));
  CHECK_THROWS_AS(move_delta(st, 2, 0, 1, table), StateError);
}

TEST_CASE("one free particle on two voxels") {
  BindingModelParams p;
  p.length = 0.6;
  ReactionNetwork net(make_binding_network(p).species(), {});
  Mesh mesh = Mesh::micro(0.6, 2);
  crdme::LatticeState st(mesh, 3, 1.0);
  st.set(0, 0, 1);
  MicroCtmc chain(st, net, PotentialTable({0.05, 0.05, 0.1}, 0.0));
  REQUIRE(chain.size() == 2);
  const auto& q = chain.generator();
  // both neighbours are the other voxel, so the two hop channels add
  const double rate = 2 * 0.25 / (0.3 * 0.3);
  CHECK(q(0, 1) == doctest::Approx(rate).epsilon(1e-14));
  CHECK(q(1, 0) == doctest::Approx(rate).epsilon(1e-14));
  CHECK(max_row_sum(q) == 0.0);
  auto pt = chain.distribution(0.3);
  CHECK(pt(chain.index_of(st)) == doctest::Approx(0.5 + 0.5 * std::exp(-2 * rate * 0.3)).epsilon(1e-12));
}

TEST_CASE("binding chain on two voxels") {
  auto inst = pair_instance(2, false);
  const auto& net = inst.model.network;
  MicroCtmc chain(inst.initial, net, inst.model.potentials);
  // four (A, B) placements and two C placements
  REQUIRE(chain.size() == 6);
  const auto& q = chain.generator();
  CHECK(max_row_sum(q) <= 1e-13 * q.cwiseAbs().maxCoeff());
  CHECK((q - Eigen::MatrixXd(q.diagonal().asDiagonal())).minCoeff() >= 0.0);

  const Mesh& mesh = inst.model.mesh;
  crdme::LatticeState c0(mesh, 3, 1.0), c1(mesh, 3, 1.0);
  c0.set(2, 0, 1);
  c1.set(2, 1, 1);
  const auto from = static_cast<Eigen::Index>(chain.index_of(inst.initial));
  const auto to0 = static_cast<Eigen::Index>(chain.index_of(c0));
  const auto to1 = static_cast<Eigen::Index>(chain.index_of(c1));
  // a lone pair: binding and unbinding energies cancel, so every proposal is accepted
  const double bind = crdme::binding_proposal_rate(0, 1, mesh, *net.reactions()[0].kernel, 1.0, 1.0);
  CHECK(q(from, to0) == doctest::Approx(0.5 * bind).epsilon(1e-14));
  CHECK(q(from, to1) == doctest::Approx(0.5 * bind).epsilon(1e-14));
  // binding only: C just hops
  const double c_hop = 2 * 0.5 / (0.3 * 0.3);
  CHECK(q(to0, to0) == doctest::Approx(-c_hop).epsilon(1e-14));

  // with unbinding, the pair lands on distinct voxels with weight K(0.3) e^{-u(0.3)}
  // against the same-voxel weight K(0) e^{-u(0)}
  auto rev = pair_instance(2, true);
  MicroCtmc back(rev.initial, rev.model.network, rev.model.potentials);
  const auto& qb = back.generator();
  const auto& kernel = *rev.model.network.reactions()[1].kernel;
  const double w_same = kernel_at_distance(0.0, kernel) * std::exp(-rev.model.potentials.pair(0, 1, 0.0));
  const double w_far = kernel_at_distance(0.3, kernel) * std::exp(-rev.model.potentials.pair(0, 1, 0.3));
  const auto c = static_cast<Eigen::Index>(back.index_of(c0));
  const auto ab = static_cast<Eigen::Index>(back.index_of(inst.initial));
  const double total = -qb(c, c) - c_hop;
  REQUIRE(total > 0.0);
  CHECK(qb(c, ab) == doctest::Approx(total * 0.5 * w_far / (w_same + w_far)).epsilon(1e-12));
}

TEST_CASE("transient distribution") {
  auto inst = pair_instance(3, true);
  MicroCtmc chain(inst.initial, inst.model.network, inst.model.potentials);
  CHECK(chain.distribution(0.0) == chain.initial_distribution());
  for (double t : {0.1, 0.5, 2.0, 30.0}) {
    auto a = chain.distribution(t);
    auto b = chain.distribution_uniformized(t);
    CHECK(std::abs(a.sum() - 1.0) <= 1e-12);
    CHECK(std::abs(b.sum() - 1.0) <= 1e-12);
    CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(a.minCoeff() >= -1e-14);
  }
  auto pi = chain.stationary();
  CHECK((chain.distribution(500.0) - pi).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("reaction-free stationary law is Boltzmann") {
  auto inst = pair_instance(3, true);
  ReactionNetwork net(inst.model.network.species(), {});
  MicroCtmc chain(inst.initial, net, inst.model.potentials);
  REQUIRE(chain.size() == 9);
  auto pi = chain.stationary();
  Eigen::VectorXd boltzmann(9);
  for (std::size_t k = 0; k < chain.size(); ++k) {
    crdme::LatticeState st(inst.model.mesh, 3, 1.0);
    for (int s = 0; s < 3; ++s)
      for (int i = 0; i < 3; ++i) st.set(s, i, chain.states()[k][static_cast<std::size_t>(s * 3 + i)]);
    boltzmann(static_cast<Eigen::Index>(k)) = std::exp(-total_energy(st, inst.model.potentials));
  }
  boltzmann /= boltzmann.sum();
  CHECK((pi - boltzmann).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(chain.flux_balance_error(pi) <= 1e-12);
}

TEST_CASE("reversible chains balance every flux") {
  for (int voxels : {2, 3}) {
    auto inst = pair_instance(voxels, true);
    MicroCtmc chain(inst.initial, inst.model.network, inst.model.potentials);
    auto pi = chain.stationary();
    CHECK(pi.minCoeff() > 0.0);
    CHECK(chain.flux_balance_error(pi) <= 1e-12);
  }
}

TEST_CASE("state-space limit") {
  auto inst = pair_instance(3, true);
  CHECK_THROWS_AS(MicroCtmc(inst.initial, inst.model.network, inst.model.potentials, 5), ModelError);
  MicroCtmc chain(inst.initial, inst.model.network, inst.model.potentials);
  crdme::LatticeState other(inst.model.mesh, 3, 1.0);
  other.set(0, 0, 2);
  CHECK(chain.index_of(other) == chain.size());
  CHECK(chain.index_of(occupancy(inst.initial)) < chain.size());
}

TEST_CASE("simulator matches the exact chain on a small sample") {
  for (const auto& inst : ssa_micro_instances()) {
    MicroCtmc chain(inst.initial, inst.model.network, inst.model.potentials);
    for (double t : {0.5, 2.0}) {
      auto exact = chain.distribution(t);
      auto seen = empirical_distribution(inst, chain, t, 20000, 11);
      INFO(inst.name << " at t = " << t);
      CHECK(total_variation(exact, seen) <= 0.02);
    }
  }
}

TEST_CASE("well-mixed ODE") {
  SUBCASE("invariants and equilibrium") {
    const std::vector<double> times{1.0, 10.0, 1e4};
    auto y = wellmixed_ode({0.3, 0.2, 0.05}, 1.0, 0.05, times);
    for (const auto& c : y) {
      CHECK(c[0] + c[2] == doctest::Approx(0.35).epsilon(1e-12));
      CHECK(c[1] + c[2] == doctest::Approx(0.25).epsilon(1e-12));
      CHECK(c[0] - c[1] == doctest::Approx(0.1).epsilon(1e-11));
    }
    const auto& eq = y.back();
    CHECK(std::abs(1.0 * eq[0] * eq[1] - 0.05 * eq[2]) <= 1e-10);
  }
  SUBCASE("pure unbinding at small c0") {
    // a = b, and for lambda -> 0 the decay is c0 (1 - e^{-mu t})
    auto y = wellmixed_ode({0.0, 0.0, 1e-6}, 1.0, 0.05, 3.0);
    CHECK(y[0] == doctest::Approx(1e-6 * (1 - std::exp(-0.15))).epsilon(1e-6));
    CHECK(y[0] == y[1]);
  }
  SUBCASE("closed form for a = b") {
    // a' = -lambda a^2 with mu = 0 gives a0 / (1 + lambda a0 t)
    auto y = wellmixed_ode({0.4, 0.4, 0.0}, 2.0, 0.0, 5.0);
    CHECK(y[0] == doctest::Approx(0.4 / (1 + 2.0 * 0.4 * 5.0)).epsilon(1e-11));
  }
  CHECK_THROWS_AS(wellmixed_ode({-1.0, 0.0, 0.0}, 1.0, 1.0, 1.0), ModelError);
}
