#include "pbsrdd/oracle/micro_instances.hpp"

#include "pbsrdd/core/error.hpp"
#include "pbsrdd/crdme/trajectory.hpp"

namespace pbsrdd::oracle {

namespace {

constexpr double kSpacing = 0.3;
constexpr double kKappa = 200.0;

BindingModelParams micro_params(int voxels) {
  BindingModelParams p;
  p.length = kSpacing * voxels;
  return p;
}

PotentialTable micro_table(const BindingModelParams& p) {
  return PotentialTable({p.radius_a, p.radius_b, p.radius_c}, kKappa);
}

}  // namespace

MicroInstance single_hopper() {
  BindingModelParams p = micro_params(5);
  ReactionNetwork reacting = make_binding_network(p);
  ReactionNetwork network(reacting.species(), {});
  Mesh mesh = Mesh::micro(p.length, 5);
  crdme::LatticeState initial(mesh, 3, 1.0);
  initial.set(0, 0, 1);
  return {"1 A hopping, 5 voxels", crdme::CrdmeModel{mesh, network, micro_table(p), 1.0}, initial};
}

MicroInstance pair_instance(int voxels, bool unbinding) {
  BindingModelParams p = micro_params(voxels);
  ReactionNetwork full = make_binding_network(p);
  ReactionNetwork network = unbinding ? full : ReactionNetwork(full.species(), {full.reactions()[0]});
  Mesh mesh = Mesh::micro(p.length, voxels);
  crdme::LatticeState initial(mesh, 3, 1.0);
  initial.set(0, 0, 1);
  initial.set(1, 1, 1);
  std::string name = std::string(unbinding ? "1 A + 1 B <-> 1 C, " : "1 A + 1 B -> 1 C, ") + std::to_string(voxels) +
                     " voxels";
  return {name, crdme::CrdmeModel{mesh, network, micro_table(p), 1.0}, initial};
}

std::vector<MicroInstance> ssa_micro_instances() {
  return {single_hopper(), pair_instance(2, false), pair_instance(2, true)};
}


Eigen::VectorXd empirical_distribution(const MicroInstance& instance, const MicroCtmc& chain, double t,
                                       std::uint64_t replicates, std::uint64_t seed) {
  auto tables = std::make_shared<const crdme::CrdmeTables>(instance.model);
  crdme::Simulator sim(tables);
  Eigen::VectorXd hist = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(chain.size()));
  const double times[] = {t};
  for (std::uint64_t r = 0; r < replicates; ++r) {
    PhiloxStream rng(seed, r);
    crdme::simulate_trajectory(sim, instance.initial, times, rng, [&](std::size_t, const crdme::LatticeState& st) {
      const std::size_t k = chain.index_of(st);
      if (k == chain.size()) throw StateError("simulator reached a state outside the enumerated chain");
      hist(static_cast<Eigen::Index>(k)) += 1.0;
    });
  }
  return hist / static_cast<double>(replicates);
}

double total_variation(const Eigen::VectorXd& p, const Eigen::VectorXd& q) { return 0.5 * (p - q).cwiseAbs().sum(); }

}  // namespace pbsrdd::oracle
