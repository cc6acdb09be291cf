#include "pbsrdd/cli/validate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "pbsrdd/cli/csv.hpp"
#include "pbsrdd/core/acceptance.hpp"
#include "pbsrdd/core/error.hpp"
#include "pbsrdd/core/kernel.hpp"
#include "pbsrdd/core/random.hpp"
#include "pbsrdd/crdme/rates.hpp"
#include "pbsrdd/crdme/trajectory.hpp"
#include "pbsrdd/mfm/operators.hpp"
#include "pbsrdd/oracle/dense_rhs.hpp"
#include "pbsrdd/oracle/micro_ctmc.hpp"
#include "pbsrdd/oracle/micro_instances.hpp"

namespace pbsrdd::cli {

namespace {

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

int draw(const std::vector<double>& weights, PhiloxStream& rng) {
  double total = 0.0;
  for (double w : weights) total += w;
  double u = rng.uniform() * total;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    u -= weights[i];
    if (u < 0.0) return static_cast<int>(i);
  }
  for (std::size_t i = weights.size(); i-- > 0;)
    if (weights[i] > 0.0) return static_cast<int>(i);
  throw ModelError("cannot sample from all-zero weights");
}

std::vector<double> occupancy_weights(const crdme::LatticeState& st, int s) {
  std::vector<double> w;
  for (int c : st.counts(s)) w.push_back(c);
  return w;
}

}  // namespace

crdme::LatticeState frozen_state(const ExperimentConfig& config, const Mesh& mesh, int particles, std::uint64_t seed) {
  crdme::LatticeState st(mesh, 3, 1.0);
  PhiloxStream rng(seed, 0);
  auto profiles = crdme_initial(config, mesh);
  std::vector<double> mix(profiles[0].weights.size());
  for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = profiles[0].weights[i] + profiles[1].weights[i];
  const int n_c = particles / 5, n_a = (particles - n_c) / 2, n_b = particles - n_c - n_a;
  for (int k = 0; k < n_a; ++k) st.add(0, draw(profiles[0].weights, rng), 1);
  for (int k = 0; k < n_b; ++k) st.add(1, draw(profiles[1].weights, rng), 1);
  for (int k = 0; k < n_c; ++k) st.add(2, draw(mix, rng), 1);
  return st;
}

std::vector<ReactionSample> sample_reactions(const crdme::LatticeState& st, const ReactionNetwork& network, int count,
                                             std::uint64_t seed) {
  PhiloxStream rng(seed, 1);
  const Mesh& mesh = st.mesh();
  std::vector<ReactionSample> out;
  for (int k = 0; k < count; ++k) {
    const auto& rx = network.reactions()[static_cast<std::size_t>(k % 2)];
    ReactionSample s;
    s.reaction = k % 2;
    if (rx.substrates.size() == 2) {
      int i = draw(occupancy_weights(st, rx.substrates[0]), rng);
      int j = draw(occupancy_weights(st, rx.substrates[1]), rng);
      s.substrates = {{rx.substrates[0], mesh.node(i)}, {rx.substrates[1], mesh.node(j)}};
      s.products = {{rx.products[0], mesh.node(rng.uniform() < 0.5 ? i : j)}};
    } else {
      int z = draw(occupancy_weights(st, rx.substrates[0]), rng);
      int m = static_cast<int>(rng.below(static_cast<std::uint64_t>(mesh.voxels())));
      bool first_at_z = rng.uniform() < 0.5;
      s.substrates = {{rx.substrates[0], mesh.node(z)}};
      s.products = {{rx.products[0], mesh.node(first_at_z ? z : m)}, {rx.products[1], mesh.node(first_at_z ? m : z)}};
    }
    out.push_back(std::move(s));
  }
  return out;
}

double acceptance_gap(const crdme::LatticeState& st, const ReactionNetwork& network, const PotentialTable& table,
                      double gamma, const std::vector<ReactionSample>& samples) {
  const Mesh& mesh = st.mesh();
  LatticeBath lattice{mesh, st.counts(), gamma, table};
  std::vector<double> field(st.counts().size());
  for (std::size_t i = 0; i < field.size(); ++i) field[i] = st.counts()[i] / (mesh.spacing() * gamma);
  FieldBath meanfield{mesh, field, table};
  double gap = 0.0;
  for (const auto& s : samples) {
    const auto& rx = network.reactions()[static_cast<std::size_t>(s.reaction)];
    double p = acceptance_probability(rx, s.substrates, s.products, lattice);
    double q = acceptance_probability_meanfield(rx, s.substrates, s.products, meanfield);
    gap = std::max(gap, std::abs(p - q));
  }
  return gap;
}

std::vector<CheckResult> run_validation(const ExperimentConfig& config, const Progress& progress) {
  std::vector<CheckResult> out;
  auto add = [&](std::string name, bool ok, std::string detail) {
    out.push_back({std::move(name), ok, std::move(detail)});
    if (progress) progress((ok ? "pass " : "FAIL ") + out.back().name + ": " + out.back().detail);
  };
  const ReactionNetwork network = build_network(config);
  const PotentialTable table = build_potentials(config, config.kappa);
  const Mesh lattice = build_mesh(config.length, config.voxels);

  {
    double worst = 0.0;
    for (int k = -2000; k <= 2000; ++k) {
      double d = k * 0.01;
      double ratio = crdme::hop_rate(1.0, 1.0, d) / crdme::hop_rate(1.0, 1.0, -d);
      worst = std::max(worst, std::abs(ratio / std::exp(-d) - 1.0));
    }
    add("hop rate detailed balance", worst <= 1e-12, fmt("max relative defect %.2e over [-20, 20]", worst));
  }
  {
    const auto& kernel = *network.reactions()[0].kernel;
    double worst = 0.0;
    for (const Mesh& m : {lattice, build_mesh(config.length, config.solver.collocation_points)}) {
      double sum = 0.0;
      for (int i = 0; i < m.voxels(); ++i) sum += m.spacing() * kernel_at_distance(m.node_distance(i, 0), kernel);
      worst = std::max(worst, std::abs(sum - 1.0));
    }
    add("kernel marginal", worst <= 1e-10, fmt("|sum h K - 1| = %.2e", worst));
  }
  {
    const auto& rx = network.reactions()[1];
    double worst = 0.0;
    for (double g : config.gammas)
      worst = std::max(worst, std::abs(crdme::unbinding_proposal_rate(0, lattice, *rx.kernel, table, rx.products[0],
                                                                      rx.products[1], g, rx.rate) - rx.rate));
    add("unbinding proposal rate", worst <= 1e-12 * std::max(1.0, rx.rate), fmt("max |rate - mu| = %.2e", worst));
  }
  {
    double worst = 0.0;
    for (int voxels : {2, 3}) {
      auto inst = oracle::pair_instance(voxels, true);
      oracle::MicroCtmc chain(inst.initial, inst.model.network, inst.model.potentials);
      worst = std::max(worst, chain.flux_balance_error(chain.stationary()));
    }
    add("micro chain flux balance", worst <= 1e-12, fmt("max relative imbalance %.2e", worst));
  }
  {
    double worst = 0.0;
    for (const auto& inst : oracle::ssa_micro_instances()) {
      oracle::MicroCtmc chain(inst.initial, inst.model.network, inst.model.potentials);
      worst = std::max(worst, oracle::total_variation(chain.distribution(2.0),
                                                      oracle::empirical_distribution(inst, chain, 2.0, 20000, config.seed)));
    }
    add("simulator against exact chain", worst <= 0.02, fmt("max TV distance %.4f at t = 2, 20000 runs", worst));
  }
  {
    // uniform fields without potentials reduce to the well-mixed law
    Mesh grid = build_mesh(config.length, 64);
    mfm::PideSystem sys(grid, network, build_potentials(config, 0.0));
    mfm::SpectralFields f(grid, 3);
    const double a = 0.07, b = 0.05, c = 0.02;
    for (int i = 0; i < 64; ++i) f.at(0, i) = a, f.at(1, i) = b, f.at(2, i) = c;
    auto r = sys.reaction_rhs(f);
    const double lam = network.reactions()[0].rate, mu = network.reactions()[1].rate;
    const double want[3] = {-lam * a * b + mu * c, -lam * a * b + mu * c, lam * a * b - mu * c};
    double worst = 0.0;
    for (int s = 0; s < 3; ++s)
      for (int i = 0; i < 64; ++i) worst = std::max(worst, std::abs(r[static_cast<std::size_t>(s * 64 + i)] - want[s]));
    add("well-mixed reaction terms", worst <= 1e-10, fmt("max deviation %.2e", worst));
  }
  {
    Mesh grid = build_mesh(config.length, 64);
    mfm::PideSystem sys(grid, network, table, mfm::ConvolutionPath::dense);
    auto f = mfm_initial(config, grid);
    for (int i = 0; i < 64; ++i) f.at(2, i) = 0.5 * (f.at(0, i) + f.at(1, i)) + 0.01;
    auto fast = sys.reaction_rhs(f);
    auto dense = oracle::dense_reaction_rhs(f, network, table);
    double worst = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < fast.size(); ++i) {
      worst = std::max(worst, std::abs(fast[i] - dense[i]));
      scale = std::max(scale, std::abs(dense[i]));
    }
    add("mean-field reaction terms against direct quadrature", worst <= 1e-10 * scale,
        fmt("max relative deviation %.2e", worst / scale));
  }
  {
    Mesh mesh = build_mesh(config.length, 128);
    auto st = frozen_state(config, mesh, 100, config.seed);
    auto samples = sample_reactions(st, network, 1000, config.seed);
    double previous = 2.0, c10 = 0.0;
    bool ok = true;
    std::string detail;
    for (double g : {10.0, 100.0, 1000.0, 10000.0}) {
      double gap = acceptance_gap(st, network, table, g, samples);
      if (g == 10.0) c10 = gap * g;
      ok = ok && gap <= previous && gap <= 5.0 * c10 / g;
      previous = gap;
      detail += fmt("%g:%.2e ", g, gap);
    }
    add("acceptance converges to its mean-field limit", ok, detail);
  }
  {
    const double gamma = config.gammas.front();
    crdme::CrdmeModel model{lattice, network, table, gamma};
    auto tables = std::make_shared<const crdme::CrdmeTables>(std::move(model));
    auto profiles = crdme_initial(config, lattice);
    crdme::Simulator sim(tables);
    std::vector<double> times;
    for (int k = 0; k <= 20; ++k) times.push_back(0.25 * k);
    bool ok = true;
    for (std::uint64_t r = 0; r < 20; ++r) {
      PhiloxStream rng(config.seed, r);
      auto init = crdme::initialize_particles(gamma, profiles, lattice, rng);
      const long ac = init.total(0) + init.total(2), bc = init.total(1) + init.total(2);
      crdme::simulate_trajectory(sim, init, times, rng, [&](std::size_t, const crdme::LatticeState& s) {
        ok = ok && s.total(0) + s.total(2) == ac && s.total(1) + s.total(2) == bc;
      });
    }
    add("particle conservation", ok, "20 trajectories at gamma=" + format_number(gamma) + " up to t=5");
  }
  return out;
}

}  // namespace pbsrdd::cli
