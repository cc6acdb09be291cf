// Acceptance run: one PASS/FAIL line per check.
//   acceptance [--only N]... [--workers W] [--out DIR]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "pbsrdd/cli/config.hpp"
#include "pbsrdd/cli/study.hpp"
#include "pbsrdd/cli/validate.hpp"
#include "pbsrdd/core/random.hpp"
#include "pbsrdd/crdme/rates.hpp"
#include "pbsrdd/crdme/simulator.hpp"
#include "pbsrdd/mfm/solve.hpp"
#include "pbsrdd/oracle/micro_ctmc.hpp"
#include "pbsrdd/oracle/micro_instances.hpp"
#include "pbsrdd/oracle/wellmixed.hpp"

using namespace pbsrdd;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(const char* f, double a = 0.0, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void note(const std::string& line) {
  std::fprintf(stderr, "  %s\n", line.c_str());
  std::fflush(stderr);
}

cli::ExperimentConfig default_config() {
  cli::ExperimentConfig config;
  config.finalize();
  return config;
}

// kappa = 200 and kappa = 0 mean-field runs at the default parameters, shared by several checks
struct MeanFieldCache {
  std::optional<mfm::MfmSolution> repulsive, free;

  const mfm::MfmSolution& get(double kappa) {
    auto& slot = kappa > 0.0 ? repulsive : free;
    if (!slot) {
      auto start = std::chrono::steady_clock::now();
      slot = cli::run_mfm(default_config(), kappa);
      note(fmt("mean-field run, kappa = %g: %.0f s", kappa, seconds_since(start)));
    }
    return *slot;
  }
};

Outcome detailed_balance() {
  auto start = std::chrono::steady_clock::now();
  double hop = 0.0;
  for (int k = -20000; k <= 20000; ++k) {
    const double d = k * 1e-3;
    const double ratio = crdme::hop_rate(0.25, 0.1, d) / crdme::hop_rate(0.25, 0.1, -d);
    hop = std::max(hop, std::abs(ratio / std::exp(-d) - 1.0));
  }
  double flux = 0.0;
  for (int voxels : {2, 3}) {
    auto inst = oracle::pair_instance(voxels, true);
    oracle::MicroCtmc chain(inst.initial, inst.model.network, inst.model.potentials);
    flux = std::max(flux, chain.flux_balance_error(chain.stationary()));
  }
  const double took = seconds_since(start);
  return {hop <= 1e-12 && flux <= 1e-12 && took < 1.0,
          fmt("hop ratio defect %.1e, flux imbalance %.1e, %.2f s", hop, flux, took)};
}

Outcome ctmc_equivalence() {
  auto start = std::chrono::steady_clock::now();
  double worst = 0.0;
  std::string detail;
  for (const auto& inst : oracle::ssa_micro_instances()) {
    oracle::MicroCtmc chain(inst.initial, inst.model.network, inst.model.potentials);
    const double tv =
        oracle::total_variation(chain.distribution(2.0), oracle::empirical_distribution(inst, chain, 2.0, 100000, 2));
    worst = std::max(worst, tv);
    detail += inst.name + " " + fmt("%.4f", tv) + ", ";
  }
  const double took = seconds_since(start);
  return {worst <= 0.02 && took < 120.0, "TV " + detail + fmt("%.1f s", took)};
}

Outcome wellmixed_reduction() {
  auto start = std::chrono::steady_clock::now();
  cli::ExperimentConfig config;
  config.kappa = 0.0;
  config.free_reference = false;
  const double a0 = 0.5 / config.length;
  config.initial = {cli::ProfileSpec{"1", {}, 0.5}, cli::ProfileSpec{"1", {}, 0.5}, cli::ProfileSpec{"0", {}, 0.0}};
  config.finalize();
  auto sol = cli::run_mfm(config, 0.0);
  auto exact = oracle::wellmixed_ode({a0, a0, 0.0}, config.binding_rate, config.unbinding_rate, sol.times);
  double worst = 0.0;
  for (std::size_t t = 0; t < sol.times.size(); ++t)
    for (int s = 0; s < 3; ++s)
      for (double v : sol.fields[t].field(s)) worst = std::max(worst, std::abs(v - exact[t][static_cast<std::size_t>(s)]));
  const double took = seconds_since(start);
  return {worst <= 1e-6 && took < 60.0, fmt("sup error %.2e over [0, %g], %.1f s", worst, config.t_end, took)};
}

Outcome conservation(MeanFieldCache& cache) {
  const auto& sol = cache.get(200.0);
  double drift = 0.0;
  const auto& m0 = sol.masses.front();
  for (const auto& m : sol.masses) {
    drift = std::max(drift, std::abs((m[0] + m[2]) - (m0[0] + m0[2])));
    drift = std::max(drift, std::abs((m[1] + m[2]) - (m0[1] + m0[2])));
  }

  // every event of a set of full-length CRDME trajectories
  cli::ExperimentConfig config = default_config();
  const Mesh mesh = build_mesh(config.length, config.voxels);
  const auto profiles = cli::crdme_initial(config, mesh);
  std::uint64_t events = 0, violations = 0, runs = 0;
  for (auto [gamma, count] : {std::pair{50.0, 200}, std::pair{200.0, 40}}) {
    auto tables = std::make_shared<const crdme::CrdmeTables>(
        crdme::CrdmeModel{mesh, cli::build_network(config), cli::build_potentials(config, config.kappa), gamma});
    crdme::Simulator sim(tables);
    for (int r = 0; r < count; ++r, ++runs) {
      PhiloxStream rng(99, runs);
      sim.reset(crdme::initialize_particles(gamma, profiles, mesh, rng));
      const long ac = sim.state().total(0) + sim.state().total(2);
      const long bc = sim.state().total(1) + sim.state().total(2);
      while (sim.advance(rng, config.t_end)) {
        ++events;
        if (sim.state().total(0) + sim.state().total(2) != ac || sim.state().total(1) + sim.state().total(2) != bc)
          ++violations;
      }
    }
  }
  return {drift <= 1e-8 && violations == 0,
          fmt("mean-field drift %.1e; ", drift) + std::to_string(violations) + " violations in " +
              std::to_string(events) + " events over " + std::to_string(runs) + " trajectories"};
}

Outcome figure_reproduction(MeanFieldCache& cache, int workers, const std::string& out) {
  auto start = std::chrono::steady_clock::now();
  cli::ExperimentConfig config;
  config.gammas = {50.0, 200.0};
  config.replicates = 10000;
  config.workers = workers;
  config.output_dir = out;
  config.finalize();
  cli::CachedMeanField cached{&cache.get(200.0), &cache.get(0.0)};
  auto result = cli::run_study(config, [](const std::string& s) { note(s); }, cached);

  const auto& lo = result.gammas[0];
  const auto& hi = result.gammas[1];
  auto stderr_at = [](const cli::GammaResult& g) { return g.stats.mass_stderr(g.comparison.sup_index, 2); };
  const double margin = stderr_at(lo) + stderr_at(hi);
  const double e50 = lo.comparison.sup_error, e200 = hi.comparison.sup_error;
  const bool ok = e50 >= 0.002 && e50 <= 0.010 && e200 + margin < e50;
  return {ok, fmt("sup error %.5f at gamma 50, %.5f at gamma 200, combined stderr %.5f, %.0f s", e50, e200, margin,
                  seconds_since(start))};
}

Outcome potential_effect(MeanFieldCache& cache) {
  const double with = cache.get(200.0).masses.back()[2];
  const double without = cache.get(0.0).masses.back()[2];
  return {with <= 0.9 * without, fmt("C(40) = %.5f with kappa 200, %.5f without (%.1f%% lower)", with, without,
                                     100.0 * (1.0 - with / without))};
}

Outcome acceptance_limit() {
  auto start = std::chrono::steady_clock::now();
  cli::ExperimentConfig config = default_config();
  const auto network = cli::build_network(config);
  const auto table = cli::build_potentials(config, config.kappa);
  const Mesh mesh = build_mesh(config.length, config.voxels);
  auto state = cli::frozen_state(config, mesh, 100, 7);
  auto samples = cli::sample_reactions(state, network, 1000, 7);
  double previous = INFINITY, c = 0.0;
  bool ok = true;
  std::string detail;
  for (double gamma : {10.0, 100.0, 1000.0, 10000.0}) {
    const double gap = cli::acceptance_gap(state, network, table, gamma, samples);
    if (gamma == 10.0) c = gap * gamma;
    ok = ok && gap < previous && gap <= 5.0 * c / gamma;
    previous = gap;
    detail += fmt("%g: %.2e, ", gamma, gap);
  }
  const double took = seconds_since(start);
  return {ok && took < 60.0, detail + fmt("C = %.3f, %.1f s", c, took)};
}

Outcome imex_order() {
  std::vector<mfm::SpectralFields> finals;
  std::string detail;
  for (int steps : {20, 40, 80, 160, 320}) {
    cli::ExperimentConfig config;
    config.t_end = 0.1;
    config.record_times = {0.1};
    config.free_reference = false;
    config.solver.dt_max = 0.1 / steps;
    config.finalize();
    auto sol = cli::run_mfm(config, config.kappa);
    finals.push_back(sol.fields.back());
  }
  std::vector<double> diffs;
  for (std::size_t k = 1; k < finals.size(); ++k) {
    double d = 0.0;
    for (std::size_t i = 0; i < finals[k].values.size(); ++i)
      d = std::max(d, std::abs(finals[k].values[i] - finals[k - 1].values[i]));
    diffs.push_back(d);
  }
  bool ok = true;
  detail = "orders";
  for (std::size_t k = 1; k < diffs.size(); ++k) {
    const double order = std::log2(diffs[k - 1] / diffs[k]);
    detail += fmt(" %.3f", order);
    ok = ok && std::abs(order - 1.0) <= 0.1;
  }
  return {ok, detail + fmt(" (successive differences %.2e ... %.2e)", diffs.front(), diffs.back())};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::string out = "acceptance-out";
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    if (arg == "--only" && i + 1 < argc) {
      only.insert(std::atoi(argv[++i]));
    } else if (arg == "--workers" && i + 1 < argc) {
      workers = std::max(1, std::atoi(argv[++i]));
    } else if (arg == "--out" && i + 1 < argc) {
      out = argv[++i];
    } else {
      std::fprintf(stderr, "usage: %s [--only N]... [--workers W] [--out DIR]\n", argv[0]);
      return 2;
    }
  }

  MeanFieldCache cache;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> checks{
      {"detailed balance", detailed_balance},
      {"exact chain equivalence", ctmc_equivalence},
      {"well-mixed reduction", wellmixed_reduction},
      {"conservation", [&] { return conservation(cache); }},
      {"particle vs mean-field error", [&] { return figure_reproduction(cache, workers, out); }},
      {"potential effect direction", [&] { return potential_effect(cache); }},
      {"acceptance probability limit", acceptance_limit},
      {"IMEX temporal order", imex_order},
  };

  int failures = 0;
  for (std::size_t k = 0; k < checks.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!only.empty() && !only.count(id)) continue;
    Outcome outcome;
    try {
      outcome = checks[k].second();
    } catch (const std::exception& e) {
      outcome = {false, std::string("error: ") + e.what()};
    }
    failures += outcome.passed ? 0 : 1;
    std::printf("[%s] %d %s: %s\n", outcome.passed ? "PASS" : "FAIL", id, checks[k].first.c_str(),
                outcome.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
