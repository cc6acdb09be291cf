#include "pbsrdd/crdme/ensemble.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "pbsrdd/core/error.hpp"
#include "pbsrdd/crdme/trajectory.hpp"

namespace pbsrdd::crdme {

namespace {

struct Accumulator {
  std::vector<std::uint64_t> counts, count_squares;  // [t][s][i]
  std::vector<std::uint64_t> totals, total_squares;  // [t][s]
  std::uint64_t events = 0;
  std::uint64_t rejections = 0;

  Accumulator(std::size_t cells, std::size_t masses)
      : counts(cells, 0), count_squares(cells, 0), totals(masses, 0), total_squares(masses, 0) {}

  void merge(const Accumulator& o) {
    for (std::size_t k = 0; k < counts.size(); ++k) {
      counts[k] += o.counts[k];
      count_squares[k] += o.count_squares[k];
    }
    for (std::size_t k = 0; k < totals.size(); ++k) {
      totals[k] += o.totals[k];
      total_squares[k] += o.total_squares[k];
    }
    events += o.events;
    rejections += o.rejections;
  }
};

// Sample mean and standard error from exact integer moments.
std::pair<double, double> moments(std::uint64_t sum, std::uint64_t squares, std::uint64_t r) {
  double mean = static_cast<double>(sum) / static_cast<double>(r);
  if (r < 2) return {mean, 0.0};
  int128 spread = static_cast<int128>(r) * squares - static_cast<int128>(sum) * sum;
  double var = static_cast<double>(spread) / (static_cast<double>(r) * static_cast<double>(r - 1));
  return {mean, std::sqrt(var / static_cast<double>(r))};
}

}  // namespace

EnsembleStats run_ensemble(const EnsembleConfig& config) {
  if (!config.tables) throw ModelError("ensemble needs model tables");
  if (config.replicates < 1) throw ModelError("ensemble needs at least one replicate");
  const auto& tables = *config.tables;
  const int species = tables.species();
  const int n = tables.voxels();
  const double gamma = tables.model().gamma;
  if (config.initial.size() != static_cast<std::size_t>(species))
    throw ModelError("one initial profile per species is required");
  const std::size_t times = config.record_times.size();
  const std::size_t cells = times * static_cast<std::size_t>(species) * static_cast<std::size_t>(n);
  const std::size_t masses = times * static_cast<std::size_t>(species);

  const int workers = std::max(1, std::min<int>(config.workers, static_cast<int>(std::min<std::uint64_t>(config.replicates, 1024))));
  std::vector<Accumulator> partial(static_cast<std::size_t>(workers), Accumulator(cells, masses));
  std::atomic<std::uint64_t> next{0};
  std::atomic<std::uint64_t> done{0};
  std::mutex progress_lock;
  std::exception_ptr failure;
  std::mutex failure_lock;

  auto work = [&](int w) {
    try {
      Accumulator& acc = partial[static_cast<std::size_t>(w)];
      Simulator sim(config.tables);
      for (std::uint64_t r; (r = next.fetch_add(1)) < config.replicates;) {
        PhiloxStream rng(config.base_seed, r);
        LatticeState initial = initialize_particles(gamma, config.initial, tables.mesh(), rng);
        auto stats = simulate_trajectory(sim, initial, config.record_times, rng, [&](std::size_t t, const LatticeState& st) {
          for (int s = 0; s < species; ++s) {
            std::uint64_t total = 0;
            std::size_t base = (t * static_cast<std::size_t>(species) + static_cast<std::size_t>(s)) * static_cast<std::size_t>(n);
            auto row = st.counts(s);
            for (int i = 0; i < n; ++i) {
              auto c = static_cast<std::uint64_t>(row[static_cast<std::size_t>(i)]);
              if (!c) continue;
              acc.counts[base + static_cast<std::size_t>(i)] += c;
              acc.count_squares[base + static_cast<std::size_t>(i)] += c * c;
              total += c;
            }
            acc.totals[t * static_cast<std::size_t>(species) + static_cast<std::size_t>(s)] += total;
            acc.total_squares[t * static_cast<std::size_t>(species) + static_cast<std::size_t>(s)] += total * total;
          }
        });
        acc.events += stats.events;
        acc.rejections += stats.rejections;
        std::uint64_t finished = ++done;
        if (config.progress) {
          std::lock_guard lock(progress_lock);
          config.progress(finished);
        }
      }
    } catch (...) {
      std::lock_guard lock(failure_lock);
      if (!failure) failure = std::current_exception();
      next = config.replicates;
    }
  };

  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  Accumulator total(cells, masses);
  for (const auto& p : partial) total.merge(p);

  EnsembleStats out;
  out.times = config.record_times;
  out.species = species;
  out.voxels = n;
  out.gamma = gamma;
  out.spacing = tables.mesh().spacing();
  out.replicates = config.replicates;
  out.events = total.events;
  out.rejections = total.rejections;
  out.concentration.resize(cells);
  out.concentration_stderr.resize(cells);
  const double scale = 1.0 / (out.spacing * gamma);
  for (std::size_t k = 0; k < cells; ++k) {
    auto [m, se] = moments(total.counts[k], total.count_squares[k], config.replicates);
    out.concentration[k] = m * scale;
    out.concentration_stderr[k] = se * scale;
  }
  out.molar_mass.resize(masses);
  out.molar_mass_stderr.resize(masses);
  for (std::size_t k = 0; k < masses; ++k) {
    auto [m, se] = moments(total.totals[k], total.total_squares[k], config.replicates);
    out.molar_mass[k] = m / gamma;
    out.molar_mass_stderr[k] = se / gamma;
  }
  return out;
}

}  // namespace pbsrdd::crdme
