#include "pbsrdd/crdme/trajectory.hpp"

#include <ostream>

#include "pbsrdd/core/error.hpp"

namespace pbsrdd::crdme {

TrajectoryStats simulate_trajectory(Simulator& sim, const LatticeState& initial, std::span<const double> record_times,
                                    PhiloxStream& rng, const SnapshotObserver& observe) {
  for (std::size_t k = 0; k < record_times.size(); ++k) {
    if (k > 0 && record_times[k] < record_times[k - 1]) throw ModelError("record times must be sorted");
    if (record_times[k] < initial.time) throw ModelError("record time before the initial time");
  }
  sim.reset(initial);
  TrajectoryStats stats;
  for (std::size_t k = 0; k < record_times.size(); ++k) {
    const double t = record_times[k];
    while (sim.state().time < t) {
      if (!sim.advance(rng, t)) break;
    }
    if (sim.total_propensity() <= 0.0) stats.absorbed = true;
    observe(k, sim.state());
  }
  stats.events = sim.events();
  stats.rejections = sim.rejections();
  return stats;
}

std::vector<LatticeState> simulate_trajectory(std::shared_ptr<const CrdmeTables> tables, const LatticeState& initial,
                                              std::span<const double> record_times, PhiloxStream& rng) {
  Simulator sim(std::move(tables));
  std::vector<LatticeState> out;
  out.reserve(record_times.size());
  simulate_trajectory(sim, initial, record_times, rng, [&](std::size_t, const LatticeState& s) { out.push_back(s); });
  return out;
}

void write_snapshot_csv(std::ostream& out, std::span<const double> times, std::span<const LatticeState> snapshots,
                        const ReactionNetwork& network) {
  out << "time,species,voxel,count\n";
  for (std::size_t k = 0; k < snapshots.size(); ++k) {
    const auto& st = snapshots[k];
    for (int s = 0; s < st.species(); ++s)
      for (int i = 0; i < st.mesh().voxels(); ++i)
        if (int c = st.count(s, i))
          out << times[k] << ',' << network.species()[static_cast<std::size_t>(s)].name << ',' << i << ',' << c << '\n';
  }
}

}  // namespace pbsrdd::crdme
