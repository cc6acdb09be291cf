#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "pbsrdd/crdme/simulator.hpp"

namespace pbsrdd::crdme {

/// Called with (record index, state) for each record time, in order.
using SnapshotObserver = std::function<void(std::size_t, const LatticeState&)>;

struct TrajectoryStats {
  std::uint64_t events = 0;
  std::uint64_t rejections = 0;
  bool absorbed = false;
};

/// Runs one exact SSA trajectory from `initial`. The snapshot at record time t
/// is the state after the last event at or before t (right-continuous paths).
/// Record times must be sorted and not earlier than initial.time.
TrajectoryStats simulate_trajectory(Simulator& sim, const LatticeState& initial,
                                    std::span<const double> record_times, PhiloxStream& rng,
                                    const SnapshotObserver& observe);

std::vector<LatticeState> simulate_trajectory(std::shared_ptr<const CrdmeTables> tables, const LatticeState& initial,
                                              std::span<const double> record_times, PhiloxStream& rng);

/// Writes `time,species,voxel,count` rows (nonzero entries only).
void write_snapshot_csv(std::ostream& out, std::span<const double> times, std::span<const LatticeState> snapshots,
                        const ReactionNetwork& network);

}  // namespace pbsrdd::crdme
