#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "pbsrdd/core/int128.hpp"
#include "pbsrdd/core/network.hpp"
#include "pbsrdd/core/potential.hpp"
#include "pbsrdd/core/random.hpp"
#include "pbsrdd/crdme/lattice.hpp"

namespace pbsrdd::crdme {

/// Everything a CRDME trajectory needs besides its state.
struct CrdmeModel {
  Mesh mesh;
  ReactionNetwork network;
  PotentialTable potentials;
  double gamma = 1.0;
};

/// Fixed-point scales used by the event schedule. Pair energies and kernel
/// values are rounded once to these grids so that every running sum is an
/// exact integer: incremental updates and a full rebuild agree bit for bit.
inline constexpr double kEnergyQuantum = 0x1.0p-40;
inline constexpr double kKernelQuantum = 0x1.0p-48;

/// Immutable tables derived from a model: quantized pair-energy profiles,
/// kernel profiles, unbinding partner laws. Shared read-only across workers.
class CrdmeTables {
 public:
  explicit CrdmeTables(CrdmeModel model);

  const CrdmeModel& model() const { return model_; }
  const Mesh& mesh() const { return model_.mesh; }
  int species() const { return species_; }
  int voxels() const { return voxels_; }

  struct Bimolecular {
    int reaction = 0;
    int first = 0;
    int second = 0;
    bool same_species = false;
    double rate = 0.0;                   // lambda
    std::vector<std::int64_t> kernel_q;  // K(d h) / kKernelQuantum, d = 0..N/2
    int range = -1;                      // largest d with kernel_q[d] != 0
  };

  struct Unimolecular {
    int reaction = 0;
    int substrate = 0;
    std::vector<double> voxel_rate;        // proposal rate per particle in voxel k
    std::vector<double> partner_cdf;       // cumulative partner weight by offset 0..N-1
    bool splits = false;                   // 1 -> 2
  };

  std::int64_t pair_q(int s, int t, int d) const { return pair_q_[pair_index(s, t) + static_cast<std::size_t>(d)]; }
  int pair_range(int s, int t) const { return pair_range_[static_cast<std::size_t>(s * species_ + t)]; }
  double hop_prefactor(int s) const { return hop_prefactor_[static_cast<std::size_t>(s)]; }
  double energy_scale() const { return energy_scale_; }
  double one_body_difference(int s, int from, int to) const;
  bool has_one_body() const { return has_one_body_; }

  const std::vector<Bimolecular>& bimolecular() const { return bimolecular_; }
  const std::vector<Unimolecular>& unimolecular() const { return unimolecular_; }

 private:
  std::size_t pair_index(int s, int t) const {
    return static_cast<std::size_t>(s * species_ + t) * static_cast<std::size_t>(half_ + 1);
  }

  CrdmeModel model_;
  int species_;
  int voxels_;
  int half_;
  double energy_scale_;
  std::vector<std::int64_t> pair_q_;
  std::vector<int> pair_range_;
  std::vector<double> hop_prefactor_;
  std::vector<double> one_body_;
  bool has_one_body_ = false;
  std::vector<Bimolecular> bimolecular_;
  std::vector<Unimolecular> unimolecular_;
};

enum class EventKind { hop, reaction };

struct Event {
  EventKind kind = EventKind::hop;
  int channel = 0;  // species for hops, reaction index for reactions
  int from = 0;     // source voxel (hop) or first substrate voxel
  int to = 0;       // target voxel (hop) or first product voxel
  bool accepted = true;
  double waiting_time = 0.0;
};

/// Derived event-schedule data. Every member is a deterministic function of
/// the lattice counts, so a rebuild from scratch must compare equal.
struct Schedule {
  std::vector<std::int64_t> field_q;  // quantized bath energy per (species, voxel)
  std::vector<double> rate_right;  // zero for empty voxels
  std::vector<double> rate_left;
  std::vector<double> leaves;
  std::vector<double> block_sums;
  std::vector<std::vector<std::int64_t>> kernel_first;   // K * n_second, per bimolecular reaction
  std::vector<std::vector<std::int64_t>> kernel_second;  // K * n_first
  std::vector<int128> pair_sums;
  double total = 0.0;

  bool operator==(const Schedule& other) const = default;
};

/// Direct-method SSA over grouped channels: per (species, voxel) hop leaves,
/// one aggregated leaf per bimolecular reaction and per-voxel leaves for
/// unimolecular reactions. Reaction proposals are thinned by the Metropolis
/// acceptance probability evaluated on the pre-event state.
class Simulator {
 public:
  explicit Simulator(std::shared_ptr<const CrdmeTables> tables);

  void reset(const LatticeState& state);

  const LatticeState& state() const { return state_; }
  const CrdmeTables& tables() const { return *tables_; }
  double total_propensity() const { return schedule_.total; }

  /// One SSA event; std::nullopt when the total propensity is zero (absorbing).
  std::optional<Event> step(PhiloxStream& rng);

  /// Like step, but an event that would land after `horizon` is dropped and the
  /// clock stops at the horizon instead. Exact because waiting times are memoryless.
  std::optional<Event> advance(PhiloxStream& rng, double horizon);

  const Schedule& schedule() const { return schedule_; }
  /// Schedule recomputed from the current counts alone.
  Schedule rebuilt_schedule() const;

  double hop_rate(int s, int i, bool right) const;
  double hop_propensity(int s, int i) const;
  double bimolecular_propensity(std::size_t k) const;
  double unimolecular_propensity(std::size_t k, int voxel) const;

  std::uint64_t events() const { return events_; }
  std::uint64_t rejections() const { return rejections_; }

 private:
  static Schedule build(const CrdmeTables& tables, const LatticeState& state);
  static void refresh_rates(const CrdmeTables& tables, const LatticeState& state, Schedule& sched, int s, int i);
  static double bimolecular_leaf(const CrdmeTables::Bimolecular& rx, int128 pair_sum, double gamma);

  std::size_t hop_leaf(int s, int i) const { return static_cast<std::size_t>(s) * voxels_ + static_cast<std::size_t>(i); }
  std::size_t bimolecular_leaf_index(std::size_t k) const { return hop_leaves_ + k; }
  std::size_t unimolecular_leaf_index(std::size_t k, int i) const {
    return hop_leaves_ + bimolecular_count_ + k * voxels_ + static_cast<std::size_t>(i);
  }

  void apply_delta(int s, int i, int delta);
  void flush();
  void set_leaf(std::size_t leaf, double value);
  std::size_t select_leaf(double target) const;

  Event execute_hop(int s, int i, PhiloxStream& rng);
  Event execute_bimolecular(std::size_t k, PhiloxStream& rng);
  Event execute_unimolecular(std::size_t k, int voxel, PhiloxStream& rng);
  bool accept(const ReactionSpec& rx, std::span<const Placed> substrates, std::span<const Placed> products,
              PhiloxStream& rng);

  std::shared_ptr<const CrdmeTables> tables_;
  LatticeState state_;
  Schedule schedule_;
  std::size_t voxels_;
  std::size_t hop_leaves_;
  std::size_t bimolecular_count_;

  void mark_window(int t, int lo, int hi);
  int wrap(int v) const { return wrap_[static_cast<std::size_t>(v + static_cast<int>(voxels_))]; }

  std::vector<int> wrap_;  // v + N -> v mod N for v in [-N, 2N)
  // per species, unwrapped voxel ranges whose hop rates need refreshing
  std::vector<std::vector<std::pair<int, int>>> windows_;
  std::vector<char> dirty_block_;
  std::vector<std::size_t> dirty_blocks_;

  std::uint64_t events_ = 0;
  std::uint64_t rejections_ = 0;
};

inline constexpr std::size_t kLeafBlock = 16;

}  // namespace pbsrdd::crdme
