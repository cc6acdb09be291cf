#include "pbsrdd/crdme/simulator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "pbsrdd/core/acceptance.hpp"
#include "pbsrdd/core/error.hpp"
#include "pbsrdd/core/kernel.hpp"
#include "pbsrdd/core/placement.hpp"
#include "pbsrdd/crdme/rates.hpp"

namespace pbsrdd::crdme {

namespace {

std::int64_t quantize(double value, double quantum) {
  double q = std::nearbyint(value / quantum);
  if (!(std::fabs(q) < 0x1.0p62)) throw ModelError("value too large for the event schedule");
  return static_cast<std::int64_t>(q);
}

// Calls f(voxel, distance) for every voxel within `radius` of `centre`.
// Windows wider than the mesh collapse to the whole mesh so no voxel is
// visited twice.
template <class F>
void for_window(const Mesh& mesh, int centre, int radius, F&& f) {
  const int n = mesh.voxels();
  if (radius < 0) return;
  if (2 * radius + 1 >= n) {
    for (int i = 0; i < n; ++i) f(i, mesh.distance_index(i, centre));
    return;
  }
  int lo = centre - radius;
  int hi = centre + radius;
  if (lo < 0) {
    for (int i = lo + n; i < n; ++i) f(i, centre + n - i);
    lo = 0;
  }
  if (hi >= n) {
    for (int i = 0; i <= hi - n; ++i) f(i, i + n - centre);
    hi = n - 1;
  }
  for (int i = lo; i <= hi; ++i) f(i, i < centre ? centre - i : i - centre);
}

}  // namespace

CrdmeTables::CrdmeTables(CrdmeModel model)
    : model_(std::move(model)),
      species_(model_.network.species_count()),
      voxels_(model_.mesh.voxels()),
      half_(model_.mesh.voxels() / 2),
      energy_scale_(kEnergyQuantum) {
  const auto& net = model_.network;
  const auto& table = model_.potentials;
  const Mesh& mesh = model_.mesh;
  const double h = mesh.spacing();
  const double gamma = model_.gamma;
  if (!(gamma > 0.0)) throw ModelError("gamma must be > 0");
  if (table.species_count() != species_)
    throw ModelError("potential table has " + std::to_string(table.species_count()) + " species, network has " +
                     std::to_string(species_));

  pair_q_.assign(static_cast<std::size_t>(species_ * species_) * static_cast<std::size_t>(half_ + 1), 0);
  pair_range_.assign(static_cast<std::size_t>(species_ * species_), -1);
  for (int s = 0; s < species_; ++s)
    for (int t = 0; t < species_; ++t)
      for (int d = 0; d <= half_; ++d) {
        auto q = quantize(table.pair(s, t, d * h) / gamma, kEnergyQuantum);
        pair_q_[pair_index(s, t) + static_cast<std::size_t>(d)] = q;
        if (q != 0) pair_range_[static_cast<std::size_t>(s * species_ + t)] = d;
      }

  for (const auto& sp : net.species()) hop_prefactor_.push_back(sp.diffusivity / (h * h));

  has_one_body_ = table.has_one_body();
  one_body_.assign(static_cast<std::size_t>(species_ * voxels_), 0.0);
  if (has_one_body_)
    for (int s = 0; s < species_; ++s)
      for (int i = 0; i < voxels_; ++i) one_body_[static_cast<std::size_t>(s * voxels_ + i)] = table.one_body(s, mesh.node(i));

  const auto& reactions = net.reactions();
  for (std::size_t r = 0; r < reactions.size(); ++r) {
    const auto& rx = reactions[r];
    if (rx.substrates.size() == 2) {
      Bimolecular b;
      b.reaction = static_cast<int>(r);
      b.first = rx.substrates[0];
      b.second = rx.substrates[1];
      b.same_species = b.first == b.second;
      b.rate = rx.rate;
      b.kernel_q.resize(static_cast<std::size_t>(half_ + 1));
      for (int d = 0; d <= half_; ++d) {
        auto q = quantize(kernel_at_distance(d * h, *rx.kernel), kKernelQuantum);
        b.kernel_q[static_cast<std::size_t>(d)] = q;
        if (q != 0) b.range = d;
      }
      bimolecular_.push_back(std::move(b));
    } else {
      Unimolecular u;
      u.reaction = static_cast<int>(r);
      u.substrate = rx.substrates[0];
      u.splits = rx.products.size() == 2;
      if (u.splits) {
        int p1 = rx.products[0], p2 = rx.products[1];
        auto local = backward_placement_distribution(0, mesh, *rx.kernel, table, p1, p2, gamma);
        double acc = 0.0;
        for (double w : local.weights) u.partner_cdf.push_back(acc += w);
        for (int k = 0; k < voxels_; ++k)
          u.voxel_rate.push_back(unbinding_proposal_rate(k, mesh, *rx.kernel, table, p1, p2, gamma, rx.rate));
      } else {
        u.voxel_rate.assign(static_cast<std::size_t>(voxels_), rx.rate);
      }
      unimolecular_.push_back(std::move(u));
    }
  }
}

double CrdmeTables::one_body_difference(int s, int from, int to) const {
  if (!has_one_body_) return 0.0;
  return one_body_[static_cast<std::size_t>(s * voxels_ + to)] - one_body_[static_cast<std::size_t>(s * voxels_ + from)];
}

Simulator::Simulator(std::shared_ptr<const CrdmeTables> tables)
    : tables_(std::move(tables)),
      state_(tables_->mesh(), tables_->species(), tables_->model().gamma),
      voxels_(static_cast<std::size_t>(tables_->voxels())),
      hop_leaves_(static_cast<std::size_t>(tables_->species()) * voxels_),
      bimolecular_count_(tables_->bimolecular().size()) {
  reset(state_);
}

void Simulator::reset(const LatticeState& state) {
  if (state.species() != tables_->species() || state.mesh().voxels() != tables_->voxels() ||
      state.mesh().length() != tables_->mesh().length() || state.gamma() != tables_->model().gamma)
    throw ModelError("lattice state does not match the simulator model");
  state_ = state;
  schedule_ = build(*tables_, state_);
  const int n = static_cast<int>(voxels_);
  wrap_.resize(3 * voxels_);
  for (int v = -n; v < 2 * n; ++v) wrap_[static_cast<std::size_t>(v + n)] = state_.mesh().wrap(v);
  windows_.assign(static_cast<std::size_t>(tables_->species()), {});
  dirty_block_.assign(schedule_.block_sums.size(), 0);
  dirty_blocks_.clear();
  events_ = 0;
  rejections_ = 0;
}

void Simulator::refresh_rates(const CrdmeTables& tables, const LatticeState& state, Schedule& sched, int s, int i) {
  const std::size_t n = static_cast<std::size_t>(tables.voxels());
  const std::size_t at = static_cast<std::size_t>(s) * n + static_cast<std::size_t>(i);
  if (state.count(s, i) == 0) {
    sched.rate_right[at] = 0.0;
    sched.rate_left[at] = 0.0;
    return;
  }
  const Mesh& mesh = tables.mesh();
  const int right = mesh.wrap(i + 1);
  const int left = mesh.wrap(i - 1);
  const std::int64_t self = tables.pair_q(s, s, 0) - tables.pair_q(s, s, 1);
  const std::int64_t here = sched.field_q[at];
  const std::size_t row = static_cast<std::size_t>(s) * n;
  const double q = tables.energy_scale();
  double dr = static_cast<double>(sched.field_q[row + static_cast<std::size_t>(right)] - here + self) * q +
              tables.one_body_difference(s, i, right);
  double dl = static_cast<double>(sched.field_q[row + static_cast<std::size_t>(left)] - here + self) * q +
              tables.one_body_difference(s, i, left);
  const double pre = tables.hop_prefactor(s);
  sched.rate_right[at] = pre * bernoulli(dr);
  sched.rate_left[at] = pre * bernoulli(dl);
}

double Simulator::bimolecular_leaf(const CrdmeTables::Bimolecular& rx, int128 pair_sum, double gamma) {
  double pairs = static_cast<double>(pair_sum) * kKernelQuantum;
  if (rx.same_species) pairs *= 0.5;
  return rx.rate / gamma * pairs;
}

Schedule Simulator::build(const CrdmeTables& tables, const LatticeState& state) {
  const Mesh& mesh = tables.mesh();
  const int n = tables.voxels();
  const int species = tables.species();
  const std::size_t nn = static_cast<std::size_t>(n);
  Schedule sched;
  sched.field_q.assign(static_cast<std::size_t>(species) * nn, 0);
  for (int t = 0; t < species; ++t)
    for (int k = 0; k < n; ++k) {
      int c = state.count(t, k);
      if (c == 0) continue;
      for (int s = 0; s < species; ++s)
        for_window(mesh, k, tables.pair_range(s, t), [&](int i, int d) {
          sched.field_q[static_cast<std::size_t>(s) * nn + static_cast<std::size_t>(i)] += c * tables.pair_q(s, t, d);
        });
    }

  sched.rate_right.assign(sched.field_q.size(), 0.0);
  sched.rate_left.assign(sched.field_q.size(), 0.0);
  for (int s = 0; s < species; ++s)
    for (int i = 0; i < n; ++i) refresh_rates(tables, state, sched, s, i);

  long particles = 0;
  for (int s = 0; s < species; ++s) particles += state.total(s);

  for (const auto& b : tables.bimolecular()) {
    if (static_cast<double>(b.kernel_q[0]) * 2.0 * static_cast<double>(particles + 1) > 0x1.0p62)
      throw ModelError("too many particles for the fixed-point binding schedule");
    std::vector<std::int64_t> g(nn, 0), hh(nn, 0);
    for (int k = 0; k < n; ++k) {
      int c2 = state.count(b.second, k);
      int c1 = state.count(b.first, k);
      if (c2 != 0)
        for_window(mesh, k, b.range, [&](int i, int d) { g[static_cast<std::size_t>(i)] += c2 * b.kernel_q[static_cast<std::size_t>(d)]; });
      if (c1 != 0)
        for_window(mesh, k, b.range, [&](int i, int d) { hh[static_cast<std::size_t>(i)] += c1 * b.kernel_q[static_cast<std::size_t>(d)]; });
    }
    int128 sum = 0;
    for (int i = 0; i < n; ++i) sum += static_cast<int128>(state.count(b.first, i)) * g[static_cast<std::size_t>(i)];
    if (b.same_species) sum -= static_cast<int128>(b.kernel_q[0]) * state.total(b.first);
    sched.kernel_first.push_back(std::move(g));
    sched.kernel_second.push_back(std::move(hh));
    sched.pair_sums.push_back(sum);
  }

  for (int s = 0; s < species; ++s)
    for (int i = 0; i < n; ++i) {
      std::size_t at = static_cast<std::size_t>(s) * nn + static_cast<std::size_t>(i);
      sched.leaves.push_back(state.count(s, i) * (sched.rate_right[at] + sched.rate_left[at]));
    }
  for (std::size_t k = 0; k < tables.bimolecular().size(); ++k)
    sched.leaves.push_back(bimolecular_leaf(tables.bimolecular()[k], sched.pair_sums[k], state.gamma()));
  for (const auto& u : tables.unimolecular())
    for (int i = 0; i < n; ++i) sched.leaves.push_back(state.count(u.substrate, i) * u.voxel_rate[static_cast<std::size_t>(i)]);

  const std::size_t blocks = (sched.leaves.size() + kLeafBlock - 1) / kLeafBlock;
  sched.block_sums.assign(blocks, 0.0);
  for (std::size_t b = 0; b < blocks; ++b) {
    double acc = 0.0;
    for (std::size_t l = b * kLeafBlock; l < std::min(sched.leaves.size(), (b + 1) * kLeafBlock); ++l) acc += sched.leaves[l];
    sched.block_sums[b] = acc;
  }
  sched.total = 0.0;
  for (double v : sched.block_sums) sched.total += v;
  return sched;
}

Schedule Simulator::rebuilt_schedule() const { return build(*tables_, state_); }

double Simulator::hop_rate(int s, int i, bool right) const {
  std::size_t at = hop_leaf(s, state_.mesh().wrap(i));
  return right ? schedule_.rate_right[at] : schedule_.rate_left[at];
}

double Simulator::hop_propensity(int s, int i) const { return schedule_.leaves[hop_leaf(s, state_.mesh().wrap(i))]; }

double Simulator::bimolecular_propensity(std::size_t k) const { return schedule_.leaves[bimolecular_leaf_index(k)]; }

double Simulator::unimolecular_propensity(std::size_t k, int voxel) const {
  return schedule_.leaves[unimolecular_leaf_index(k, state_.mesh().wrap(voxel))];
}

void Simulator::apply_delta(int s, int k, int delta) {
  const CrdmeTables& tables = *tables_;
  const Mesh& mesh = tables.mesh();
  const int species = tables.species();
  k = mesh.wrap(k);
  state_.add(s, k, delta);

  for (int t = 0; t < species; ++t) {
    const int range = tables.pair_range(t, s);
    std::int64_t* field = schedule_.field_q.data() + static_cast<std::size_t>(t) * voxels_;
    for_window(mesh, k, range, [&](int i, int d) { field[i] += delta * tables.pair_q(t, s, d); });
    int reach = std::max(range, -1) + 1;
    if (reach > 0 || t == s) mark_window(t, k - reach, k + reach);
  }

  const auto& bis = tables.bimolecular();
  for (std::size_t b = 0; b < bis.size(); ++b) {
    const auto& rx = bis[b];
    if (rx.first != s && rx.second != s) continue;
    auto& g = schedule_.kernel_first[b];
    auto& hh = schedule_.kernel_second[b];
    auto& sum = schedule_.pair_sums[b];
    const std::size_t kk = static_cast<std::size_t>(k);
    if (rx.same_species) {
      // the self pair is excluded, so only the cross term g_k enters
      sum += static_cast<int128>(2 * delta) * g[kk] + static_cast<int128>(delta) * delta * rx.kernel_q[0] -
             static_cast<int128>(delta) * rx.kernel_q[0];
      for_window(mesh, k, rx.range, [&](int i, int d) {
        g[static_cast<std::size_t>(i)] += delta * rx.kernel_q[static_cast<std::size_t>(d)];
        hh[static_cast<std::size_t>(i)] += delta * rx.kernel_q[static_cast<std::size_t>(d)];
      });
    } else if (rx.first == s) {
      sum += static_cast<int128>(delta) * g[kk];
      for_window(mesh, k, rx.range, [&](int i, int d) { hh[static_cast<std::size_t>(i)] += delta * rx.kernel_q[static_cast<std::size_t>(d)]; });
    } else {
      sum += static_cast<int128>(delta) * hh[kk];
      for_window(mesh, k, rx.range, [&](int i, int d) { g[static_cast<std::size_t>(i)] += delta * rx.kernel_q[static_cast<std::size_t>(d)]; });
    }
    set_leaf(bimolecular_leaf_index(b), bimolecular_leaf(rx, sum, state_.gamma()));
  }

  const auto& unis = tables.unimolecular();
  for (std::size_t u = 0; u < unis.size(); ++u)
    if (unis[u].substrate == s)
      set_leaf(unimolecular_leaf_index(u, k), state_.count(s, k) * unis[u].voxel_rate[static_cast<std::size_t>(k)]);
}

void Simulator::set_leaf(std::size_t leaf, double value) {
  schedule_.leaves[leaf] = value;
  std::size_t block = leaf / kLeafBlock;
  if (!dirty_block_[block]) {
    dirty_block_[block] = 1;
    dirty_blocks_.push_back(block);
  }
}

void Simulator::mark_window(int t, int lo, int hi) {
  auto& list = windows_[static_cast<std::size_t>(t)];
  const int n = static_cast<int>(voxels_);
  if (!list.empty()) {
    auto& last = list.back();
    // bring the new range next to the previous one before trying to merge
    if (lo - last.first > n / 2) lo -= n, hi -= n;
    else if (last.first - lo > n / 2) lo += n, hi += n;
    if (lo <= last.second + 1 && hi >= last.first - 1) {
      last.first = std::min(last.first, lo);
      last.second = std::max(last.second, hi);
      return;
    }
  }
  list.emplace_back(lo, hi);
}

void Simulator::flush() {
  const int n = static_cast<int>(voxels_);
  for (int t = 0; t < tables_->species(); ++t) {
    auto& list = windows_[static_cast<std::size_t>(t)];
    for (auto [lo, hi] : list) {
      if (hi - lo + 1 >= n) lo = 0, hi = n - 1;
      // keep lo inside [-N, N) so wrap() stays in its table
      while (lo < -n) lo += n, hi += n;
      while (lo >= n) lo -= n, hi -= n;
      for (int v = lo; v <= hi; ++v) {
        int i = wrap(v);
        std::size_t at = hop_leaf(t, i);
        if (state_.count(t, i) == 0 && schedule_.leaves[at] == 0.0 && schedule_.rate_right[at] == 0.0) continue;
        refresh_rates(*tables_, state_, schedule_, t, i);
        set_leaf(at, state_.count(t, i) * (schedule_.rate_right[at] + schedule_.rate_left[at]));
      }
    }
    list.clear();
  }
  const auto& leaves = schedule_.leaves;
  for (std::size_t b : dirty_blocks_) {
    double acc = 0.0;
    for (std::size_t l = b * kLeafBlock; l < std::min(leaves.size(), (b + 1) * kLeafBlock); ++l) acc += leaves[l];
    schedule_.block_sums[b] = acc;
    dirty_block_[b] = 0;
  }
  dirty_blocks_.clear();
  double total = 0.0;
  for (double v : schedule_.block_sums) total += v;
  schedule_.total = total;
}

std::size_t Simulator::select_leaf(double target) const {
  const auto& blocks = schedule_.block_sums;
  const auto& leaves = schedule_.leaves;
  std::size_t b = 0;
  for (; b + 1 < blocks.size(); ++b) {
    if (target < blocks[b]) break;
    target -= blocks[b];
  }
  std::size_t end = std::min(leaves.size(), (b + 1) * kLeafBlock);
  std::size_t last = leaves.size();
  for (std::size_t l = b * kLeafBlock; l < end; ++l) {
    if (leaves[l] <= 0.0) continue;
    last = l;
    if (target < leaves[l]) return l;
    target -= leaves[l];
  }
  if (last != leaves.size()) return last;
  // rounding walked past the block; take the last positive leaf anywhere
  for (std::size_t l = leaves.size(); l-- > 0;)
    if (leaves[l] > 0.0) return l;
  throw NumericalError("event selection found no positive propensity");
}

std::optional<Event> Simulator::step(PhiloxStream& rng) {
  return advance(rng, std::numeric_limits<double>::infinity());
}

std::optional<Event> Simulator::advance(PhiloxStream& rng, double horizon) {
  const double total = schedule_.total;
  if (!(total > 0.0)) {
    if (std::isfinite(horizon) && horizon > state_.time) state_.time = horizon;
    return std::nullopt;
  }
  const double dt = rng.exponential(total);
  if (state_.time + dt > horizon) {
    state_.time = horizon;
    return std::nullopt;
  }
  state_.time += dt;
  std::size_t leaf = select_leaf(rng.uniform() * total);
  Event ev;
  if (leaf < hop_leaves_) {
    ev = execute_hop(static_cast<int>(leaf / voxels_), static_cast<int>(leaf % voxels_), rng);
  } else if (leaf < hop_leaves_ + bimolecular_count_) {
    ev = execute_bimolecular(leaf - hop_leaves_, rng);
  } else {
    std::size_t rest = leaf - hop_leaves_ - bimolecular_count_;
    ev = execute_unimolecular(rest / voxels_, static_cast<int>(rest % voxels_), rng);
  }
  ev.waiting_time = dt;
  ++events_;
  if (!ev.accepted) ++rejections_;
  return ev;
}

Event Simulator::execute_hop(int s, int i, PhiloxStream& rng) {
  std::size_t at = hop_leaf(s, i);
  double rr = schedule_.rate_right[at];
  double rl = schedule_.rate_left[at];
  int to = state_.mesh().wrap(rng.uniform() * (rr + rl) < rr ? i + 1 : i - 1);
  apply_delta(s, i, -1);
  apply_delta(s, to, +1);
  flush();
  return Event{EventKind::hop, s, i, to, true, 0.0};
}

bool Simulator::accept(const ReactionSpec& rx, std::span<const Placed> substrates, std::span<const Placed> products,
                       PhiloxStream& rng) {
  if (rx.form == AcceptanceForm::none) return true;
  double p = acceptance_probability(rx, substrates, products, state_.bath(tables_->model().potentials));
  return p >= 1.0 || rng.uniform() < p;
}

Event Simulator::execute_bimolecular(std::size_t k, PhiloxStream& rng) {
  const auto& b = tables_->bimolecular()[k];
  const auto& rx = tables_->model().network.reactions()[static_cast<std::size_t>(b.reaction)];
  const Mesh& mesh = state_.mesh();
  const int n = mesh.voxels();
  const auto& g = schedule_.kernel_first[k];
  const std::int64_t self = b.same_species ? b.kernel_q[0] : 0;

  // first substrate voxel ~ n_i (g_i - self), partner voxel ~ (n_j - [same voxel]) K(i - j)
  double weight_total = 0.0;
  for (int i = 0; i < n; ++i) {
    int c = state_.count(b.first, i);
    if (c) weight_total += static_cast<double>(c) * static_cast<double>(g[static_cast<std::size_t>(i)] - self);
  }
  double target = rng.uniform() * weight_total;
  int vi = -1;
  for (int i = 0; i < n; ++i) {
    int c = state_.count(b.first, i);
    if (!c) continue;
    double w = static_cast<double>(c) * static_cast<double>(g[static_cast<std::size_t>(i)] - self);
    if (w <= 0.0) continue;
    vi = i;
    if (target < w) break;
    target -= w;
  }
  if (vi < 0) throw NumericalError("binding channel selected with no eligible pair");

  double partner_total = 0.0;
  auto partner_weight = [&](int j) {
    int c = state_.count(b.second, j) - (b.same_species && j == vi ? 1 : 0);
    if (c <= 0) return 0.0;
    return static_cast<double>(c) * static_cast<double>(b.kernel_q[static_cast<std::size_t>(mesh.distance_index(vi, j))]);
  };
  std::vector<int> candidates;
  std::vector<double> weights;
  for_window(mesh, vi, b.range, [&](int j, int) {
    double w = partner_weight(j);
    if (w > 0.0) {
      candidates.push_back(j);
      weights.push_back(w);
      partner_total += w;
    }
  });
  if (candidates.empty()) throw NumericalError("binding channel selected with no eligible partner");
  target = rng.uniform() * partner_total;
  int vj = candidates.back();
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    if (target < weights[c]) {
      vj = candidates[c];
      break;
    }
    target -= weights[c];
  }

  std::array<Placed, 2> subs{Placed{b.first, mesh.node(vi)}, Placed{b.second, mesh.node(vj)}};
  std::array<int, 2> product_voxels{vi, vj};
  std::vector<Placed> prods;
  if (rx.products.size() == 1) {
    int at = rng.uniform() < 0.5 ? vi : vj;
    product_voxels = {at, at};
    prods.push_back(Placed{rx.products[0], mesh.node(at)});
  } else {
    prods.push_back(Placed{rx.products[0], mesh.node(vi)});
    prods.push_back(Placed{rx.products[1], mesh.node(vj)});
  }

  Event ev{EventKind::reaction, b.reaction, vi, product_voxels[0], false, 0.0};
  if (!accept(rx, subs, prods, rng)) return ev;
  ev.accepted = true;
  apply_delta(b.first, vi, -1);
  apply_delta(b.second, vj, -1);
  for (std::size_t p = 0; p < rx.products.size(); ++p) apply_delta(rx.products[p], product_voxels[p], +1);
  flush();
  return ev;
}

Event Simulator::execute_unimolecular(std::size_t k, int z, PhiloxStream& rng) {
  const auto& u = tables_->unimolecular()[k];
  const auto& rx = tables_->model().network.reactions()[static_cast<std::size_t>(u.reaction)];
  const Mesh& mesh = state_.mesh();
  std::array<Placed, 1> subs{Placed{u.substrate, mesh.node(z)}};
  std::vector<Placed> prods;
  std::array<int, 2> product_voxels{z, z};
  if (u.splits) {
    bool first_at_z = rng.uniform() < 0.5;
    double target = rng.uniform() * u.partner_cdf.back();
    auto it = std::upper_bound(u.partner_cdf.begin(), u.partner_cdf.end(), target);
    int offset = it == u.partner_cdf.end() ? mesh.voxels() - 1 : static_cast<int>(it - u.partner_cdf.begin());
    int partner = mesh.wrap(z + offset);
    product_voxels = first_at_z ? std::array<int, 2>{z, partner} : std::array<int, 2>{partner, z};
    prods.push_back(Placed{rx.products[0], mesh.node(product_voxels[0])});
    prods.push_back(Placed{rx.products[1], mesh.node(product_voxels[1])});
  } else {
    prods.push_back(Placed{rx.products[0], mesh.node(z)});
  }

  Event ev{EventKind::reaction, u.reaction, z, product_voxels[0], false, 0.0};
  if (!accept(rx, subs, prods, rng)) return ev;
  ev.accepted = true;
  apply_delta(u.substrate, z, -1);
  for (std::size_t p = 0; p < rx.products.size(); ++p) apply_delta(rx.products[p], product_voxels[p], +1);
  flush();
  return ev;
}

}  // namespace pbsrdd::crdme
