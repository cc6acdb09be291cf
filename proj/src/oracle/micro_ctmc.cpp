#include "pbsrdd/oracle/micro_ctmc.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <functional>

#include "pbsrdd/core/acceptance.hpp"
#include "pbsrdd/core/error.hpp"
#include "pbsrdd/core/placement.hpp"
#include "pbsrdd/crdme/rates.hpp"
#include "pbsrdd/oracle/pair_enumeration.hpp"

namespace pbsrdd::oracle {

namespace {

using Counts = std::vector<int>;
using Emit = std::function<void(const Counts&, double)>;

struct Channels {
  const ReactionNetwork& network;
  const PotentialTable& table;
  const Mesh& mesh;
  double gamma;
  int species;

  crdme::LatticeState as_state(const Counts& c) const {
    crdme::LatticeState st(mesh, species, gamma);
    for (int s = 0; s < species; ++s)
      for (int i = 0; i < mesh.voxels(); ++i) st.set(s, i, c[static_cast<std::size_t>(s * mesh.voxels() + i)]);
    return st;
  }

  int& at(Counts& c, int s, int i) const { return c[static_cast<std::size_t>(s * mesh.voxels() + mesh.wrap(i))]; }
  int at(const Counts& c, int s, int i) const {
    return c[static_cast<std::size_t>(s * mesh.voxels() + mesh.wrap(i))];
  }

  void hops(const Counts& c, const Emit& emit) const {
    const crdme::LatticeState st = as_state(c);
    const int n = mesh.voxels();
    for (int s = 0; s < species; ++s) {
      const double d = network.species()[static_cast<std::size_t>(s)].diffusivity;
      if (d == 0.0) continue;
      for (int i = 0; i < n; ++i) {
        const int here = at(c, s, i);
        if (here == 0) continue;
        // two channels even when both neighbours are the same voxel
        for (int j : {i + 1, i - 1}) {
          const double delta = move_delta(st, s, i, mesh.wrap(j), table);
          Counts next = c;
          at(next, s, i) -= 1;
          at(next, s, j) += 1;
          emit(next, here * crdme::hop_rate(d, mesh.spacing(), delta));
        }
      }
    }
  }

  void reactions(const Counts& c, const Emit& emit) const {
    const crdme::LatticeState st = as_state(c);
    const LatticeBath bath = st.bath(table);
    const int n = mesh.voxels();
    for (const auto& rx : network.reactions()) {
      if (rx.substrates.size() == 2) {
        const int s1 = rx.substrates[0], s2 = rx.substrates[1];
        for (int i = 0; i < n; ++i)
          for (int j = (s1 == s2 ? i : 0); j < n; ++j) {
            double pairs = s1 == s2 && i == j ? 0.5 * at(c, s1, i) * (at(c, s1, i) - 1)
                                              : static_cast<double>(at(c, s1, i)) * at(c, s2, j);
            if (pairs == 0.0) continue;
            const double proposal = pairs * crdme::binding_proposal_rate(i, j, mesh, *rx.kernel, rx.rate, gamma);
            const std::array<Placed, 2> subs{Placed{s1, mesh.node(i)}, Placed{s2, mesh.node(j)}};
            Counts base = c;
            at(base, s1, i) -= 1;
            at(base, s2, j) -= 1;
            if (rx.products.size() == 1) {
              for (int k : {i, j}) {
                const std::array<Placed, 1> prod{Placed{rx.products[0], mesh.node(k)}};
                Counts next = base;
                at(next, rx.products[0], k) += 1;
                emit(next, 0.5 * proposal * acceptance_probability(rx, subs, prod, bath));
              }
            } else if (rx.products.size() == 2) {
              const std::array<Placed, 2> prod{Placed{rx.products[0], mesh.node(i)},
                                               Placed{rx.products[1], mesh.node(j)}};
              Counts next = base;
              at(next, rx.products[0], i) += 1;
              at(next, rx.products[1], j) += 1;
              emit(next, proposal * acceptance_probability(rx, subs, prod, bath));
            } else {
              throw ModelError("unsupported reaction order in the micro chain");
            }
          }
      } else if (rx.substrates.size() == 1) {
        const int s = rx.substrates[0];
        for (int k = 0; k < n; ++k) {
          const int here = at(c, s, k);
          if (here == 0) continue;
          const std::array<Placed, 1> subs{Placed{s, mesh.node(k)}};
          Counts base = c;
          at(base, s, k) -= 1;
          if (rx.products.size() == 1) {
            const std::array<Placed, 1> prod{Placed{rx.products[0], mesh.node(k)}};
            Counts next = base;
            at(next, rx.products[0], k) += 1;
            emit(next, here * rx.rate * acceptance_probability(rx, subs, prod, bath));
          } else if (rx.products.size() == 2) {
            const int p1 = rx.products[0], p2 = rx.products[1];
            const double rate =
                here * crdme::unbinding_proposal_rate(k, mesh, *rx.kernel, table, p1, p2, gamma, rx.rate);
            const BackwardPlacement place = backward_placement_distribution(k, mesh, *rx.kernel, table, p1, p2, gamma);
            for (int a = 0; a < n; ++a)
              for (int b = 0; b < n; ++b) {
                const double prob = place.pair_probability(a, b);
                if (prob == 0.0) continue;
                const std::array<Placed, 2> prod{Placed{p1, mesh.node(a)}, Placed{p2, mesh.node(b)}};
                Counts next = base;
                at(next, p1, a) += 1;
                at(next, p2, b) += 1;
                emit(next, rate * prob * acceptance_probability(rx, subs, prod, bath));
              }
          } else {
            throw ModelError("unsupported reaction order in the micro chain");
          }
        }
      } else {
        throw ModelError("unsupported reaction order in the micro chain");
      }
    }
  }
};

}  // namespace

MicroCtmc::MicroCtmc(const crdme::LatticeState& initial, const ReactionNetwork& network, const PotentialTable& table,
                     std::size_t max_states) {
  network.validate();
  const Mesh& mesh = initial.mesh();
  Channels ch{network, table, mesh, initial.gamma(), initial.species()};
  if (network.species_count() != initial.species()) throw ModelError("state and network disagree on species");

  const Counts start(initial.counts().begin(), initial.counts().end());
  std::map<Counts, bool> seen{{start, true}};
  std::deque<Counts> frontier{start};
  while (!frontier.empty()) {
    Counts c = std::move(frontier.front());
    frontier.pop_front();
    auto visit = [&](const Counts& next, double rate) {
      if (rate <= 0.0 || seen.count(next)) return;
      if (seen.size() >= max_states) throw ModelError("micro chain exceeds " + std::to_string(max_states) + " states");
      seen.emplace(next, true);
      frontier.push_back(next);
    };
    ch.hops(c, visit);
    ch.reactions(c, visit);
  }
  for (const auto& [c, _] : seen) {
    index_.emplace(c, states_.size());
    states_.push_back(c);
  }

  const auto n = static_cast<Eigen::Index>(states_.size());
  q_ = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t a = 0; a < states_.size(); ++a) {
    auto add = [&](const Counts& next, double rate) {
      if (rate <= 0.0 || next == states_[a]) return;
      q_(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(index_.at(next))) += rate;
    };
    ch.hops(states_[a], add);
    ch.reactions(states_[a], add);
    // diagonal set last so the row sums to zero up to one rounding
    const auto row = static_cast<Eigen::Index>(a);
    q_(row, row) = 0.0;
    q_(row, row) = -q_.row(row).sum();
  }
  p0_ = Eigen::VectorXd::Zero(n);
  p0_(static_cast<Eigen::Index>(index_.at(start))) = 1.0;
}

std::size_t MicroCtmc::index_of(const std::vector<int>& counts) const {
  auto it = index_.find(counts);
  return it == index_.end() ? states_.size() : it->second;
}

std::size_t MicroCtmc::index_of(const crdme::LatticeState& state) const {
  return index_of(std::vector<int>(state.counts().begin(), state.counts().end()));
}

Eigen::VectorXd MicroCtmc::distribution(double t) const {
  if (t < 0.0) throw ModelError("time must be >= 0");
  const Eigen::Index n = q_.rows();
  const double norm = q_.cwiseAbs().rowwise().sum().maxCoeff() * t;
  int squarings = 0;
  while (std::ldexp(norm, -squarings) > 0.5) ++squarings;
  const Eigen::MatrixXd a = q_ * std::ldexp(t, -squarings);
  // Taylor terms until they stop contributing at the 1e-16 level; ||a|| <= 1/2
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd e = term;
  for (int k = 1; k < 40; ++k) {
    term = term * a / static_cast<double>(k);
    e += term;
    if (term.cwiseAbs().maxCoeff() < 1e-18) break;
  }
  for (int s = 0; s < squarings; ++s) e = e * e;
  Eigen::VectorXd p = (p0_.transpose() * e).transpose();
  return p;
}

Eigen::VectorXd MicroCtmc::distribution_uniformized(double t) const {
  if (t < 0.0) throw ModelError("time must be >= 0");
  const double rate = (-q_.diagonal()).maxCoeff();
  if (rate == 0.0 || t == 0.0) return p0_;
  const Eigen::Index n = q_.rows();
  const Eigen::MatrixXd jump = Eigen::MatrixXd::Identity(n, n) + q_ / rate;
  // split t so each Poisson mean stays small enough for exp(-lambda) to be representable
  const int pieces = std::max(1, static_cast<int>(std::ceil(rate * t / 50.0)));
  const double lambda = rate * t / pieces;
  Eigen::VectorXd p = p0_;
  for (int piece = 0; piece < pieces; ++piece) {
    Eigen::RowVectorXd v = p.transpose();
    Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(n);
    double weight = std::exp(-lambda);
    for (int k = 0; k < 10000; ++k) {
      if (k > 0) {
        v = v * jump;
        weight *= lambda / k;
      }
      acc += weight * v;
      if (k > lambda && weight < 1e-20) break;
    }
    p = acc.transpose();
  }
  return p;
}

Eigen::VectorXd MicroCtmc::stationary() const {
  // Grassmann-Taksar-Heyman elimination: LU on the off-diagonal rates with the
  // pivots formed as sums, so no subtraction occurs and every component keeps
  // full relative accuracy, including states of weight e^-20.
  const Eigen::Index n = q_.rows();
  Eigen::MatrixXd a = q_;
  a.diagonal().setZero();
  for (Eigen::Index k = n - 1; k > 0; --k) {
    const double pivot = a.row(k).head(k).sum();
    if (!(pivot > 0.0)) throw ModelError("the micro chain is not irreducible");
    a.col(k).head(k) /= pivot;
    a.topLeftCorner(k, k).noalias() += a.col(k).head(k) * a.row(k).head(k);
  }
  Eigen::VectorXd pi = Eigen::VectorXd::Zero(n);
  pi(0) = 1.0;
  for (Eigen::Index j = 1; j < n; ++j) pi(j) = pi.head(j).dot(a.col(j).head(j));
  return pi / pi.sum();
}

double MicroCtmc::flux_balance_error(const Eigen::VectorXd& pi) const {
  double worst = 0.0;
  for (Eigen::Index a = 0; a < q_.rows(); ++a)
    for (Eigen::Index b = a + 1; b < q_.cols(); ++b) {
      const double forward = pi(a) * q_(a, b), backward = pi(b) * q_(b, a);
      const double scale = std::max(forward, backward);
      if (scale == 0.0) continue;
      worst = std::max(worst, std::abs(forward - backward) / scale);
    }
  return worst;
}

}  // namespace pbsrdd::oracle
