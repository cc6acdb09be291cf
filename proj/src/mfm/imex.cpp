#include "pbsrdd/mfm/imex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pbsrdd/core/error.hpp"

namespace pbsrdd::mfm {

namespace {

using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

double norm_inf(const Vec& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

// G(S) = S - dt T(S) - rhs
void residual(const PideSystem& system, const SpectralFields& s, const SpectralFields& rhs, double dt, Vec& work,
              Vec& out) {
  system.transport(s, work);
  out.resize(s.values.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = s.values[i] - dt * work[i] - rhs.values[i];
}

// Restarted GMRES for J P^{-1} y = b, with J applied by forward differences
// around `state` and P^{-1} the backward-Euler diffusion solve. Returns the
// correction P^{-1} y.
Vec gmres(const PideSystem& system, const SpectralFields& state, const Vec& g0, const SpectralFields& rhs, double dt,
          const Vec& b, const SolverSettings& settings, int& iterations) {
  const std::size_t n = b.size();
  const int m = settings.krylov_restart;
  const double bnorm = norm2(b);
  Vec x(n, 0.0);
  if (bnorm == 0.0) return x;
  const double target = settings.krylov_tol * bnorm;
  const double state_norm = norm2(state.values);

  SpectralFields probe = state;
  Vec work, gp;
  auto apply = [&](const Vec& v, Vec& out) {
    Vec w = v;
    system.inverse_diffusion(dt, w);
    double wn = norm2(w);
    out.assign(n, 0.0);
    if (wn == 0.0) return;
    double eps = std::sqrt(std::numeric_limits<double>::epsilon()) * (1.0 + state_norm) / wn;
    for (std::size_t i = 0; i < n; ++i) probe.values[i] = state.values[i] + eps * w[i];
    residual(system, probe, rhs, dt, work, gp);
    for (std::size_t i = 0; i < n; ++i) out[i] = (gp[i] - g0[i]) / eps;
  };

  std::vector<Vec> basis(static_cast<std::size_t>(m + 1), Vec(n));
  std::vector<double> hess(static_cast<std::size_t>((m + 1) * m));
  std::vector<double> cs(static_cast<std::size_t>(m)), sn(static_cast<std::size_t>(m)), e(static_cast<std::size_t>(m + 1));
  auto H = [&](int i, int j) -> double& { return hess[static_cast<std::size_t>(j * (m + 1) + i)]; };

  Vec r = b, av;
  while (iterations < settings.krylov_max_iters) {
    double beta = norm2(r);
    if (beta <= target) break;
    for (std::size_t i = 0; i < n; ++i) basis[0][i] = r[i] / beta;
    std::fill(e.begin(), e.end(), 0.0);
    e[0] = beta;
    int k = 0;
    for (; k < m && iterations < settings.krylov_max_iters; ++k) {
      ++iterations;
      apply(basis[static_cast<std::size_t>(k)], av);
      // modified Gram-Schmidt
      for (int i = 0; i <= k; ++i) {
        H(i, k) = dot(av, basis[static_cast<std::size_t>(i)]);
        for (std::size_t q = 0; q < n; ++q) av[q] -= H(i, k) * basis[static_cast<std::size_t>(i)][q];
      }
      double hn = norm2(av);
      H(k + 1, k) = hn;
      if (hn > 0.0)
        for (std::size_t q = 0; q < n; ++q) basis[static_cast<std::size_t>(k + 1)][q] = av[q] / hn;
      for (int i = 0; i < k; ++i) {
        double t = cs[static_cast<std::size_t>(i)] * H(i, k) + sn[static_cast<std::size_t>(i)] * H(i + 1, k);
        H(i + 1, k) = -sn[static_cast<std::size_t>(i)] * H(i, k) + cs[static_cast<std::size_t>(i)] * H(i + 1, k);
        H(i, k) = t;
      }
      double d = std::hypot(H(k, k), H(k + 1, k));
      cs[static_cast<std::size_t>(k)] = d == 0.0 ? 1.0 : H(k, k) / d;
      sn[static_cast<std::size_t>(k)] = d == 0.0 ? 0.0 : H(k + 1, k) / d;
      H(k, k) = d;
      H(k + 1, k) = 0.0;
      e[static_cast<std::size_t>(k + 1)] = -sn[static_cast<std::size_t>(k)] * e[static_cast<std::size_t>(k)];
      e[static_cast<std::size_t>(k)] *= cs[static_cast<std::size_t>(k)];
      if (std::abs(e[static_cast<std::size_t>(k + 1)]) <= target || hn == 0.0) {
        ++k;
        break;
      }
    }
    std::vector<double> y(static_cast<std::size_t>(k));
    for (int i = k - 1; i >= 0; --i) {
      double s = e[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < k; ++j) s -= H(i, j) * y[static_cast<std::size_t>(j)];
      y[static_cast<std::size_t>(i)] = H(i, i) == 0.0 ? 0.0 : s / H(i, i);
    }
    for (int i = 0; i < k; ++i)
      for (std::size_t q = 0; q < n; ++q) x[q] += y[static_cast<std::size_t>(i)] * basis[static_cast<std::size_t>(i)][q];
    if (std::abs(e[static_cast<std::size_t>(k)]) <= target) break;
    // explicit residual for the restart
    apply(x, av);
    for (std::size_t q = 0; q < n; ++q) r[q] = b[q] - av[q];
  }
  system.inverse_diffusion(dt, x);
  return x;
}

}  // namespace

bool implicit_transport_solve(const PideSystem& system, const SpectralFields& rhs, double dt,
                              const SolverSettings& settings, SpectralFields& fields, StepResult& stats) {
  fields = rhs;
  system.inverse_diffusion(dt, fields.values);
  Vec work, g;
  for (int it = 0;; ++it) {
    residual(system, fields, rhs, dt, work, g);
    double gn = norm_inf(g);
    if (!std::isfinite(gn)) return false;
    if (gn <= settings.newton_tol) return true;
    if (it >= settings.newton_max_iters) return false;
    ++stats.newton_iterations;
    Vec b(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) b[i] = -g[i];
    Vec delta = gmres(system, fields, g, rhs, dt, b, settings, stats.krylov_iterations);
    for (std::size_t i = 0; i < delta.size(); ++i) fields.values[i] += delta[i];
  }
}

StepResult imex_step(const PideSystem& system, SpectralFields& fields, double dt, const SolverSettings& settings) {
  StepResult stats;
  Vec react;
  system.reaction(fields, react);
  const int n = fields.points();
  SpectralFields rhs = fields;
  SpectralFields next = fields;
  for (;;) {
    for (std::size_t i = 0; i < rhs.values.size(); ++i) rhs.values[i] = fields.values[i] + dt * react[i];
    if (implicit_transport_solve(system, rhs, dt, settings, next, stats)) break;
    dt *= 0.5;
    ++stats.retries;
    if (dt < settings.dt_min) throw NumericalError("solver stall at t = " + std::to_string(fields.time));
  }
  // transport conserves each species exactly, so restore the mean lost to the Newton tolerance
  for (int s = 0; s < fields.species; ++s) {
    double want = 0.0, have = 0.0;
    for (int i = 0; i < n; ++i) {
      want += rhs.at(s, i);
      have += next.at(s, i);
    }
    double shift = (want - have) / n;
    for (int i = 0; i < n; ++i) next.at(s, i) += shift;
  }
  next.time = fields.time + dt;
  for (double v : next.values) {
    if (!std::isfinite(v)) throw NumericalError("non-finite concentration at t = " + std::to_string(next.time));
    if (v < -settings.positivity_tol)
      throw NumericalError("concentration " + std::to_string(v) + " below -positivity_tol at t = " +
                           std::to_string(next.time));
  }
  fields = std::move(next);
  stats.dt = dt;
  return stats;
}

}  // namespace pbsrdd::mfm
