#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "pbsrdd/core/error.hpp"
#include "pbsrdd/core/kernel.hpp"
#include "pbsrdd/mfm/solve.hpp"
#include "pbsrdd/oracle/dense_rhs.hpp"
#include "pbsrdd/oracle/wellmixed.hpp"

using namespace pbsrdd;
using namespace pbsrdd::mfm;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

PotentialTable default_table(double kappa) { return PotentialTable({0.05, 0.05, 0.1}, kappa); }

double sup_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double sup_abs(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

// positive smooth random-looking fields built from a few low modes
SpectralFields smooth_fields(const Mesh& g, unsigned seed) {
  SpectralFields f(g, 3);
  for (int s = 0; s < 3; ++s)
    for (int i = 0; i < g.voxels(); ++i) {
      double x = g.node(i), v = 0.4;
      for (int k = 1; k <= 4; ++k)
        v += 0.05 / k * std::sin(k * x + 0.7 * (seed + 1) * (s + 1) + 1.3 * k) +
             0.04 / k * std::cos((k + s) * x + 0.3 * seed);
      f.at(s, i) = v;
    }
  return f;
}

SpectralFields default_initial(const Mesh& g, double shift_a = 0.75, double shift_b = 1.25) {
  SpectralFields f(g, 3);
  auto bump = [&](double c) {
    return [c, &g](double x) {
      double d = periodic_distance(x, c * std::numbers::pi, g.length());
      return std::exp(-5 * d * d);
    };
  };
  auto a = normalized_profile(g, bump(shift_a), 0.5);
  auto b = normalized_profile(g, bump(shift_b), 0.5);
  std::copy(a.begin(), a.end(), f.field(0).begin());
  std::copy(b.begin(), b.end(), f.field(1).begin());
  return f;
}
}  // namespace

TEST_CASE("transport of sin is -sin for unit diffusivity") {
  BindingModelParams p;
  p.diffusivity_a = 1.0;
  Mesh g(kTwoPi, 512);
  PideSystem sys(g, make_binding_network(p), default_table(0.0));
  SpectralFields f(g, 3);
  for (int i = 0; i < 512; ++i) f.at(0, i) = std::sin(g.node(i));
  auto t = sys.transport_apply(0, f);
  // k^2 amplifies the transform roundoff; 2e-11 is the double-precision floor at this N
  for (int i = 0; i < 512; ++i) CHECK(std::abs(t[static_cast<std::size_t>(i)] + std::sin(g.node(i))) <= 4e-11);

  Mesh small(kTwoPi, 64);
  PideSystem coarse(small, make_binding_network(p), default_table(0.0));
  SpectralFields s(small, 3);
  for (int i = 0; i < 64; ++i) s.at(0, i) = std::sin(small.node(i));
  auto ts = coarse.transport_apply(0, s);
  for (int i = 0; i < 64; ++i) CHECK(std::abs(ts[static_cast<std::size_t>(i)] + std::sin(small.node(i))) <= 1e-12);
}

TEST_CASE("transport matches the Fourier symbol without potentials") {
  Mesh g(kTwoPi, 128);
  PideSystem sys(g, make_binding_network({}), default_table(0.0));
  SpectralFields f(g, 3);
  for (int k : {3, 21}) {
    for (int i = 0; i < 128; ++i) f.at(2, i) = std::cos(k * g.node(i) + 0.3);
    auto t = sys.transport_apply(2, f);
    for (int i = 0; i < 128; ++i) CHECK(std::abs(t[static_cast<std::size_t>(i)] + 0.5 * k * k * f.at(2, i)) <= 1e-11);
  }
}

TEST_CASE("constant fields have no transport") {
  Mesh g(kTwoPi, 256);
  PideSystem sys(g, make_binding_network({}), default_table(200.0));
  SpectralFields f(g, 3);
  std::fill(f.values.begin(), f.values.end(), 0.3);
  std::vector<double> t;
  sys.transport(f, t);
  CHECK(sup_abs(t) <= 1e-13);
}

TEST_CASE("fft and dense convolution paths agree") {
  Mesh g(kTwoPi, 512);
  PideSystem fast(g, make_binding_network({}), default_table(200.0), ConvolutionPath::fft);
  PideSystem dense(g, make_binding_network({}), default_table(200.0), ConvolutionPath::dense);
  auto f = smooth_fields(g, 3);
  std::vector<double> a, b;
  fast.transport(f, a);
  dense.transport(f, b);
  CHECK(sup_diff(a, b) <= 1e-12 * std::max(1.0, sup_abs(b)));
  for (int s = 0; s < 3; ++s) {
    CHECK(sup_diff(fast.drift(s, f), dense.drift(s, f)) <= 1e-12 * sup_abs(dense.drift(s, f)));
    CHECK(sup_diff(fast.bath_energy(s, f), dense.bath_energy(s, f)) <= 1e-12 * sup_abs(dense.bath_energy(s, f)));
  }
  fast.reaction(f, a);
  dense.reaction(f, b);
  CHECK(sup_diff(a, b) <= 1e-12 * sup_abs(b));

  PideSystem fast0(g, make_binding_network({}), default_table(0.0), ConvolutionPath::fft);
  PideSystem dense0(g, make_binding_network({}), default_table(0.0), ConvolutionPath::dense);
  fast0.reaction(f, a);
  dense0.reaction(f, b);
  CHECK(sup_diff(a, b) <= 1e-12 * sup_abs(b));
}

TEST_CASE("drift matches a finite difference of the bath integral") {
  Mesh g(kTwoPi, 512);
  auto table = default_table(200.0);
  PideSystem sys(g, make_binding_network({}), table);
  auto f = smooth_fields(g, 7);
  const double h = g.spacing(), delta = 1e-6;
  for (int s = 0; s < 3; ++s) {
    auto v = sys.drift(s, f);
    // W(x) = sum_t h sum_j u_{s,t}(|x - x_j|) S_t(x_j), differenced at x_i +- delta
    auto bath = [&](double x) {
      double w = 0.0;
      for (int t = 0; t < 3; ++t)
        for (int j = 0; j < 512; ++j) {
          double r = periodic_distance(x, g.node(j), g.length());
          // the own node contributes symmetrically; its kink at r = 0 averages out
          w += h * table.pair(s, t, r) * f.at(t, j);
        }
      return w;
    };
    double worst = 0.0, scale = sup_abs(v);
    for (int i = 0; i < 512; i += 7) {
      double fd = (bath(g.node(i) + delta) - bath(g.node(i) - delta)) / (2 * delta);
      worst = std::max(worst, std::abs(fd - v[static_cast<std::size_t>(i)]));
    }
    CHECK(worst <= 1e-6 * scale);
  }
}

TEST_CASE("pure unbinding from a uniform C field") {
  Mesh g(kTwoPi, 128);
  PideSystem sys(g, make_binding_network({}), default_table(0.0));
  SpectralFields f(g, 3);
  for (int i = 0; i < 128; ++i) f.at(2, i) = 0.2;
  auto r = sys.reaction_rhs(f);
  for (int i = 0; i < 128; ++i) {
    CHECK(r[static_cast<std::size_t>(i)] == doctest::Approx(0.05 * 0.2).epsilon(1e-10));
    CHECK(r[static_cast<std::size_t>(128 + i)] == doctest::Approx(0.05 * 0.2).epsilon(1e-10));
    CHECK(r[static_cast<std::size_t>(256 + i)] == doctest::Approx(-0.05 * 0.2).epsilon(1e-10));
  }
}

TEST_CASE("uniform fields reduce to the well-mixed rate law") {
  Mesh g(kTwoPi, 256);
  PideSystem sys(g, make_binding_network({}), default_table(0.0));
  SpectralFields f(g, 3);
  const double a = 0.08, b = 0.05, c = 0.02;
  for (int i = 0; i < 256; ++i) {
    f.at(0, i) = a;
    f.at(1, i) = b;
    f.at(2, i) = c;
  }
  auto r = sys.reaction_rhs(f);
  const double flux = 1.0 * a * b - 0.05 * c;
  for (int i = 0; i < 256; ++i) {
    CHECK(std::abs(r[static_cast<std::size_t>(i)] + flux) <= 1e-10);
    CHECK(std::abs(r[static_cast<std::size_t>(256 + i)] + flux) <= 1e-10);
    CHECK(std::abs(r[static_cast<std::size_t>(512 + i)] - flux) <= 1e-10);
  }
}

TEST_CASE("reaction terms match dense quadrature with mean-field acceptance") {
  SUBCASE("default kernel, banded") {
    Mesh g(kTwoPi, 64);
    auto table = default_table(200.0);
    auto net = make_binding_network({});
    PideSystem sys(g, net, table);
    CHECK(sys.kernel_band() < 32);
    for (unsigned seed : {1u, 2u}) {
      auto f = smooth_fields(g, seed);
      auto fast = sys.reaction_rhs(f);
      auto slow = oracle::dense_reaction_rhs(f, net, table);
      CHECK(sup_diff(fast, slow) <= 1e-10 * sup_abs(slow));
    }
  }
  SUBCASE("wide kernel on a coarse grid wraps every offset once") {
    Mesh g(kTwoPi, 16);
    BindingModelParams p;
    p.kernel_width = 1.0;
    auto net = make_binding_network(p);
    auto table = PotentialTable({0.3, 0.3, 0.5}, 5.0);
    PideSystem sys(g, net, table);
    CHECK(2 * sys.kernel_band() + 1 > 16);
    auto f = smooth_fields(g, 4);
    auto fast = sys.reaction_rhs(f);
    auto slow = oracle::dense_reaction_rhs(f, net, table);
    CHECK(sup_diff(fast, slow) <= 1e-10 * sup_abs(slow));
  }
}

TEST_CASE("reaction terms conserve A + C and B + C") {
  Mesh g(kTwoPi, 128);
  PideSystem sys(g, make_binding_network({}), default_table(200.0));
  auto f = smooth_fields(g, 9);
  auto r = sys.reaction_rhs(f);
  double ac = 0.0, bc = 0.0, scale = 0.0;
  for (int i = 0; i < 128; ++i) {
    ac += r[static_cast<std::size_t>(i)] + r[static_cast<std::size_t>(256 + i)];
    bc += r[static_cast<std::size_t>(128 + i)] + r[static_cast<std::size_t>(256 + i)];
    scale += std::abs(r[static_cast<std::size_t>(256 + i)]);
  }
  CHECK(std::abs(ac) <= 1e-14 * scale * 10);
  CHECK(std::abs(bc) <= 1e-14 * scale * 10);
}

TEST_CASE("a diffusion-only step is the backward Euler symbol per mode") {
  BindingModelParams p;
  p.binding_rate = 0.0;
  p.unbinding_rate = 0.0;
  Mesh g(kTwoPi, 128);
  PideSystem sys(g, make_binding_network(p), default_table(0.0));
  SpectralFields f(g, 3);
  const std::array<int, 4> modes{0, 1, 7, 30};
  for (int i = 0; i < 128; ++i)
    for (int s = 0; s < 3; ++s)
      for (int k : modes) f.at(s, i) += std::cos(k * g.node(i) + s) / (k + 1) + (k == 0 ? 2.0 : 0.0);
  const double dt = 1e-2;
  SolverSettings st;
  st.dt_max = dt;
  SpectralFields next = f;
  imex_step(sys, next, dt, st);
  const std::array<double, 3> d{0.25, 0.25, 0.5};
  for (int i = 0; i < 128; ++i)
    for (int s = 0; s < 3; ++s) {
      double want = 0.0;
      for (int k : modes)
        want += (std::cos(k * g.node(i) + s) / (k + 1) + (k == 0 ? 2.0 : 0.0)) /
                (1.0 + dt * d[static_cast<std::size_t>(s)] * k * k);
      CHECK(std::abs(next.at(s, i) - want) <= 1e-12);
    }
}

TEST_CASE("constant fields without reactions are a fixed point") {
  BindingModelParams p;
  p.binding_rate = 0.0;
  p.unbinding_rate = 0.0;
  Mesh g(kTwoPi, 64);
  PideSystem sys(g, make_binding_network(p), default_table(0.0));
  SpectralFields f(g, 3);
  std::fill(f.values.begin(), f.values.end(), 0.25);
  SpectralFields next = f;
  auto r = imex_step(sys, next, 1e-4, SolverSettings{});
  CHECK(r.dt == 1e-4);
  CHECK(next.values == f.values);
}

TEST_CASE("solve lands on output times and conserves mass") {
  Mesh g(kTwoPi, 128);
  PideSystem sys(g, make_binding_network({}), default_table(200.0));
  auto f = default_initial(g);
  SolverSettings st;
  st.dt_max = 3e-3;
  const std::vector<double> times{0.0, 0.01, 0.25, 0.5};
  auto sol = solve(sys, f, times, st);
  REQUIRE(sol.times.size() == 4);
  CHECK(sol.times == times);
  CHECK(sol.fields[0].values == f.values);
  for (const auto& m : sol.masses) {
    CHECK(std::abs(m[0] + m[2] - 0.5) <= 1e-12);
    CHECK(std::abs(m[1] + m[2] - 0.5) <= 1e-12);
  }
  CHECK(sol.masses.back()[2] > 0.0);
  CHECK(sol.fields.back().min_value() >= -st.positivity_tol);

  std::ostringstream fields_csv, mass_csv;
  write_fields_csv(fields_csv, sol, {"A", "B", "C"});
  write_mass_csv(mass_csv, sol, {"A", "B", "C"});
  CHECK(fields_csv.str().rfind("time,x,A,B,C\n", 0) == 0);
  CHECK(mass_csv.str().rfind("time,mass_A,mass_B,mass_C\n", 0) == 0);
  CHECK_THROWS_AS(solve(sys, f, std::vector<double>{0.5, 0.1}, st), ModelError);
}

TEST_CASE("a negative field aborts the step") {
  Mesh g(kTwoPi, 32);
  PideSystem sys(g, make_binding_network({}), default_table(0.0));
  SpectralFields f(g, 3);
  std::fill(f.values.begin(), f.values.end(), 0.1);
  f.at(0, 3) = -1e-3;
  CHECK_THROWS_AS(imex_step(sys, f, 1e-4, SolverSettings{}), NumericalError);
}

TEST_CASE("a stalled Newton iteration is reported") {
  Mesh g(kTwoPi, 64);
  PideSystem sys(g, make_binding_network({}), default_table(200.0));
  auto f = default_initial(g);
  SolverSettings st;
  st.newton_max_iters = 1;
  st.newton_tol = 1e-300;
  st.dt_min = 1e-5;
  CHECK_THROWS_WITH_AS(imex_step(sys, f, 1e-4, st), doctest::Contains("solver stall"), NumericalError);
}

TEST_CASE("translating the data by one voxel translates the solution") {
  Mesh g(kTwoPi, 128);
  PideSystem sys(g, make_binding_network({}), default_table(200.0));
  auto f = default_initial(g);
  SpectralFields shifted(g, 3);
  for (int s = 0; s < 3; ++s)
    for (int i = 0; i < 128; ++i) shifted.at(s, g.wrap(i + 1)) = f.at(s, i);
  SolverSettings st;
  st.dt_max = 2e-3;
  const std::vector<double> times{0.2};
  auto a = solve(sys, f, times, st).fields[0];
  auto b = solve(sys, shifted, times, st).fields[0];
  double worst = 0.0;
  for (int s = 0; s < 3; ++s)
    for (int i = 0; i < 128; ++i) worst = std::max(worst, std::abs(b.at(s, g.wrap(i + 1)) - a.at(s, i)));
  CHECK(worst <= 1e-10);
}

TEST_CASE("exchanging A and B mirrors the solution") {
  BindingModelParams p;
  p.diffusivity_a = 0.3;
  p.diffusivity_b = 0.2;
  p.radius_a = 0.05;
  p.radius_b = 0.07;
  BindingModelParams q = p;
  std::swap(q.diffusivity_a, q.diffusivity_b);
  std::swap(q.radius_a, q.radius_b);
  Mesh g(kTwoPi, 128);
  PideSystem sp(g, make_binding_network(p), PotentialTable({p.radius_a, p.radius_b, p.radius_c}, 200.0));
  PideSystem sq(g, make_binding_network(q), PotentialTable({q.radius_a, q.radius_b, q.radius_c}, 200.0));
  auto f = smooth_fields(g, 5);
  auto mirrored = f;
  std::copy(f.field(0).begin(), f.field(0).end(), mirrored.field(1).begin());
  std::copy(f.field(1).begin(), f.field(1).end(), mirrored.field(0).begin());
  SolverSettings st;
  st.dt_max = 2e-3;
  const std::vector<double> times{0.2};
  auto a = solve(sp, f, times, st).fields[0];
  auto b = solve(sq, mirrored, times, st).fields[0];
  double worst = 0.0;
  for (int i = 0; i < 128; ++i) {
    worst = std::max(worst, std::abs(a.at(0, i) - b.at(1, i)));
    worst = std::max(worst, std::abs(a.at(1, i) - b.at(0, i)));
    worst = std::max(worst, std::abs(a.at(2, i) - b.at(2, i)));
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("uniform data follows the well-mixed ODE") {
  Mesh g(kTwoPi, 32);
  PideSystem sys(g, make_binding_network({}), default_table(0.0));
  SpectralFields f(g, 3);
  const double mass = 0.5 / kTwoPi;
  for (int i = 0; i < 32; ++i) f.at(0, i) = f.at(1, i) = mass;
  const std::vector<double> times{0.5, 1.0, 2.0};
  SolverSettings st;
  st.dt_max = 1e-4;
  auto sol = solve(sys, f, times, st);
  auto ode = oracle::wellmixed_ode({mass, mass, 0.0}, 1.0, 0.05, times);
  for (std::size_t k = 0; k < times.size(); ++k) {
    // first-order time stepping: the error is O(dt), well under 1e-6 here
    CHECK(std::abs(sol.fields[k].at(2, 5) - ode[k][2]) <= 1e-6);
    CHECK(std::abs(sol.fields[k].at(2, 5) - sol.fields[k].at(2, 17)) <= 1e-15);
  }
}

TEST_CASE("doubling the grid converges algebraically with potentials") {
  // the trapezoid over the kinked pair potential limits the rate; see README
  auto run = [](int n) {
    Mesh g(kTwoPi, n);
    PideSystem sys(g, make_binding_network({}), default_table(200.0));
    SolverSettings st;
    st.dt_max = 1e-3;
    const std::vector<double> times{0.1};
    return solve(sys, default_initial(g), times, st).masses[0][2];
  };
  const double c128 = run(128), c256 = run(256), c512 = run(512);
  const double coarse = std::abs(c128 - c256), fine = std::abs(c256 - c512);
  MESSAGE("C(0.1) differences: " << coarse << " then " << fine);
  CHECK(fine < coarse / 2.5);
  CHECK(fine < 1e-7);
}
