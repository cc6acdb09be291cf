#include "pbsrdd/mfm/operators.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include "pbsrdd/core/error.hpp"
#include "pbsrdd/core/kernel.hpp"

namespace pbsrdd::mfm {

using cplx = std::complex<double>;

struct PideSystem::Workspace {
  int n;
  double* real;
  fftw_complex* spec;
  fftw_plan forward_plan;
  fftw_plan backward_plan;
  std::vector<double> wavenumber;  // k_m for m = 0..n/2, Nyquist derivative dropped

  Workspace(int points, double length) : n(points) {
    real = fftw_alloc_real(static_cast<std::size_t>(n));
    spec = fftw_alloc_complex(static_cast<std::size_t>(n / 2 + 1));
    forward_plan = fftw_plan_dft_r2c_1d(n, real, spec, FFTW_ESTIMATE);
    backward_plan = fftw_plan_dft_c2r_1d(n, spec, real, FFTW_ESTIMATE);
    wavenumber.resize(static_cast<std::size_t>(n / 2 + 1));
    for (int m = 0; m <= n / 2; ++m) wavenumber[static_cast<std::size_t>(m)] = 2.0 * std::numbers::pi * m / length;
    if (n % 2 == 0) wavenumber.back() = 0.0;
  }
  ~Workspace() {
    fftw_destroy_plan(forward_plan);
    fftw_destroy_plan(backward_plan);
    fftw_free(real);
    fftw_free(spec);
  }
  Workspace(const Workspace&) = delete;
  Workspace& operator=(const Workspace&) = delete;

  std::size_t modes() const { return static_cast<std::size_t>(n / 2 + 1); }

  void forward(std::span<const double> in, cplx* out) {
    std::copy(in.begin(), in.end(), real);
    fftw_execute(forward_plan);
    for (std::size_t m = 0; m < modes(); ++m) out[m] = cplx(spec[m][0], spec[m][1]);
  }

  void backward(const cplx* in, std::span<double> out) {
    for (std::size_t m = 0; m < modes(); ++m) {
      spec[m][0] = in[m].real();
      spec[m][1] = in[m].imag();
    }
    fftw_execute(backward_plan);
    const double scale = 1.0 / n;
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = real[i] * scale;
  }
};

namespace {

// One kernel offset o of the pair sums: row sums over j = i + o for every i,
// and the matching column contributions at j. The j arrays start at i = 0.
// min(1, 1/x) = min(1, x) / x, so the unbinding factors reuse the binding caps
// with the 1/x split into per-point weights.
#if defined(__GNUC__) && defined(__x86_64__) && !defined(__clang__)
__attribute__((target_clones("arch=haswell", "default")))
#endif
void accumulate_offset(std::size_t n, double kh, const double* __restrict a1, const double* __restrict a2,
                       const double* __restrict A, const double* __restrict ia1c, const double* __restrict ia2,
                       const double* __restrict b1, const double* __restrict b2, const double* __restrict B,
                       const double* __restrict ib1, const double* __restrict ib2c, double* __restrict r1,
                       double* __restrict r2, double* __restrict r3, double* __restrict r4, double* __restrict c1,
                       double* __restrict c2, double* __restrict c3, double* __restrict c4) {
  auto cap = [](double v) { return v < 1.0 ? v : 1.0; };
  for (std::size_t i = 0; i < n; ++i) {
    const double p1 = kh * cap(a1[i] * b1[i]);
    const double p2 = kh * cap(a2[i] * b2[i]);
    r1[i] += p1 * B[i];
    r2[i] += p2 * B[i];
    r3[i] += p1 * ib1[i];
    r4[i] += p2 * ib2c[i];
    c1[i] += p1 * A[i];
    c2[i] += p2 * A[i];
    c3[i] += p2 * ia2[i];
    c4[i] += p1 * ia1c[i];
  }
}

}  // namespace

PideSystem::PideSystem(Mesh grid, ReactionNetwork network, PotentialTable potentials, ConvolutionPath path)
    : grid_(grid), network_(std::move(network)), potentials_(std::move(potentials)), path_(path) {
  if (network_.species_count() != 3) throw ModelError("the mean-field solver handles the three species A, B, C");
  if (potentials_.species_count() != 3) throw ModelError("potential table must describe three species");
  const int n = grid_.voxels();
  const double h = grid_.spacing();
  ws_ = std::make_unique<Workspace>(n, grid_.length());

  std::optional<KernelSpec> kernel;
  for (const auto& rx : network_.reactions()) {
    bool binding = rx.substrates.size() == 2 && rx.products.size() == 1 && rx.products[0] == 2 &&
                   std::min(rx.substrates[0], rx.substrates[1]) == 0 && std::max(rx.substrates[0], rx.substrates[1]) == 1;
    bool unbinding = rx.substrates.size() == 1 && rx.products.size() == 2 && rx.substrates[0] == 2 &&
                     std::min(rx.products[0], rx.products[1]) == 0 && std::max(rx.products[0], rx.products[1]) == 1;
    if (!binding && !unbinding) throw ModelError("the mean-field solver supports only A + B <-> C reactions");
    if (kernel && (kernel->width != rx.kernel->width || kernel->normalization != rx.kernel->normalization))
      throw ModelError("binding and unbinding must share one reaction kernel");
    kernel = rx.kernel;
    (binding ? lambda_ : mu_) += rx.rate;
  }
  for (const auto& sp : network_.species()) diffusivity_.push_back(sp.diffusivity);

  std::vector<double> krow(static_cast<std::size_t>(n), 0.0);
  if (kernel) {
    const double k0 = kernel_at_distance(0.0, *kernel);
    for (int d = 0; d <= n / 2; ++d) {
      double k = kernel_at_distance(d * h, *kernel);
      if (k < 0x1.0p-60 * k0) break;
      kernel_values_.push_back(k);
      band_ = d;
    }
    for (int m = 0; m < n; ++m) krow[static_cast<std::size_t>(m)] = h * kernel_at_distance(grid_.node_distance(m, 0), *kernel);
  }
  kernel_mass_ = 0.0;
  for (double v : krow) kernel_mass_ += v;
  kernel_ = make_circulant(std::move(krow));

  for (int s = 0; s < 3; ++s)
    for (int t = 0; t < 3; ++t) {
      std::vector<double> urow(static_cast<std::size_t>(n), 0.0), grow(static_cast<std::size_t>(n), 0.0);
      for (int m = 0; m < n; ++m) {
        int d = grid_.distance_index(m, 0);
        urow[static_cast<std::size_t>(m)] = h * potentials_.pair(s, t, d * h);
        // d/dx u(|x|) is odd; it vanishes at 0 and at the antipode
        if (d == 0 || 2 * d == n) continue;
        double slope = h * potentials_.pair_slope(s, t, d * h);
        grow[static_cast<std::size_t>(m)] = m < n - m ? slope : -slope;
      }
      pair_.push_back(make_circulant(std::move(urow)));
      slope_.push_back(make_circulant(std::move(grow)));
    }

  one_body_.assign(static_cast<std::size_t>(3 * n), 0.0);
  for (int s = 0; s < 3; ++s)
    for (int i = 0; i < n; ++i) one_body_[static_cast<std::size_t>(s * n + i)] = potentials_.one_body(s, grid_.node(i));
  free_ = potentials_.is_zero();
}

PideSystem::~PideSystem() = default;
PideSystem::PideSystem(PideSystem&&) noexcept = default;
PideSystem& PideSystem::operator=(PideSystem&&) noexcept = default;

PideSystem::Circulant PideSystem::make_circulant(std::vector<double> row) const {
  Circulant c;
  c.zero = std::all_of(row.begin(), row.end(), [](double v) { return v == 0.0; });
  c.hat.resize(ws_->modes());
  ws_->forward(row, c.hat.data());
  c.row = std::move(row);
  return c;
}

void PideSystem::convolve(const Circulant& c, std::span<const double> f, std::span<double> out) const {
  const int n = grid_.voxels();
  if (c.zero) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  if (path_ == ConvolutionPath::dense) {
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int j = 0; j < n; ++j) acc += c.row[static_cast<std::size_t>((i - j + n) % n)] * f[static_cast<std::size_t>(j)];
      out[static_cast<std::size_t>(i)] = acc;
    }
    return;
  }
  std::vector<cplx> fh(ws_->modes());
  ws_->forward(f, fh.data());
  for (std::size_t m = 0; m < fh.size(); ++m) fh[m] *= c.hat[m];
  ws_->backward(fh.data(), out);
}

std::vector<double> PideSystem::derivative(std::span<const double> f) const {
  std::vector<cplx> fh(ws_->modes());
  ws_->forward(f, fh.data());
  for (std::size_t m = 0; m < fh.size(); ++m) fh[m] *= cplx(0.0, ws_->wavenumber[m]);
  std::vector<double> out(f.size());
  ws_->backward(fh.data(), out);
  return out;
}

std::vector<double> PideSystem::drift(int s, const SpectralFields& fields) const {
  const std::size_t n = static_cast<std::size_t>(grid_.voxels());
  std::vector<double> v(n, 0.0), tmp(n);
  for (int t = 0; t < 3; ++t) {
    const auto& c = slope_[static_cast<std::size_t>(s * 3 + t)];
    if (c.zero) continue;
    convolve(c, fields.field(t), tmp);
    for (std::size_t i = 0; i < n; ++i) v[i] += tmp[i];
  }
  return v;
}

std::vector<double> PideSystem::bath_energy(int s, const SpectralFields& fields) const {
  const std::size_t n = static_cast<std::size_t>(grid_.voxels());
  std::vector<double> p(one_body_.begin() + static_cast<std::ptrdiff_t>(s * n),
                        one_body_.begin() + static_cast<std::ptrdiff_t>((s + 1) * n));
  std::vector<double> tmp(n);
  for (int t = 0; t < 3; ++t) {
    const auto& c = pair_[static_cast<std::size_t>(s * 3 + t)];
    if (c.zero) continue;
    convolve(c, fields.field(t), tmp);
    for (std::size_t i = 0; i < n; ++i) p[i] += tmp[i];
  }
  return p;
}

void PideSystem::transport(const SpectralFields& fields, std::vector<double>& out) const {
  const std::size_t n = static_cast<std::size_t>(grid_.voxels());
  const std::size_t modes = ws_->modes();
  out.resize(3 * n);
  std::vector<cplx> hats(3 * modes), acc(modes), flux_hat(modes);
  for (int s = 0; s < 3; ++s) ws_->forward(fields.field(s), hats.data() + static_cast<std::size_t>(s) * modes);
  std::vector<double> flux(n), v(n);
  for (int s = 0; s < 3; ++s) {
    auto S = fields.field(s);
    const cplx* hat = hats.data() + static_cast<std::size_t>(s) * modes;
    // S v_s, with v_s the drift from the pair and one-body potentials
    bool drifting = false;
    if (path_ == ConvolutionPath::fft) {
      std::fill(acc.begin(), acc.end(), cplx(0.0));
      for (int t = 0; t < 3; ++t) {
        const auto& c = slope_[static_cast<std::size_t>(s * 3 + t)];
        if (c.zero) continue;
        drifting = true;
        const cplx* other = hats.data() + static_cast<std::size_t>(t) * modes;
        for (std::size_t m = 0; m < modes; ++m) acc[m] += c.hat[m] * other[m];
      }
      if (drifting) ws_->backward(acc.data(), v);
    } else {
      v = drift(s, fields);
      drifting = true;
    }
    if (potentials_.has_one_body()) {
      std::vector<double> vb(one_body_.begin() + static_cast<std::ptrdiff_t>(s * n),
                             one_body_.begin() + static_cast<std::ptrdiff_t>((s + 1) * n));
      auto dv = derivative(vb);
      if (!drifting) std::fill(v.begin(), v.end(), 0.0);
      for (std::size_t i = 0; i < n; ++i) v[i] += dv[i];
      drifting = true;
    }
    if (drifting) {
      for (std::size_t i = 0; i < n; ++i) flux[i] = S[i] * v[i];
      ws_->forward(flux, flux_hat.data());
    } else {
      std::fill(flux_hat.begin(), flux_hat.end(), cplx(0.0));
    }
    // D (-k^2 S + i k (S v)) mode by mode; the Laplacian is applied directly
    // rather than as two first derivatives to keep the roundoff down
    const double d = diffusivity_[static_cast<std::size_t>(s)];
    for (std::size_t m = 0; m < modes; ++m) {
      const double k = ws_->wavenumber[m];
      acc[m] = d * (-k * k * hat[m] + cplx(0.0, k) * flux_hat[m]);
    }
    ws_->backward(acc.data(), std::span<double>(out).subspan(static_cast<std::size_t>(s) * n, n));
  }
}

std::vector<double> PideSystem::transport_apply(int s, const SpectralFields& fields) const {
  std::vector<double> all;
  transport(fields, all);
  const std::size_t n = static_cast<std::size_t>(grid_.voxels());
  return std::vector<double>(all.begin() + static_cast<std::ptrdiff_t>(s * n),
                             all.begin() + static_cast<std::ptrdiff_t>((s + 1) * n));
}

void PideSystem::inverse_diffusion(double dt, std::vector<double>& values) const {
  const std::size_t n = static_cast<std::size_t>(grid_.voxels());
  std::vector<cplx> hat(ws_->modes());
  for (int s = 0; s < 3; ++s) {
    std::span<double> f(values.data() + static_cast<std::size_t>(s) * n, n);
    ws_->forward(f, hat.data());
    const double d = diffusivity_[static_cast<std::size_t>(s)];
    for (std::size_t m = 0; m < hat.size(); ++m) {
      double k = ws_->wavenumber[m];
      hat[m] /= 1.0 + dt * d * k * k;
    }
    ws_->backward(hat.data(), f);
  }
}

void PideSystem::reaction(const SpectralFields& fields, std::vector<double>& out) const {
  const int n = grid_.voxels();
  const std::size_t nn = static_cast<std::size_t>(n);
  out.assign(3 * nn, 0.0);
  if (lambda_ == 0.0 && mu_ == 0.0) return;
  auto A = fields.field(0);
  auto B = fields.field(1);
  auto C = fields.field(2);
  double* dA = out.data();
  double* dB = out.data() + nn;
  double* dC = out.data() + 2 * nn;

  if (free_) {
    std::vector<double> ka(nn), kb(nn), kc(nn);
    convolve(kernel_, A, ka);
    convolve(kernel_, B, kb);
    convolve(kernel_, C, kc);
    for (std::size_t i = 0; i < nn; ++i) {
      double unbind = 0.5 * mu_ * (C[i] * kernel_mass_ + kc[i]);
      dA[i] = -lambda_ * A[i] * kb[i] + unbind;
      dB[i] = -lambda_ * B[i] * ka[i] + unbind;
      dC[i] = 0.5 * lambda_ * (A[i] * kb[i] + B[i] * ka[i]) - mu_ * C[i] * kernel_mass_;
    }
    return;
  }

  auto pa = bath_energy(0, fields);
  auto pb = bath_energy(1, fields);
  auto pc = bath_energy(2, fields);
  // e^{M1_ij} = a1_i b1_j (product at x_i), e^{M2_ij} = a2_i b2_j (product at y_j)
  std::vector<double> a1(nn), b1(nn), a2(nn), b2(nn), ia1(nn), ib1(nn), ia2(nn), ib2(nn), ia1c(nn), ib2c(nn);
  for (std::size_t i = 0; i < nn; ++i) {
    a1[i] = std::exp(pa[i] - pc[i]);
    b1[i] = std::exp(pb[i]);
    a2[i] = std::exp(pa[i]);
    b2[i] = std::exp(pb[i] - pc[i]);
    ia1[i] = 1.0 / a1[i];
    ib1[i] = 1.0 / b1[i];
    ia2[i] = 1.0 / a2[i];
    ib2[i] = 1.0 / b2[i];
    ia1c[i] = ia1[i] * C[i];
    ib2c[i] = ib2[i] * C[i];
  }
  int lo = -band_, hi = band_;
  if (2 * band_ + 1 > n) {
    lo = -((n - 1) / 2);
    hi = n / 2;
  }
  // j-indexed quantities padded by w on both sides so i + o never wraps
  const int w = std::max(-lo, hi);
  const std::size_t np = nn + 2 * static_cast<std::size_t>(w);
  auto pad = [&](const auto& f) {
    std::vector<double> out(np);
    for (std::size_t k = 0; k < np; ++k) out[k] = f[static_cast<std::size_t>(grid_.wrap(static_cast<int>(k) - w))];
    return out;
  };
  const auto b1p = pad(b1), b2p = pad(b2), ib1p = pad(ib1), ib2cp = pad(ib2c), bp = pad(B);
  std::vector<double> r1(nn, 0.0), r2(nn, 0.0), r3(nn, 0.0), r4(nn, 0.0);
  std::vector<double> c1p(np, 0.0), c2p(np, 0.0), c3p(np, 0.0), c4p(np, 0.0);
  const double h = grid_.spacing();
  for (int o = lo; o <= hi; ++o) {
    const double kh = h * kernel_values_[static_cast<std::size_t>(o < 0 ? -o : o)];
    const std::size_t shift = static_cast<std::size_t>(o + w);
    accumulate_offset(nn, kh, a1.data(), a2.data(), A.data(), ia1c.data(), ia2.data(), b1p.data() + shift,
                      b2p.data() + shift, bp.data() + shift, ib1p.data() + shift, ib2cp.data() + shift, r1.data(),
                      r2.data(), r3.data(), r4.data(), c1p.data() + shift, c2p.data() + shift, c3p.data() + shift,
                      c4p.data() + shift);
  }
  std::vector<double> c1(nn, 0.0), c2(nn, 0.0), c3(nn, 0.0), c4(nn, 0.0);
  for (std::size_t k = 0; k < np; ++k) {
    const std::size_t j = static_cast<std::size_t>(grid_.wrap(static_cast<int>(k) - w));
    c1[j] += c1p[k];
    c2[j] += c2p[k];
    c3[j] += c3p[k];
    c4[j] += c4p[k];
  }
  for (std::size_t i = 0; i < nn; ++i) {
    r3[i] *= ia1[i];
    r4[i] *= ia2[i];
    c3[i] *= ib2[i];
    c4[i] *= ib1[i];
  }
  const double hl = 0.5 * lambda_;
  const double hm = 0.5 * mu_;
  for (std::size_t i = 0; i < nn; ++i) {
    dA[i] = -hl * A[i] * (r1[i] + r2[i]) + hm * (C[i] * r3[i] + r4[i]);
    dB[i] = -hl * B[i] * (c1[i] + c2[i]) + hm * (C[i] * c3[i] + c4[i]);
    dC[i] = hl * (A[i] * r1[i] + B[i] * c2[i]) - hm * C[i] * (r3[i] + c3[i]);
  }
}

std::vector<double> PideSystem::reaction_rhs(const SpectralFields& fields) const {
  std::vector<double> out;
  reaction(fields, out);
  return out;
}

}  // namespace pbsrdd::mfm
