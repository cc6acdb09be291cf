#pragma once

#include <complex>
#include <memory>
#include <span>
#include <vector>

#include "pbsrdd/core/network.hpp"
#include "pbsrdd/core/potential.hpp"
#include "pbsrdd/mfm/fields.hpp"

namespace pbsrdd::mfm {

/// Spatially discrete mean-field operators for A + B <-> C: Fourier
/// differentiation, trapezoidal convolutions, and the reaction integrals with
/// mean-field acceptance factors.
class PideSystem {
 public:
  PideSystem(Mesh grid, ReactionNetwork network, PotentialTable potentials,
             ConvolutionPath path = ConvolutionPath::fft);
  ~PideSystem();
  PideSystem(PideSystem&&) noexcept;
  PideSystem& operator=(PideSystem&&) noexcept;

  const Mesh& grid() const { return grid_; }
  const ReactionNetwork& network() const { return network_; }
  const PotentialTable& potentials() const { return potentials_; }
  ConvolutionPath path() const { return path_; }
  int species() const { return 3; }

  /// D_s d/dx (dS/dx + S v_s) for every species, v_s = sum_t (du_{s,t}/dx * S_t).
  void transport(const SpectralFields& fields, std::vector<double>& out) const;
  std::vector<double> transport_apply(int s, const SpectralFields& fields) const;

  /// v_s: the drift convolution sum_t h sum_j u'_{s,t}(x_i - x_j) S_t(x_j).
  std::vector<double> drift(int s, const SpectralFields& fields) const;

  /// P_s = v_s(x) + sum_t (u_{s,t} * S_t)(x): one-body plus bath energy.
  std::vector<double> bath_energy(int s, const SpectralFields& fields) const;

  /// Reaction terms of the three equations, species-major.
  void reaction(const SpectralFields& fields, std::vector<double>& out) const;
  std::vector<double> reaction_rhs(const SpectralFields& fields) const;

  /// Spectral first derivative; the Nyquist mode is dropped.
  std::vector<double> derivative(std::span<const double> f) const;

  /// Applies (1 + dt D_s k^2)^{-1} per species in place.
  void inverse_diffusion(double dt, std::vector<double>& values) const;

  /// Offsets beyond which the reaction kernel is negligible.
  int kernel_band() const { return band_; }

 private:
  struct Workspace;

  /// First row c of a symmetric-or-odd circulant, (c * f)_i = sum_j c[(i - j) mod N] f_j,
  /// with its discrete Fourier transform.
  struct Circulant {
    std::vector<double> row;
    std::vector<std::complex<double>> hat;
    bool zero = true;
  };

  Circulant make_circulant(std::vector<double> row) const;
  void convolve(const Circulant& c, std::span<const double> f, std::span<double> out) const;

  Mesh grid_;
  ReactionNetwork network_;
  PotentialTable potentials_;
  ConvolutionPath path_;
  double lambda_ = 0.0;
  double mu_ = 0.0;
  std::vector<double> diffusivity_;
  Circulant kernel_;             // h K(m h)
  std::vector<Circulant> pair_;  // h u_{s,t}(m h), index s * 3 + t
  std::vector<Circulant> slope_; // h u'_{s,t}(m h) signed by direction, index s * 3 + t
  double kernel_mass_ = 0.0;     // sum_m h K(m h)
  std::vector<double> one_body_;               // v_s(x_i), species-major
  std::vector<double> kernel_values_;          // K(d h) for d = 0..band
  int band_ = 0;
  bool free_ = false;  // no potentials at all: every acceptance factor is one
  std::unique_ptr<Workspace> ws_;
};

}  // namespace pbsrdd::mfm
