#pragma once

#include <functional>
#include <map>
#include <utility>
#include <vector>

namespace pbsrdd {

/// A bounded pair potential sampled on r_m = m * spacing, linearly
/// interpolated and identically zero beyond the last sample.
struct TabulatedPair {
  double spacing = 0.0;
  std::vector<double> values;

  double value(double r) const;
  double slope(double r) const;
  double support() const { return spacing * static_cast<double>(values.size() - 1); }
};

using OneBodyPotential = std::function<double(double)>;

/// One-body potentials v_s(x) and pair potentials u_{s,s'}(r), energies in
/// units of k_B T. The default pair form is the harmonic repulsion
///   u_{s,s'}(r) = kappa * max(0, c (r_s + r_s') - r)^2,  c = cutoff_factor.
/// Tabulated overrides replace the harmonic form for individual pairs.
class PotentialTable {
 public:
  PotentialTable() = default;
  PotentialTable(std::vector<double> radii, double kappa, double cutoff_factor = 3.0);

  int species_count() const { return static_cast<int>(radii_.size()); }
  double kappa() const { return kappa_; }
  double cutoff_factor() const { return cutoff_factor_; }
  const std::vector<double>& radii() const { return radii_; }

  void set_tabulated(int s, int t, TabulatedPair pair);
  void set_one_body(int s, OneBodyPotential v);

  /// u_{s,t}(r) for r >= 0.
  double pair(int s, int t, double r) const;
  /// du_{s,t}/dr; zero beyond the cutoff.
  double pair_slope(int s, int t, double r) const;
  /// Smallest r with u_{s,t}(r') = 0 for all r' >= r.
  double cutoff(int s, int t) const;

  double one_body(int s, double x) const;
  bool has_one_body() const;

  /// True when every pair and one-body term vanishes identically.
  bool is_zero() const;

 private:
  const TabulatedPair* tabulated(int s, int t) const;

  std::vector<double> radii_;
  double kappa_ = 0.0;
  double cutoff_factor_ = 3.0;
  std::map<std::pair<int, int>, TabulatedPair> tabulated_;
  std::vector<OneBodyPotential> one_body_;
};

/// Harmonic repulsion kappa * max(0, cutoff - r)^2.
inline double harmonic_pair(double kappa, double cutoff, double r) {
  double overlap = cutoff - r;
  return overlap > 0.0 ? kappa * overlap * overlap : 0.0;
}

/// u_{s,t}(r) from the table; the named entry point for the pair term.
double pair_potential(int s, int t, double r, const PotentialTable& table);

/// Mean-field population scale gamma; pair energies between individual
/// particles are u / gamma.
struct SystemScale {
  double gamma = 1.0;
  double scaled(double pair_energy) const { return pair_energy / gamma; }
};

}  // namespace pbsrdd
