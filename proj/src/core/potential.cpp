#include "pbsrdd/core/potential.hpp"

#include <algorithm>
#include <cmath>

#include "pbsrdd/core/error.hpp"

namespace pbsrdd {

double TabulatedPair::value(double r) const {
  if (values.empty() || r >= support()) return 0.0;
  double u = r / spacing;
  auto m = static_cast<std::size_t>(u);
  double f = u - static_cast<double>(m);
  return values[m] + f * (values[m + 1] - values[m]);
}

double TabulatedPair::slope(double r) const {
  if (values.size() < 2 || r >= support()) return 0.0;
  auto m = static_cast<std::size_t>(r / spacing);
  return (values[m + 1] - values[m]) / spacing;
}

PotentialTable::PotentialTable(std::vector<double> radii, double kappa, double cutoff_factor)
    : radii_(std::move(radii)), kappa_(kappa), cutoff_factor_(cutoff_factor), one_body_(radii_.size()) {
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw ModelError("kappa must be finite and >= 0");
  if (!(cutoff_factor > 0.0)) throw ModelError("cutoff factor must be > 0");
  for (double r : radii_)
    if (!(r >= 0.0)) throw ModelError("radii must be >= 0");
}

void PotentialTable::set_tabulated(int s, int t, TabulatedPair pair) {
  if (!(pair.spacing > 0.0) || pair.values.size() < 2)
    throw ModelError("tabulated pair potential needs spacing > 0 and at least two samples");
  for (double v : pair.values)
    if (!std::isfinite(v)) throw ModelError("tabulated pair potential must be finite");
  if (pair.values.back() != 0.0) throw ModelError("tabulated pair potential must vanish at its last sample");
  tabulated_[{std::min(s, t), std::max(s, t)}] = std::move(pair);
}

void PotentialTable::set_one_body(int s, OneBodyPotential v) {
  one_body_.at(static_cast<std::size_t>(s)) = std::move(v);
}

const TabulatedPair* PotentialTable::tabulated(int s, int t) const {
  if (tabulated_.empty()) return nullptr;
  auto it = tabulated_.find({std::min(s, t), std::max(s, t)});
  return it == tabulated_.end() ? nullptr : &it->second;
}

double PotentialTable::cutoff(int s, int t) const {
  if (const auto* tab = tabulated(s, t)) return tab->support();
  if (kappa_ == 0.0) return 0.0;
  return cutoff_factor_ * (radii_[s] + radii_[t]);
}

double PotentialTable::pair(int s, int t, double r) const {
  if (const auto* tab = tabulated(s, t)) return tab->value(r);
  if (kappa_ == 0.0) return 0.0;
  return harmonic_pair(kappa_, cutoff_factor_ * (radii_[s] + radii_[t]), r);
}

double PotentialTable::pair_slope(int s, int t, double r) const {
  if (const auto* tab = tabulated(s, t)) return tab->slope(r);
  double overlap = cutoff_factor_ * (radii_[s] + radii_[t]) - r;
  return overlap > 0.0 ? -2.0 * kappa_ * overlap : 0.0;
}

double PotentialTable::one_body(int s, double x) const {
  const auto& v = one_body_[static_cast<std::size_t>(s)];
  return v ? v(x) : 0.0;
}

bool PotentialTable::has_one_body() const {
  return std::any_of(one_body_.begin(), one_body_.end(), [](const auto& v) { return static_cast<bool>(v); });
}

bool PotentialTable::is_zero() const {
  if (has_one_body()) return false;
  for (const auto& [key, tab] : tabulated_)
    if (std::any_of(tab.values.begin(), tab.values.end(), [](double v) { return v != 0.0; })) return false;
  // harmonic pairs only matter for species pairs without an override
  if (kappa_ == 0.0) return true;
  const int n = species_count();
  for (int s = 0; s < n; ++s)
    for (int t = s; t < n; ++t)
      if (!tabulated(s, t) && cutoff(s, t) > 0.0) return false;
  return true;
}

double pair_potential(int s, int t, double r, const PotentialTable& table) { return table.pair(s, t, r); }

}  // namespace pbsrdd
