#include "pbsrdd/oracle/dense_rhs.hpp"

#include <array>

#include "pbsrdd/core/acceptance.hpp"
#include "pbsrdd/core/error.hpp"
#include "pbsrdd/core/kernel.hpp"

namespace pbsrdd::oracle {

std::vector<double> dense_reaction_rhs(const mfm::SpectralFields& fields, const ReactionNetwork& network,
                                       const PotentialTable& table) {
  const Mesh& grid = fields.grid;
  const int n = grid.voxels();
  const double h = grid.spacing();
  FieldBath bath{grid, fields.values, table};
  std::vector<double> out(fields.values.size(), 0.0);
  auto add = [&](int s, int i, double v) { out[static_cast<std::size_t>(s) * n + i] += v; };

  for (const auto& rx : network.reactions()) {
    if (!rx.kernel) throw ModelError("dense quadrature needs a reaction kernel");
    if (rx.substrates.size() == 2 && rx.products.size() == 1) {
      const int s1 = rx.substrates[0], s2 = rx.substrates[1], p = rx.products[0];
      if (s1 == s2) throw ModelError("dense quadrature handles distinct substrates only");
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const double x = grid.node(i), y = grid.node(j);
          const double density = rx.rate * kernel_eval(x, y, *rx.kernel) * fields.at(s1, i) * fields.at(s2, j) * h;
          if (density == 0.0) continue;
          const std::array<Placed, 2> subs{Placed{s1, x}, Placed{s2, y}};
          const std::array<Placed, 1> at_x{Placed{p, x}}, at_y{Placed{p, y}};
          const double px = 0.5 * acceptance_probability_meanfield(rx, subs, at_x, bath);
          const double py = 0.5 * acceptance_probability_meanfield(rx, subs, at_y, bath);
          // density already carries one factor h; the second integral adds the other
          add(s1, i, -density * (px + py));
          add(s2, j, -density * (px + py));
          add(p, i, density * px);
          add(p, j, density * py);
        }
    } else if (rx.substrates.size() == 1 && rx.products.size() == 2) {
      const int c = rx.substrates[0], p1 = rx.products[0], p2 = rx.products[1];
      for (int k = 0; k < n; ++k)
        for (int w = 0; w < n; ++w) {
          const double z = grid.node(k), y = grid.node(w);
          const double density = rx.rate * fields.at(c, k) * kernel_eval(z, y, *rx.kernel) * h;
          if (density == 0.0) continue;
          const std::array<Placed, 1> subs{Placed{c, z}};
          const std::array<Placed, 2> first_here{Placed{p1, z}, Placed{p2, y}};
          const std::array<Placed, 2> second_here{Placed{p1, y}, Placed{p2, z}};
          const double a = 0.5 * acceptance_probability_meanfield(rx, subs, first_here, bath);
          const double b = 0.5 * acceptance_probability_meanfield(rx, subs, second_here, bath);
          add(c, k, -density * (a + b));
          add(p1, k, density * a);
          add(p2, w, density * a);
          add(p1, w, density * b);
          add(p2, k, density * b);
        }
    } else {
      throw ModelError("dense quadrature supports 2 -> 1 and 1 -> 2 channels");
    }
  }
  return out;
}

}  // namespace pbsrdd::oracle
