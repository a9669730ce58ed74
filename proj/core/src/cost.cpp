#include "interbank/cost.hpp"

#include "interbank/errors.hpp"

namespace interbank {

CostTerms path_cost(std::span<const double> u, std::span<const double> gap, double dt, double q, double eps,
                    double c) {
  if (u.size() != gap.size() || u.size() < 2) {
    throw UnsupportedInput("path_cost needs matching control and gap series with at least two points");
  }
  CostTerms terms;
  const std::size_t last = u.size() - 1;
  for (std::size_t k = 0; k <= last; ++k) {
    const double w = (k == 0 || k == last) ? 0.5 * dt : dt;
    terms.control += w * 0.5 * u[k] * u[k];
    terms.cross += w * (-q * u[k] * gap[k]);
    terms.deviation += w * 0.5 * eps * gap[k] * gap[k];
  }
  terms.terminal = terminal_cost(gap[last], c);
  return terms;
}

}  // namespace interbank
