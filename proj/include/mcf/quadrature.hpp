#pragma once

#include <functional>
#include <vector>

namespace mcf {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  double integrate(const std::function<double(double)>& f) const;
};

/// Gauss-Legendre rule of the given order on [-1, 1].
QuadratureRule gauss_legendre(int order);

/// Composite Gauss-Legendre on [a, b] with `panels` equal panels.
QuadratureRule composite_gauss_legendre(double a, double b, int panels,
                                        int order = 16);

}  // namespace mcf
