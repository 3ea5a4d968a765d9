#include "mcf/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mcf {

double QuadratureRule::integrate(const std::function<double(double)>& f) const {
  double s = 0.0;
  for (size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(nodes[i]);
  return s;
}

QuadratureRule gauss_legendre(int order) {
  if (order < 1) throw std::invalid_argument("quadrature order must be positive");
  QuadratureRule q;
  q.nodes.resize(order);
  q.weights.resize(order);
  for (int i = 0; i < (order + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= order; ++j) {
        const double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    q.nodes[i] = -x;
    q.nodes[order - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    q.weights[i] = w;
    q.weights[order - 1 - i] = w;
  }
  return q;
}

QuadratureRule composite_gauss_legendre(double a, double b, int panels,
                                        int order) {
  const QuadratureRule base = gauss_legendre(order);
  QuadratureRule q;
  const double width = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * width;
    for (size_t i = 0; i < base.nodes.size(); ++i) {
      q.nodes.push_back(mid + 0.5 * width * base.nodes[i]);
      q.weights.push_back(0.5 * width * base.weights[i]);
    }
  }
  return q;
}

}  // namespace mcf
