#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mcf/diagnostics.hpp"

namespace mcf {

namespace {

// Generating curve in the (p, q) half-plane with outward normals and mean
// curvatures of the hypersurface. A mirrored coordinate is one swept by a
// rotation orbit; Z along the orbit is a Mobius function of the cosine of
// the angle, so its extremes sit at the identity and the reflection.
struct Curve {
  std::vector<double> p, q, np, nq, H;
  bool mirror_p = false;
  bool mirror_q = true;
};

NoncollapseReport scan(const Curve& c) {
  const size_t N = c.p.size();
  NoncollapseReport rep;
  rep.H = c.H;
  rep.z_sup.assign(N, -INFINITY);
  rep.z_inf.assign(N, INFINITY);
  for (size_t i = 0; i < N; ++i) {
    if (!(c.H[i] > 0.0)) throw std::domain_error("profile is not strictly mean convex");
  }
  const int sp_count = c.mirror_p ? 2 : 1;
  const int sq_count = c.mirror_q ? 2 : 1;
  for (size_t i = 0; i < N; ++i) {
    double zmax = -INFINITY, zmin = INFINITY;
    for (size_t j = 0; j < N; ++j) {
      for (int a = 0; a < sp_count; ++a) {
        for (int b = 0; b < sq_count; ++b) {
          const double pj = a ? -c.p[j] : c.p[j];
          const double qj = b ? -c.q[j] : c.q[j];
          const double dp = c.p[i] - pj, dq = c.q[i] - qj;
          const double r2 = dp * dp + dq * dq;
          if (r2 < 1e-24) continue;
          const double z = 2.0 * (dp * c.np[i] + dq * c.nq[i]) / r2;
          zmax = std::max(zmax, z);
          zmin = std::min(zmin, z);
        }
      }
    }
    rep.z_sup[i] = zmax;
    rep.z_inf[i] = zmin;
  }
  rep.alpha = INFINITY;
  for (size_t i = 0; i < N; ++i) {
    const double a = c.H[i] / std::max(rep.z_sup[i], -rep.z_inf[i]);
    if (a < rep.alpha) {
      rep.alpha = a;
      rep.argmin = static_cast<int>(i);
    }
  }
  return rep;
}

}  // namespace

NoncollapseReport noncollapse_alpha(const PolarProfile& closed) {
  const int N = static_cast<int>(closed.R.size());
  if (N < 5) throw std::invalid_argument("polar profile needs at least 5 nodes");
  const double h = closed.h();
  const int n = closed.n;
  const auto& R = closed.R;
  Curve c;
  c.mirror_q = n >= 2;
  for (int i = 0; i < N; ++i) {
    const double phi = i * h;
    const bool pole = i == 0 || i == N - 1;
    double d1 = 0.0, d2;
    if (i == 0) {
      d2 = 2 * (R[1] - R[0]) / (h * h);
    } else if (i == N - 1) {
      d2 = 2 * (R[N - 2] - R[N - 1]) / (h * h);
    } else {
      d1 = (R[i + 1] - R[i - 1]) / (2 * h);
      d2 = (R[i + 1] - 2 * R[i] + R[i - 1]) / (h * h);
    }
    const double r = R[i];
    const double S = std::sqrt(r * r + d1 * d1);
    const double sn = pole ? 0.0 : std::sin(phi), cs = pole ? (i == 0 ? 1.0 : -1.0) : std::cos(phi);
    c.p.push_back(r * cs);
    c.q.push_back(r * sn);
    c.np.push_back((d1 * sn + r * cs) / S);
    c.nq.push_back((r * sn - d1 * cs) / S);
    const double kappa = (r * r + 2 * d1 * d1 - r * d2) / (S * S * S);
    // rotation orbit curvature; cot(phi) R' -> R'' at the poles
    const double cot_term = pole ? d2 : d1 * cs / sn;
    const double krot = (1.0 - cot_term / r) / S;
    c.H.push_back(kappa + (n - 1) * krot);
  }
  return scan(c);
}

NoncollapseReport noncollapse_alpha(const RadialProfile& tube) {
  const auto& g = tube.grid;
  const int N = g.points;
  const double h = g.h();
  const auto H = tube_mean_curvature(tube);
  Curve c;
  c.mirror_p = g.kind == AxisKind::Radial;
  for (int i = 0; i < N; ++i) {
    double d1;
    if (i == 0) {
      d1 = g.kind == AxisKind::Radial ? 0.0 : (-3 * tube.v[0] + 4 * tube.v[1] - tube.v[2]) / (2 * h);
    } else if (i == N - 1) {
      d1 = (3 * tube.v[i] - 4 * tube.v[i - 1] + tube.v[i - 2]) / (2 * h);
    } else {
      d1 = (tube.v[i + 1] - tube.v[i - 1]) / (2 * h);
    }
    const double s = std::sqrt(1.0 + d1 * d1);
    c.p.push_back(g.coord(i));
    c.q.push_back(tube.v[i]);
    c.np.push_back(-d1 / s);
    c.nq.push_back(1.0 / s);
    c.H.push_back(H[i]);
  }
  return scan(c);
}

}  // namespace mcf
