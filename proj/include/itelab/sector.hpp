#pragma once

// Complex-lambda scans of the per-mode differences d_k: sector minima of
// |d_k| on a log-polar grid, sign checks on the negative real axis, and the
// weighted lower bounds along rays.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

#include "itelab/dtn.hpp"
#include "itelab/error.hpp"
#include "itelab/ite.hpp"
#include "itelab/medium.hpp"
#include "itelab/mode.hpp"

namespace itelab {

using cplx = std::complex<double>;

struct Sector {
  double theta_min = std::numbers::pi / 6;
  double theta_max = 11 * std::numbers::pi / 6;
  double r_min = 1.0;
  double r_max = 100.0;
};

struct SectorNode {
  cplx lambda{};
  double min_abs = 0.0;  // min_k |d_k(lambda)|
  int argmin_k = 0;
};

struct SectorScan {
  double minimum = std::numeric_limits<double>::infinity();
  cplx argmin{};
  int argmin_k = 0;
  int k_max = 0;
  std::vector<SectorNode> nodes;
  std::vector<cplx> failed;  // nodes excluded after an integration failure
};

/// Modes scanned for |lambda| <= r_max.
inline int sector_mode_cutoff(const RadialMedium& m, double r_max) {
  return mode_cutoff(m, r_max) + truncation_margin;
}

/// min over k <= k_max and over the grid of |d_k(lambda)|, with d_k from the
/// complex radial integrator. `n_theta` x `n_radius` nodes, radii spaced
/// geometrically.
inline SectorScan sector_scan(const RadialMedium& m, const Sector& sec, int n_theta, int n_radius,
                              int k_max = -1) {
  SectorScan out;
  out.k_max = k_max >= 0 ? k_max : sector_mode_cutoff(m, sec.r_max);
  DtnOptions opt;
  opt.preferred = Backend::ode;
  for (int i = 0; i < n_theta; ++i) {
    const double th =
        n_theta == 1 ? sec.theta_min
                     : sec.theta_min + (sec.theta_max - sec.theta_min) * i / (n_theta - 1);
    for (int j = 0; j < n_radius; ++j) {
      const double rad = n_radius == 1
                             ? sec.r_min
                             : sec.r_min * std::pow(sec.r_max / sec.r_min, double(j) / (n_radius - 1));
      const cplx lam = std::polar(rad, th);
      SectorNode node;
      node.lambda = lam;
      node.min_abs = std::numeric_limits<double>::infinity();
      try {
        for (int k = 0; k <= out.k_max; ++k) {
          const double v = std::abs(dtn_diff<cplx>(m, {m.dimension(), k}, lam, opt).value);
          if (v < node.min_abs) {
            node.min_abs = v;
            node.argmin_k = k;
          }
        }
      } catch (const Error& e) {
        if (e.code() != ErrorCode::integration_failure && e.code() != ErrorCode::pole_hit) throw;
        out.failed.push_back(lam);
        continue;
      }
      out.nodes.push_back(node);
      if (node.min_abs < out.minimum) {
        out.minimum = node.min_abs;
        out.argmin = lam;
        out.argmin_k = node.argmin_k;
      }
    }
  }
  return out;
}

struct AxisScan {
  int sign_changes = 0;  // summed over modes
  double min_abs = std::numeric_limits<double>::infinity();
  int k_max = 0;
};

/// Sign changes of each d_k along lambda in [-r_max, -r_min] on a geometric
/// grid.
inline AxisScan negative_axis_scan(const RadialMedium& m, double r_min, double r_max, int points,
                                   int k_max = -1, const DtnOptions& opt = {}) {
  AxisScan out;
  out.k_max = k_max >= 0 ? k_max : sector_mode_cutoff(m, r_max);
  for (int k = 0; k <= out.k_max; ++k) {
    int prev = 0;
    for (int j = 0; j < points; ++j) {
      const double rad = r_min * std::pow(r_max / r_min, double(j) / std::max(1, points - 1));
      const double v = dtn_diff<double>(m, {m.dimension(), k}, -rad, opt).value;
      out.min_abs = std::min(out.min_abs, std::abs(v));
      const int s = v > 0 ? 1 : (v < 0 ? -1 : 0);
      if (prev != 0 && s != 0 && s != prev) ++out.sign_changes;
      if (s != 0) prev = s;
    }
  }
  return out;
}

/// Boundary-class weight in the lower bound: sqrt(k^2/R^2 + |lambda|) for
/// B1, k^2/R^2 + |lambda| for B2.
inline double ellipticity_weight(const BoundaryInfo& info, int k, double R, double abs_lambda) {
  const double t = double(k) * k / (R * R) + abs_lambda;
  return info.cls == BoundaryClass::b2 ? t : std::sqrt(t);
}

struct EllipticityPoint {
  double abs_lambda = 0.0;
  double c = 0.0;  // min_k |d_k| * weight / |lambda|
  int argmin_k = 0;
  bool degenerate = false;
};

/// Default mode range for a ray sample: well past the turning point
/// k ~ R sqrt(max n |lambda|).
inline int ellipticity_mode_cutoff(const RadialMedium& m, double abs_lambda) {
  const double nmax = std::max(1.0, m.max_n());
  return static_cast<int>(std::ceil(3.0 * m.outer_radius() * std::sqrt(nmax * abs_lambda))) + 10;
}

/// c(lambda) along the ray arg lambda = theta.
inline std::vector<EllipticityPoint> param_ellipticity_check(const RadialMedium& m, double theta,
                                                             const std::vector<double>& radii,
                                                             int k_max = -1,
                                                             const DtnOptions& opt = {}) {
  const auto info = validate(m);
  const double R = m.outer_radius();
  std::vector<EllipticityPoint> out;
  for (double rad : radii) {
    const int km = k_max >= 0 ? k_max : ellipticity_mode_cutoff(m, rad);
    const cplx lam = std::polar(rad, theta);
    const bool real_axis = std::abs(lam.imag()) <= 1e-14 * rad;
    EllipticityPoint p;
    p.abs_lambda = rad;
    p.c = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= km; ++k) {
      const ModeIndex mode{m.dimension(), k};
      const double v = real_axis ? std::abs(dtn_diff<double>(m, mode, lam.real(), opt).value)
                                 : std::abs(dtn_diff<cplx>(m, mode, lam, opt).value);
      const double c = v * ellipticity_weight(info, k, R, rad) / rad;
      if (c < p.c) {
        p.c = c;
        p.argmin_k = k;
      }
    }
    p.degenerate = !(p.c > 0.0);
    out.push_back(p);
  }
  return out;
}

/// Symbol prediction of c(lambda) for class B1, from
/// p1 = (1 - n) lambda / (sqrt(k^2/R^2 - lambda) + sqrt(k^2/R^2 - n lambda)).
inline double predicted_ellipticity(const RadialMedium& m, cplx lambda, int k_max) {
  const auto info = validate(m);
  const double R = m.outer_radius();
  const double nR = m.n(R);
  const double rad = std::abs(lambda);
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= k_max; ++k) {
    const double xi2 = ModeIndex{m.dimension(), k}.laplace_beltrami(R);
    cplx a = std::sqrt(cplx(xi2) - lambda), b = std::sqrt(cplx(xi2) - nR * lambda);
    if (a.real() < 0) a = -a;
    if (b.real() < 0) b = -b;
    const cplx p1 = (1.0 - nR) * lambda / (a + b);
    best = std::min(best, std::abs(p1) * ellipticity_weight(info, k, R, rad) / rad);
  }
  return best;
}

}  // namespace itelab
