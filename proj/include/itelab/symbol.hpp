#pragma once

// Large-|xi| predictions for the D-to-N values and their difference, with
// helpers that compare them to computed per-mode data.

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "itelab/dtn.hpp"
#include "itelab/error.hpp"
#include "itelab/medium.hpp"
#include "itelab/mode.hpp"

namespace itelab {

/// Tangential frequency used for symbol comparisons: k/R on the circle,
/// sqrt(k(k+1))/R on the sphere.
inline double symbol_frequency(const ModeIndex& mode, double R) {
  return std::sqrt(mode.laplace_beltrami(R));
}

/// sqrt(|xi|^2 - n(R) lambda) on the branch with positive real part.
inline std::complex<double> expected_f0(const RadialMedium& m, double xi,
                                        std::complex<double> lambda) {
  const std::complex<double> arg = xi * xi - m.n(m.outer_radius()) * lambda;
  if (arg == 0.0)
    throw Error(ErrorCode::on_branch_singularity, "|xi|^2 = n(R) lambda");
  auto root = std::sqrt(arg);
  if (root.real() < 0.0) root = -root;
  return root;
}

/// Leading term of d = f_n - f: (1 - n(R)) lambda / (2|xi|) for class B1,
/// n'(R) lambda / (4|xi|^2) for class B2, 0 in the degenerate test case.
inline std::complex<double> expected_diff_symbol(const RadialMedium& m, double xi,
                                                 std::complex<double> lambda) {
  const auto info = validate(m);
  const double R = m.outer_radius();
  switch (info.cls) {
    case BoundaryClass::b1: return (1.0 - m.n(R)) * lambda / (2.0 * xi);
    case BoundaryClass::b2: return 0.25 * m.dn(R) * lambda / (xi * xi);
    case BoundaryClass::degenerate: return 0.0;
  }
  return 0.0;
}

struct SymbolRatio {
  int k = 0;
  double d = 0.0;
  double expected = 0.0;
  double ratio = 0.0;
};

/// d_k(lambda) / expected_diff_symbol(|xi| = symbol_frequency(k), lambda).
inline std::vector<SymbolRatio> asymptotic_limit_check(const RadialMedium& m, double lambda,
                                                       const std::vector<int>& ks,
                                                       const DtnOptions& opt = {}) {
  std::vector<SymbolRatio> out;
  for (int k : ks) {
    const ModeIndex mode{m.dimension(), k};
    SymbolRatio r;
    r.k = k;
    r.d = dtn_diff<double>(m, mode, lambda, opt).value;
    r.expected = expected_diff_symbol(m, symbol_frequency(mode, m.outer_radius()), lambda).real();
    r.ratio = r.d / r.expected;
    out.push_back(r);
  }
  return out;
}

struct OrderFit {
  double slope = 0.0;
  double intercept = 0.0;
  double max_residual = 0.0;  // largest |log|d_k| - fit|
};

/// Least-squares slope of log|d_k| against log k.
inline OrderFit order_fit(const RadialMedium& m, double lambda, const std::vector<int>& ks,
                          const DtnOptions& opt = {}) {
  std::vector<double> x, y;
  for (int k : ks) {
    const ModeIndex mode{m.dimension(), k};
    const auto d = dtn_diff<double>(m, mode, lambda, opt);
    const double scale = 1.0 + std::abs(d.free.value);
    if (k <= 0 || !(std::abs(d.value) > 1e-15 * scale))
      throw Error(ErrorCode::degenerate_fit, "d_k vanishes at k=" + std::to_string(k));
    x.push_back(std::log(double(k)));
    y.push_back(std::log(std::abs(d.value)));
  }
  if (x.size() < 2) throw Error(ErrorCode::degenerate_fit, "need at least two modes");
  const double nn = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = nn * sxx - sx * sx;
  if (den == 0.0) throw Error(ErrorCode::degenerate_fit, "modes must differ");
  OrderFit f;
  f.slope = (nn * sxy - sx * sy) / den;
  f.intercept = (sy - f.slope * sx) / nn;
  for (std::size_t i = 0; i < x.size(); ++i)
    f.max_residual = std::max(f.max_residual, std::abs(y[i] - f.intercept - f.slope * x[i]));
  return f;
}

}  // namespace itelab
