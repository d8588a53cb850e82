#pragma once

// Per-mode Dirichlet spectra of the free and refracted problems, which are
// the poles of the corresponding D-to-N values. Counting is by Sturm
// oscillation: the number of eigenvalues <= lambda in a mode equals the
// number of interior zeros of the radial initial-value solution.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "itelab/dtn.hpp"
#include "itelab/error.hpp"
#include "itelab/medium.hpp"
#include "itelab/mode.hpp"
#include "itelab/radial_ode.hpp"

namespace itelab {

inline constexpr int truncation_margin = 5;

/// Number of per-mode Dirichlet eigenvalues <= lambda.
inline int dirichlet_count(const RadialMedium& m, Equation which, const ModeIndex& mode,
                           double lambda, const ode::Options& opt = {}) {
  if (lambda <= 0.0) return 0;
  const auto s = ode::solve_single<double>(m, mode, lambda, which == Equation::refracted, opt);
  // Newton distance to the nearest eigenvalue, u^2 f / m. Inside this the sign
  // of u(R) is within integration noise.
  const double R = m.outer_radius();
  const double dist = std::abs(s.u * (s.du + mode.k / R * s.u) / s.m);
  if (s.u == 0.0 || dist <= 100.0 * opt.rtol * std::max(1.0, lambda))
    throw Error(ErrorCode::on_eigenvalue,
                "lambda is a Dirichlet eigenvalue of mode k=" + std::to_string(mode.k));
  return s.zeros;
}

/// Mode sum of multiplicity x dirichlet_count, stopped after
/// `truncation_margin` consecutive empty modes (the per-mode ground
/// eigenvalue increases with k).
inline long count_dirichlet(const RadialMedium& m, Equation which, double lambda,
                            const ode::Options& opt = {}) {
  long total = 0;
  int empty = 0;
  for (int k = 0; empty < truncation_margin; ++k) {
    const ModeIndex mode{m.dimension(), k};
    const int c = dirichlet_count(m, which, mode, lambda, opt);
    total += static_cast<long>(c) * mode.multiplicity();
    empty = c == 0 ? empty + 1 : 0;
  }
  return total;
}

inline long count_N(const RadialMedium& m, double lambda, const ode::Options& opt = {}) {
  return count_dirichlet(m, Equation::free, lambda, opt);
}

inline long count_Nn(const RadialMedium& m, double lambda, const ode::Options& opt = {}) {
  return count_dirichlet(m, Equation::refracted, lambda, opt);
}

struct Pole {
  double lambda = 0.0;
  Equation which = Equation::free;
  ModeIndex mode{};
  double residue_below = 0.0;  // lim (lambda - lambda0) f(lambda) from the left
  double residue_above = 0.0;  // same from the right
  int residue_sign = 0;        // +1 when both limits are positive
};

namespace detail {

// Count that treats an exact hit of an eigenvalue as "just above" it.
inline int count_or_hit(const RadialMedium& m, Equation which, const ModeIndex& mode,
                        double lambda, bool& hit, const ode::Options& opt) {
  hit = false;
  try {
    return dirichlet_count(m, which, mode, lambda, opt);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::on_eigenvalue) throw;
    hit = true;
    return -1;
  }
}

// Splits (lo, hi] with count(lo) = clo, count(hi) = chi into single-pole
// brackets, each bisected down to `rel_tol`.
inline void isolate(const RadialMedium& m, Equation which, const ModeIndex& mode, double lo,
                    int clo, double hi, int chi, double rel_tol, const ode::Options& opt,
                    std::vector<double>& out) {
  if (chi == clo) return;
  while (true) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= rel_tol * std::abs(hi) || mid <= lo || mid >= hi) {
      // chi - clo poles indistinguishable at this resolution; in a
      // Sturm-Liouville mode they are simple, so this only happens at
      // tolerance 0.
      for (int i = clo; i < chi; ++i) out.push_back(mid);
      return;
    }
    bool hit = false;
    const int cm = count_or_hit(m, which, mode, mid, hit, opt);
    if (hit) {
      if (chi - clo == 1) {
        out.push_back(mid);
        return;
      }
      // Nudge off the eigenvalue and keep splitting.
      const double eps = rel_tol * std::abs(mid);
      bool h2 = false;
      const int below = count_or_hit(m, which, mode, mid - eps, h2, opt);
      isolate(m, which, mode, lo, clo, mid - eps, below, rel_tol, opt, out);
      out.push_back(mid);
      const int above = below + 1;
      isolate(m, which, mode, mid + eps, above, hi, chi, rel_tol, opt, out);
      return;
    }
    if (cm == clo) {
      lo = mid;
    } else if (cm == chi) {
      hi = mid;
    } else {
      isolate(m, which, mode, lo, clo, mid, cm, rel_tol, opt, out);
      isolate(m, which, mode, mid, cm, hi, chi, rel_tol, opt, out);
      return;
    }
    if (chi - clo == 1 && hi - lo <= rel_tol * std::abs(hi)) {
      out.push_back(0.5 * (lo + hi));
      return;
    }
  }
}

// Cubic through four samples; derivative at x.
inline double lagrange_derivative(const double* xs, const double* ys, double x) {
  double total = 0.0;
  for (int i = 0; i < 4; ++i) {
    double denom = 1.0;
    for (int j = 0; j < 4; ++j)
      if (j != i) denom *= xs[i] - xs[j];
    double num = 0.0;
    for (int j = 0; j < 4; ++j) {
      if (j == i) continue;
      double prod = 1.0;
      for (int l = 0; l < 4; ++l)
        if (l != i && l != j) prod *= x - xs[l];
      num += prod;
    }
    total += ys[i] * num / denom;
  }
  return total;
}

}  // namespace detail

/// One-sided limit of (lambda - lambda0) f(lambda) at a pole. 1/f is
/// analytic through the pole, so a cubic fit of 1/f on samples at
/// lambda0 + side*{1,2,3,4}*h gives the limit as 1/(d/dlambda (1/f))(lambda0).
inline double residue_limit(const RadialMedium& m, Equation which, const ModeIndex& mode,
                            double lambda0, int side, double h, const DtnOptions& opt = {}) {
  double xs[4], ys[4];
  for (int j = 0; j < 4; ++j) {
    xs[j] = lambda0 + side * (j + 1) * h;
    ys[j] = 1.0 / dtn_value(m, mode, xs[j], which, opt).value;
  }
  return 1.0 / detail::lagrange_derivative(xs, ys, lambda0);
}

/// Per-mode Dirichlet eigenvalues in [a, b] refined to `rel_tol` by
/// bisection on the Sturm count, each with its two one-sided residue limits.
inline std::vector<Pole> dirichlet_poles(const RadialMedium& m, Equation which,
                                         const ModeIndex& mode, double a, double b,
                                         bool with_residues = true, double rel_tol = 1e-10,
                                         const DtnOptions& opt = {}) {
  std::vector<Pole> out;
  if (!(b > a)) return out;
  a = std::max(a, 0.0);
  bool hit_a = false, hit_b = false;
  int ca = detail::count_or_hit(m, which, mode, a, hit_a, opt.ode);
  double lo = a;
  if (hit_a) {
    lo = a * (1.0 - rel_tol);
    ca = detail::count_or_hit(m, which, mode, lo, hit_a, opt.ode);
  }
  double hi = b;
  int cb = detail::count_or_hit(m, which, mode, b, hit_b, opt.ode);
  if (hit_b) {
    hi = b * (1.0 + rel_tol);
    cb = detail::count_or_hit(m, which, mode, hi, hit_b, opt.ode);
  }
  std::vector<double> found;
  detail::isolate(m, which, mode, lo, ca, hi, cb, rel_tol, opt.ode, found);
  std::sort(found.begin(), found.end());
  for (std::size_t i = 0; i < found.size(); ++i) {
    Pole p;
    p.lambda = found[i];
    p.which = which;
    p.mode = mode;
    if (with_residues) {
      double gap = p.lambda;
      if (i > 0) gap = std::min(gap, p.lambda - found[i - 1]);
      if (i + 1 < found.size()) gap = std::min(gap, found[i + 1] - p.lambda);
      const double h = 1e-4 * gap;
      p.residue_below = residue_limit(m, which, mode, p.lambda, -1, h, opt);
      p.residue_above = residue_limit(m, which, mode, p.lambda, +1, h, opt);
      p.residue_sign = (p.residue_below > 0 && p.residue_above > 0)   ? 1
                       : (p.residue_below < 0 && p.residue_above < 0) ? -1
                                                                      : 0;
    }
    out.push_back(p);
  }
  return out;
}

/// Smallest per-mode Dirichlet eigenvalue.
inline double ground_eigenvalue(const RadialMedium& m, Equation which, const ModeIndex& mode,
                                double rel_tol = 1e-10, const ode::Options& opt = {}) {
  double hi = 1.0;
  bool hit = false;
  while (detail::count_or_hit(m, which, mode, hi, hit, opt) == 0 && !hit) hi *= 2.0;
  if (hit) return hi;
  std::vector<double> found;
  detail::isolate(m, which, mode, 0.0, 0, hi, detail::count_or_hit(m, which, mode, hi, hit, opt),
                  rel_tol, opt, found);
  return *std::min_element(found.begin(), found.end());
}

}  // namespace itelab
