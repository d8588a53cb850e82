#pragma once

// Radial initial-value backend for the per-mode Dirichlet-to-Neumann maps.
//
// Solutions are carried in the scaled form w(r) = r^k u(r), so that
//   u'' + (2k+d-1)/r u' + lambda c(r) u = 0,
// with c = 1 for the free equation and c = n for the refracted one. Next to
// (u, u') each solution carries
//   m(r) = (R/r)^(2k+d) int n (s/R)^(2k+d-1) u^2 ds      (Green identity, d f/d lambda)
// and a joint integration carries the cross Wronskian
//   x(r) = (R/r)^(2k+d) r^(d-1) (w_n' w - w_n w') / R^(2k+d-1)
// so that f_n - f = x(R) / (u_n(R) u(R)) without cancellation. Both quadratures are smooth
// (quasi-stationary) in the scaled form, so the stiff near-origin step size
// limit of the explicit integrator does not spoil them.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "itelab/error.hpp"
#include "itelab/medium.hpp"
#include "itelab/mode.hpp"

namespace itelab::ode {

struct Options {
  double rtol = 1e-11;
  double start_fraction = 1e-6;  // series start r = start_fraction * R
  long max_steps = 4'000'000;
};

template <class T>
double mag(const T& v) {
  return std::abs(v);
}

/// Dormand-Prince 5(4) with FSAL and standard step-size control. `rhs(r, y,
/// dy)` evaluates the derivative, `weights(y0, y1, w)` returns per-component
/// error scales, `observe(r, y)` runs after each accepted step and may
/// rescale y. Returns the number of accepted steps.
template <class T, std::size_t N, class Rhs, class Weights, class Observe>
long dormand_prince(Rhs&& rhs, std::array<T, N>& y, double a, double b, double h0,
                    double rtol, long max_steps, Weights&& weights, Observe&& observe) {
  using S = std::array<T, N>;
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                   a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                   b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  if (!(b > a)) return 0;
  S k1, k2, k3, k4, k5, k6, k7, tmp, y1, w;
  double r = a;
  double h = std::min(h0, b - a);
  rhs(r, y, k1);
  long steps = 0, attempts = 0;
  while (r < b) {
    if (++attempts > max_steps)
      throw Error(ErrorCode::integration_failure, "step budget exhausted");
    bool last = false;
    if (r + h >= b || r + 1.01 * h >= b) {
      h = b - r;
      last = true;
    }
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + T(h * a21) * k1[i];
    rhs(r + c2 * h, tmp, k2);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + T(h) * (T(a31) * k1[i] + T(a32) * k2[i]);
    rhs(r + c3 * h, tmp, k3);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + T(h) * (T(a41) * k1[i] + T(a42) * k2[i] + T(a43) * k3[i]);
    rhs(r + c4 * h, tmp, k4);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + T(h) * (T(a51) * k1[i] + T(a52) * k2[i] + T(a53) * k3[i] + T(a54) * k4[i]);
    rhs(r + c5 * h, tmp, k5);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + T(h) * (T(a61) * k1[i] + T(a62) * k2[i] + T(a63) * k3[i] +
                              T(a64) * k4[i] + T(a65) * k5[i]);
    const double r_next = last ? b : r + h;
    rhs(r_next, tmp, k6);
    for (std::size_t i = 0; i < N; ++i)
      y1[i] = y[i] + T(h) * (T(b1) * k1[i] + T(b3) * k3[i] + T(b4) * k4[i] + T(b5) * k5[i] +
                             T(b6) * k6[i]);
    rhs(r_next, y1, k7);

    weights(y, y1, w);
    double err = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      if (w[i] == T(0)) continue;
      const T e = T(h) * (T(e1) * k1[i] + T(e3) * k3[i] + T(e4) * k4[i] + T(e5) * k5[i] +
                          T(e6) * k6[i] + T(e7) * k7[i]);
      const double sc = rtol * mag(w[i]);
      err = std::max(err, mag(e) / sc);
    }
    if (!std::isfinite(err)) {
      h *= 0.2;
      if (h < 1e-14 * std::max(1.0, std::abs(r)))
        throw Error(ErrorCode::integration_failure, "non-finite state");
      continue;
    }
    if (err <= 1.0) {
      r = r_next;
      y = y1;
      k1 = k7;
      ++steps;
      if (observe(r, y)) rhs(r, y, k1);
      if (last) break;
      const double fac = err == 0.0 ? 5.0 : std::min(5.0, 0.9 * std::pow(err, -0.2));
      h *= std::max(0.2, fac);
    } else {
      h *= std::max(0.1, 0.9 * std::pow(err, -0.2));
      if (h < 1e-15 * std::max(1.0, std::abs(r)))
        throw Error(ErrorCode::integration_failure, "step size underflow");
    }
  }
  return steps;
}

/// Values at r = R of one scaled radial solution.
template <class T>
struct SolutionEnd {
  T u{};
  T du{};
  T m{};
  int zeros = 0;         // sign changes of u inside the interval (real lambda only)
  double max_u = 0.0;    // largest |u| seen, in the final scaling
};

template <class T>
struct PairEnd {
  SolutionEnd<T> free;
  SolutionEnd<T> refracted;
  T cross{};  // scaled Wronskian x(R)
};

namespace detail {

template <class T>
struct Context {
  const RadialMedium* medium;
  int d;
  int k;
  double R;
  T lambda;
  double p;       // 2k + d - 1
  double length;  // characteristic length for the (u, u') error norm
  double nmax;
  double cross_scale;
};

template <class T>
Context<T> make_context(const RadialMedium& m, const ModeIndex& mode, T lambda) {
  Context<T> c{};
  c.medium = &m;
  c.d = m.dimension();
  c.k = mode.k;
  c.R = m.outer_radius();
  c.lambda = lambda;
  c.p = 2.0 * mode.k + c.d - 1.0;
  c.nmax = std::max(1.0, m.max_n());
  c.length = 1.0 / (std::sqrt(mag(lambda) * c.nmax) + (mode.k + 1.0) / c.R);
  c.cross_scale = mag(lambda) * std::max(std::abs(c.nmax - 1.0), std::abs(m.min_n() - 1.0)) *
                  c.R / (c.p + 1.0);
  return c;
}

// Segments [cut_i, cut_{i+1}] on which n is smooth.
inline std::vector<double> cuts(const RadialMedium& m, double from, double to) {
  std::vector<double> out{from};
  for (double b : m.breakpoints())
    if (b > from && b < to) out.push_back(b);
  out.push_back(to);
  return out;
}

// n evaluated on the piece that owns the open segment (lo, hi).
struct PieceCoefficient {
  const RadialMedium* medium;
  double mid;
  double operator()(double r) const {
    if (const auto* pw = std::get_if<PiecewiseProfile>(&medium->profile())) {
      auto it = std::upper_bound(pw->breaks.begin(), pw->breaks.end(), mid);
      auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - pw->breaks.begin() - 1),
                                       pw->pieces.size() - 1);
      return pw->pieces[idx](r);
    }
    return medium->n(r);
  }
};

template <class T>
double solution_scale(const Context<T>& c, const T& u, const T& du) {
  return mag(u) + c.length * mag(du);
}

constexpr double rescale_threshold = 1e100;

}  // namespace detail

/// Integrates one scaled solution to r = R. `refracted` selects c = n (with
/// the obstacle condition when r0 > 0) instead of c = 1 on the whole ball.
template <class T>
SolutionEnd<T> solve_single(const RadialMedium& medium, const ModeIndex& mode, T lambda,
                            bool refracted, const Options& opt = {}) {
  using S = std::array<T, 3>;
  auto c = detail::make_context(medium, mode, lambda);
  const double R = c.R;
  const bool annulus = refracted && medium.has_obstacle();
  const double start = annulus ? medium.obstacle_radius() : opt.start_fraction * R;
  const double q = 2.0 * mode.k + c.d;
  constexpr bool is_real = std::is_same_v<T, double>;

  S y{};
  if (annulus) {
    y = {T(0), T(1), T(0)};
  } else {
    const double n0 = refracted ? medium.n(0.0) : 1.0;
    const T c1 = -lambda * T(n0 / (2.0 * q));
    y = {T(1) + c1 * T(start * start), T(2.0 * start) * c1, T(n0 * R / q)};
  }

  SolutionEnd<T> out;
  double sign_prev = 0.0;
  if constexpr (is_real) sign_prev = annulus ? 0.0 : (y[0] > 0 ? 1.0 : -1.0);
  out.max_u = mag(y[0]);

  const auto segments =
      refracted ? detail::cuts(medium, start, R) : std::vector<double>{start, R};
  for (std::size_t s = 0; s + 1 < segments.size(); ++s) {
    const double lo = segments[s], hi = segments[s + 1];
    detail::PieceCoefficient coef{&medium, 0.5 * (lo + hi)};
    auto rhs = [&](double r, const S& v, S& dv) {
      const double nr = refracted ? coef(r) : 1.0;
      const double nw = refracted ? nr : 1.0;
      dv[0] = v[1];
      dv[1] = -T(c.p / r) * v[1] - lambda * T(nr) * v[0];
      dv[2] = T(nw * R / r) * v[0] * v[0] - T(q / r) * v[2];
    };
    auto weights = [&](const S& a, const S& b, S& w) {
      const double su = std::max(detail::solution_scale(c, a[0], a[1]),
                                 detail::solution_scale(c, b[0], b[1]));
      w[0] = T(su);
      w[1] = T(su / c.length);
      w[2] = T(std::max(mag(a[2]), mag(b[2])) + c.nmax * R / q * su * su);
    };
    auto observe = [&](double, S& v) {
      const double au = mag(v[0]);
      if constexpr (is_real) {
        if (v[0] != 0.0) {
          const double sg = v[0] > 0 ? 1.0 : -1.0;
          if (sign_prev != 0.0 && sg != sign_prev) ++out.zeros;
          sign_prev = sg;
        }
      }
      bool rescaled = false;
      if (au > detail::rescale_threshold || c.length * mag(v[1]) > detail::rescale_threshold) {
        const double f = 1.0 / detail::rescale_threshold;
        v[0] *= f;
        v[1] *= f;
        v[2] *= f * f;
        out.max_u *= f;
        rescaled = true;
      }
      out.max_u = std::max(out.max_u, mag(v[0]));
      return rescaled;
    };
    const double h0 = std::min(hi - lo, 0.05 * std::max(lo, 1e-3 * R) / q);
    dormand_prince<T, 3>(rhs, y, lo, hi, std::max(h0, 1e-12 * R), opt.rtol,
                                 opt.max_steps, weights, observe);
  }
  out.u = y[0];
  out.du = y[1];
  out.m = y[2];
  if constexpr (is_real) {
    // A final u == 0 means R is itself a node; the caller treats it as a pole.
    if (y[0] == 0.0 && out.zeros > 0) --out.zeros;
  }
  return out;
}

/// Integrates the free and refracted solutions together with their cross
/// Wronskian.
template <class T>
PairEnd<T> solve_pair(const RadialMedium& medium, const ModeIndex& mode, T lambda,
                      const Options& opt = {}) {
  using S = std::array<T, 7>;
  auto c = detail::make_context(medium, mode, lambda);
  const double R = c.R;
  const double q = 2.0 * mode.k + c.d;
  const double eps = opt.start_fraction * R;
  const double r0 = medium.obstacle_radius();
  constexpr bool is_real = std::is_same_v<T, double>;

  PairEnd<T> out;
  S y{};
  double joint_from = eps;
  {
    const T c1 = -lambda * T(1.0 / (2.0 * q));
    y[0] = T(1) + c1 * T(eps * eps);
    y[1] = T(2.0 * eps) * c1;
    y[2] = T(R / q);
  }
  if (medium.has_obstacle()) {
    // Free solution alone on [eps, r0].
    const Options& inner = opt;
    using S3 = std::array<T, 3>;
    S3 v{y[0], y[1], y[2]};
    double sign_prev = 1.0;
    auto rhs = [&](double r, const S3& s, S3& ds) {
      ds[0] = s[1];
      ds[1] = -T(c.p / r) * s[1] - lambda * s[0];
      ds[2] = T(R / r) * s[0] * s[0] - T(q / r) * s[2];
    };
    auto weights = [&](const S3& a, const S3& b, S3& w) {
      const double su = std::max(detail::solution_scale(c, a[0], a[1]),
                                 detail::solution_scale(c, b[0], b[1]));
      w[0] = T(su);
      w[1] = T(su / c.length);
      w[2] = T(std::max(mag(a[2]), mag(b[2])) + R / q * su * su);
    };
    auto observe = [&](double, S3& s) {
      if constexpr (is_real) {
        if (s[0] != 0.0) {
          const double sg = s[0] > 0 ? 1.0 : -1.0;
          if (sg != sign_prev) ++out.free.zeros;
          sign_prev = sg;
        }
      }
      if (mag(s[0]) > detail::rescale_threshold ||
          c.length * mag(s[1]) > detail::rescale_threshold) {
        const double f = 1.0 / detail::rescale_threshold;
        s[0] *= f;
        s[1] *= f;
        s[2] *= f * f;
        return true;
      }
      return false;
    };
    dormand_prince<T, 3>(rhs, v, eps, r0, std::max(0.05 * eps / q, 1e-12 * R),
                                 inner.rtol, inner.max_steps, weights, observe);
    y[0] = v[0];
    y[1] = v[1];
    y[2] = v[2];
    y[3] = T(0);
    y[4] = T(1);
    y[5] = T(0);
    y[6] = T(R / r0) * y[4] * y[0];
    joint_from = r0;
  } else {
    const double n0 = medium.n(0.0);
    const T c1 = -lambda * T(n0 / (2.0 * q));
    y[3] = T(1) + c1 * T(eps * eps);
    y[4] = T(2.0 * eps) * c1;
    y[5] = T(n0 * R / q);
    y[6] = -lambda * T((n0 - 1.0) * R / q);
  }

  double sign_u = 0.0, sign_v = 0.0;
  if constexpr (is_real) {
    sign_u = y[0] > 0 ? 1.0 : -1.0;
    sign_v = medium.has_obstacle() ? 0.0 : (y[3] > 0 ? 1.0 : -1.0);
  }
  out.free.max_u = mag(y[0]);
  out.refracted.max_u = mag(y[3]);

  const auto segments = detail::cuts(medium, joint_from, R);
  for (std::size_t s = 0; s + 1 < segments.size(); ++s) {
    const double lo = segments[s], hi = segments[s + 1];
    detail::PieceCoefficient coef{&medium, 0.5 * (lo + hi)};
    auto rhs = [&](double r, const S& v, S& dv) {
      const double nr = coef(r);
      const T qr = T(q / r);
      dv[0] = v[1];
      dv[1] = -T(c.p / r) * v[1] - lambda * v[0];
      dv[2] = T(R / r) * v[0] * v[0] - qr * v[2];
      dv[3] = v[4];
      dv[4] = -T(c.p / r) * v[4] - lambda * T(nr) * v[3];
      dv[5] = T(nr * R / r) * v[3] * v[3] - qr * v[5];
      dv[6] = -lambda * T((nr - 1.0) * R / r) * v[0] * v[3] - qr * v[6];
    };
    auto weights = [&](const S& a, const S& b, S& w) {
      const double su = std::max(detail::solution_scale(c, a[0], a[1]),
                                 detail::solution_scale(c, b[0], b[1]));
      const double sv = std::max(detail::solution_scale(c, a[3], a[4]),
                                 detail::solution_scale(c, b[3], b[4]));
      w[0] = T(su);
      w[1] = T(su / c.length);
      w[2] = T(std::max(mag(a[2]), mag(b[2])) + R / q * su * su);
      w[3] = T(sv);
      w[4] = T(sv / c.length);
      w[5] = T(std::max(mag(a[5]), mag(b[5])) + c.nmax * R / q * sv * sv);
      w[6] = T(std::max(mag(a[6]), mag(b[6])) + c.cross_scale * su * sv);
    };
    auto observe = [&](double, S& v) {
      if constexpr (is_real) {
        if (v[0] != 0.0) {
          const double sg = v[0] > 0 ? 1.0 : -1.0;
          if (sign_u != 0.0 && sg != sign_u) ++out.free.zeros;
          sign_u = sg;
        }
        if (v[3] != 0.0) {
          const double sg = v[3] > 0 ? 1.0 : -1.0;
          if (sign_v != 0.0 && sg != sign_v) ++out.refracted.zeros;
          sign_v = sg;
        }
      }
      bool rescaled = false;
      const double f = 1.0 / detail::rescale_threshold;
      if (mag(v[0]) > detail::rescale_threshold ||
          c.length * mag(v[1]) > detail::rescale_threshold) {
        v[0] *= f;
        v[1] *= f;
        v[2] *= f * f;
        v[6] *= f;
        out.free.max_u *= f;
        rescaled = true;
      }
      if (mag(v[3]) > detail::rescale_threshold ||
          c.length * mag(v[4]) > detail::rescale_threshold) {
        v[3] *= f;
        v[4] *= f;
        v[5] *= f * f;
        v[6] *= f;
        out.refracted.max_u *= f;
        rescaled = true;
      }
      out.free.max_u = std::max(out.free.max_u, mag(v[0]));
      out.refracted.max_u = std::max(out.refracted.max_u, mag(v[3]));
      return rescaled;
    };
    const double h0 = std::min(hi - lo, 0.05 * std::max(lo, 1e-3 * R) / q);
    dormand_prince<T, 7>(rhs, y, lo, hi, std::max(h0, 1e-12 * R), opt.rtol,
                                 opt.max_steps, weights, observe);
  }
  out.free.u = y[0];
  out.free.du = y[1];
  out.free.m = y[2];
  out.refracted.u = y[3];
  out.refracted.du = y[4];
  out.refracted.m = y[5];
  out.cross = y[6];
  return out;
}

/// w'(R)/w(R) from a scaled solution end.
template <class T>
T log_derivative(const SolutionEnd<T>& s, int k, double R) {
  return T(k / R) + s.du / s.u;
}

/// d/dlambda of w'(R)/w(R) by the Green identity.
template <class T>
T log_derivative_slope(const SolutionEnd<T>& s) {
  return -s.m / (s.u * s.u);
}

/// f_n(R) - f(R) from the cross Wronskian.
template <class T>
T difference(const PairEnd<T>& p) {
  return p.cross / (p.free.u * p.refracted.u);
}

}  // namespace itelab::ode
