#pragma once

// Special-function backend for the radial Dirichlet-to-Neumann values of
// constant-coefficient media. Shares no code with the radial ODE backend so
// that each can serve as the other's oracle.
//
// All disk formulas depend on lambda only through w = n lambda R^2, so no
// square-root branch is ever taken.

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/bessel_prime.hpp>

#include "itelab/error.hpp"

namespace itelab::bessel {

template <class T>
double magnitude(const T& v) {
  return std::abs(v);
}

/// g_nu(w) = z J_nu(z) / J_{nu+1}(z) with z^2 = w, evaluated as the
/// continued fraction 2(nu+1) - w/(2(nu+2) - w/(2(nu+3) - ...)) by the
/// modified Lentz method. This is the backward (Miller) recurrence for the
/// minimal solution written in ratio form; it converges for every w and
/// stays finite through the zeros of J_nu (where g vanishes).
template <class T>
T ratio_cf(double nu, T w) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 2.0 * std::numeric_limits<double>::epsilon();
  const T a = -w;
  T f = T(2.0 * (nu + 1.0));
  if (f == T(0)) f = T(tiny);
  T C = f;
  T D = T(0);
  const int max_terms = 200000;
  for (int j = 2; j < max_terms; ++j) {
    const T b = T(2.0 * (nu + j));
    D = b + a * D;
    if (magnitude(D) < tiny) D = T(tiny);
    C = b + a / C;
    if (magnitude(C) < tiny) C = T(tiny);
    D = T(1) / D;
    const T delta = C * D;
    f *= delta;
    if (magnitude(delta - T(1)) < eps && j > 4) return f;
  }
  throw Error(ErrorCode::integration_failure, "Bessel continued fraction did not converge");
}

template <class T>
struct DiskValue {
  T value;       // w'(R)/w(R)
  T slope;       // d/dlambda of value
  bool pole;     // J_nu(sqrt(w)) == 0 to working precision
};

/// D-to-N value of the regular solution r^{-(d-2)/2} J_nu(sqrt(n lambda) r)
/// on the disk/ball of radius R; nu = k + (d-2)/2.
template <class T>
DiskValue<T> disk_dtn(int dimension, int k, double R, double n, T lambda) {
  const double nu = k + 0.5 * (dimension - 2);
  const T w = T(n) * lambda * T(R * R);
  const T g = ratio_cf(nu, w);
  DiskValue<T> out{};
  if (g == T(0) || !std::isfinite(magnitude(g))) {
    out.pole = true;
    out.value = T(std::numeric_limits<double>::infinity());
    out.slope = out.value;
    return out;
  }
  const T t = T(1) / g;  // q / w with q = z J_{nu+1} / J_nu
  out.value = (T(double(k)) - w * t) / T(R);
  out.slope = T(-0.5 * R * n) * (T(1) - t * (T(2.0 * nu) - w * t));
  out.pole = !std::isfinite(magnitude(out.value));
  return out;
}

struct AnnulusValue {
  double value;
  double pole_distance;  // |f / f'|, +inf where no poles can occur
  bool pole;
};

namespace detail {

struct CrossProduct {
  double zeta_R;     // zeta(R), scaled
  double dzeta_R;    // d zeta / dr at R, same scaling
  double dzeta_r0;   // d zeta / dr at r0, same scaling
};

// zeta(r) = J(a r) Y(a r0) - Y(a r) J(a r0), scaled by the larger of
// |J(a r0)|, |Y(a r0)|.
inline CrossProduct oscillatory_cross(double nu, double a, double R, double r0) {
  using namespace boost::math;
  const double x = a * R, x0 = a * r0;
  const double J0 = cyl_bessel_j(nu, x0);
  const double Y0 = cyl_neumann(nu, x0);
  const double J = cyl_bessel_j(nu, x), Y = cyl_neumann(nu, x);
  const double Jp = cyl_bessel_j_prime(nu, x), Yp = cyl_neumann_prime(nu, x);
  const double scale = std::abs(Y0) >= std::abs(J0) ? Y0 : J0;
  const double y0 = Y0 / scale, j0 = J0 / scale;
  return {J * y0 - Y * j0, a * (Jp * y0 - Yp * j0), (-2.0 / (std::numbers::pi * r0)) / scale};
}

// zeta(r) = I(b r) K(b r0) - K(b r) I(b r0), scaled by 1 / K(b r0).
inline CrossProduct evanescent_cross(double nu, double b, double R, double r0) {
  using namespace boost::math;
  const double x = b * R, x0 = b * r0;
  const double I0 = cyl_bessel_i(nu, x0);
  const double K0 = cyl_bessel_k(nu, x0);
  const double I = cyl_bessel_i(nu, x), K = cyl_bessel_k(nu, x);
  const double Ip = cyl_bessel_i_prime(nu, x), Kp = cyl_bessel_k_prime(nu, x);
  const double rho = I0 / K0;
  return {I - K * rho, b * (Ip - Kp * rho), (1.0 / r0) / K0};
}

}  // namespace detail

/// f_n(0) - f(0) for the annulus, written without cancellation:
/// 2 nu q / (R (1 - q)) with q = (r0/R)^(2 nu), or 1/(R ln(R/r0)) for nu = 0.
inline double annulus_static_difference(int dimension, int k, double R, double r0) {
  const double nu = k + 0.5 * (dimension - 2);
  if (nu == 0.0) return 1.0 / (R * std::log(R / r0));
  const double q = std::pow(r0 / R, 2.0 * nu);
  return 2.0 * nu * q / (R * (1.0 - q));
}

/// D-to-N value at R of the solution vanishing at r0 for constant n and real
/// lambda; d = 2 uses integer orders, d = 3 the half-integer orders of the
/// spherical functions. Throws BackendUnavailable when the special functions
/// leave double range.
inline AnnulusValue annulus_dtn(int dimension, int k, double R, double r0, double n,
                                double lambda) {
  const double nu = k + 0.5 * (dimension - 2);
  const double shift = 0.5 * (dimension - 2) / R;
  constexpr double inf = std::numeric_limits<double>::infinity();

  if (lambda == 0.0) {
    if (nu == 0.0) return {1.0 / (R * std::log(R / r0)), inf, false};
    const double q = std::pow(r0 / R, 2.0 * nu);
    return {nu / R * (1.0 + q) / (1.0 - q) - shift, inf, false};
  }

  try {
    if (lambda < 0.0) {
      const double b = std::sqrt(-n * lambda);
      if (2.0 * b * (R - r0) > 80.0) {
        // The K(bR) I(b r0) term is below double resolution.
        const auto disk = disk_dtn<double>(dimension, k, R, n, lambda);
        return {disk.value, inf, false};
      }
      const auto z = detail::evanescent_cross(nu, b, R, r0);
      if (!std::isfinite(z.zeta_R) || !std::isfinite(z.dzeta_R))
        throw Error(ErrorCode::backend_unavailable, "modified Bessel overflow");
      return {z.dzeta_R / z.zeta_R - shift, inf, false};
    }
    const double a = std::sqrt(n * lambda);
    const auto z = detail::oscillatory_cross(nu, a, R, r0);
    if (!std::isfinite(z.dzeta_R) || !std::isfinite(z.dzeta_r0))
      throw Error(ErrorCode::backend_unavailable, "Bessel overflow");
    if (z.zeta_R == 0.0) return {inf, 0.0, true};
    const double value = z.dzeta_R / z.zeta_R - shift;
    const double ft = value + shift;
    const double boundary = r0 * r0 * std::pow(z.dzeta_r0 / z.zeta_R, 2) / (2.0 * lambda * R);
    const double slope = -0.5 * R * (n + (ft * ft - nu * nu / (R * R)) / lambda) + boundary;
    return {value, std::abs(value / slope), false};
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::backend_unavailable, std::string("Bessel evaluation: ") + e.what());
  }
}

}  // namespace itelab::bessel
