#pragma once

// Per-mode Dirichlet-to-Neumann values f(lambda) = w'(R)/w(R) of the free
// equation -Lap u - lambda u = 0 and of the refracted equation
// -Lap v - lambda n v = 0 (Dirichlet on the obstacle when r0 > 0).

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <type_traits>

#include "itelab/bessel.hpp"
#include "itelab/error.hpp"
#include "itelab/medium.hpp"
#include "itelab/mode.hpp"
#include "itelab/radial_ode.hpp"

namespace itelab {

enum class Backend { bessel, ode };
enum class Equation { free, refracted };

inline constexpr double pole_guard = 1e-8;

inline const char* backend_name(Backend b) { return b == Backend::bessel ? "bessel" : "ode"; }

template <class T>
struct DtnSample {
  T lambda{};
  T value{};
  bool near_pole = false;
  double pole_distance = std::numeric_limits<double>::infinity();  // ~ |lambda - nearest pole|
  Backend backend = Backend::bessel;
};

template <class T>
struct DiffSample {
  T lambda{};
  T value{};  // f_n - f
  DtnSample<T> free;
  DtnSample<T> refracted;
  bool near_pole = false;
  Backend backend = Backend::bessel;
  std::optional<double> discrepancy;  // |bessel - ode| / (1 + |bessel|) when recorded
};

struct DtnOptions {
  Backend preferred = Backend::bessel;
  bool record_discrepancy = false;
  ode::Options ode{};
};

namespace detail {

template <class T>
constexpr bool is_real_v = std::is_same_v<T, double>;

// |u(R)| this small next to the largest |u| on the path means R is a node.
inline constexpr double node_ratio = 64.0 * std::numeric_limits<double>::epsilon();

template <class T>
void check_node(const ode::SolutionEnd<T>& s) {
  if (ode::mag(s.u) <= node_ratio * s.max_u || s.u == T(0))
    throw Error(ErrorCode::pole_hit, "radial solution vanishes at the outer boundary");
}

template <class T>
DtnSample<T> from_solution(const ode::SolutionEnd<T>& s, int k, double R, T lambda) {
  check_node(s);
  DtnSample<T> out;
  out.lambda = lambda;
  out.value = ode::log_derivative(s, k, R);
  const T slope = ode::log_derivative_slope(s);
  out.pole_distance = ode::mag(out.value) / ode::mag(slope);
  out.near_pole = out.pole_distance < pole_guard;
  out.backend = Backend::ode;
  return out;
}

template <class T>
DtnSample<T> from_disk(const bessel::DiskValue<T>& v, T lambda) {
  if (v.pole) throw Error(ErrorCode::pole_hit, "lambda is a Dirichlet eigenvalue of the mode");
  DtnSample<T> out;
  out.lambda = lambda;
  out.value = v.value;
  out.pole_distance = ode::mag(v.value) / ode::mag(v.slope);
  out.near_pole = out.pole_distance < pole_guard;
  out.backend = Backend::bessel;
  return out;
}

template <class T>
bool bessel_available(const RadialMedium& m, Equation eq, T lambda) {
  if (eq == Equation::free) return true;
  if (!m.is_constant()) return false;
  if (!m.has_obstacle()) return true;
  if constexpr (is_real_v<T>) {
    (void)lambda;
    return true;
  } else {
    return lambda.imag() == 0.0;
  }
}

template <class T>
DtnSample<T> bessel_dtn(const RadialMedium& m, const ModeIndex& mode, T lambda, Equation eq) {
  const int d = m.dimension();
  const double R = m.outer_radius();
  if (eq == Equation::free) return from_disk(bessel::disk_dtn<T>(d, mode.k, R, 1.0, lambda), lambda);
  if (!m.is_constant())
    throw Error(ErrorCode::backend_unavailable, "closed-form backend needs a constant profile");
  const double n = m.constant_value();
  if (!m.has_obstacle()) return from_disk(bessel::disk_dtn<T>(d, mode.k, R, n, lambda), lambda);
  double lam;
  if constexpr (is_real_v<T>) {
    lam = lambda;
  } else {
    if (lambda.imag() != 0.0)
      throw Error(ErrorCode::backend_unavailable, "annulus closed form is real-lambda only");
    lam = lambda.real();
  }
  const auto v = bessel::annulus_dtn(d, mode.k, R, m.obstacle_radius(), n, lam);
  if (v.pole) throw Error(ErrorCode::pole_hit, "lambda is a Dirichlet eigenvalue of the mode");
  DtnSample<T> out;
  out.lambda = lambda;
  out.value = T(v.value);
  out.pole_distance = v.pole_distance;
  out.near_pole = v.pole_distance < pole_guard;
  out.backend = Backend::bessel;
  return out;
}

template <class T>
DtnSample<T> ode_dtn(const RadialMedium& m, const ModeIndex& mode, T lambda, Equation eq,
                     const ode::Options& opt) {
  const auto s = ode::solve_single<T>(m, mode, lambda, eq == Equation::refracted, opt);
  return from_solution(s, mode.k, m.outer_radius(), lambda);
}

template <class T>
DtnSample<T> dtn(const RadialMedium& m, const ModeIndex& mode, T lambda, Equation eq,
                 const DtnOptions& opt) {
  if (mode.dimension != m.dimension())
    throw Error(ErrorCode::config_error, "mode dimension does not match the medium");
  if (opt.preferred == Backend::bessel && bessel_available(m, eq, lambda)) {
    try {
      return bessel_dtn(m, mode, lambda, eq);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::backend_unavailable) throw;
    }
  }
  return ode_dtn(m, mode, lambda, eq, opt.ode);
}

}  // namespace detail

/// D-to-N value of the free equation on the ball of radius R.
template <class T>
DtnSample<T> dtn_free(const RadialMedium& m, const ModeIndex& mode, T lambda,
                      const DtnOptions& opt = {}) {
  return detail::dtn(m, mode, lambda, Equation::free, opt);
}

/// D-to-N value of the refracted equation (with the obstacle, if any).
template <class T>
DtnSample<T> dtn_n(const RadialMedium& m, const ModeIndex& mode, T lambda,
                   const DtnOptions& opt = {}) {
  return detail::dtn(m, mode, lambda, Equation::refracted, opt);
}

template <class T>
DtnSample<T> dtn_value(const RadialMedium& m, const ModeIndex& mode, T lambda, Equation eq,
                       const DtnOptions& opt = {}) {
  return detail::dtn(m, mode, lambda, eq, opt);
}

/// d(lambda) = f_n - f. Constant profiles use the closed forms on both sides;
/// otherwise the joint integration gives the difference directly from the
/// cross Wronskian.
template <class T>
DiffSample<T> dtn_diff(const RadialMedium& m, const ModeIndex& mode, T lambda,
                       const DtnOptions& opt = {}) {
  if (mode.dimension != m.dimension())
    throw Error(ErrorCode::config_error, "mode dimension does not match the medium");
  DiffSample<T> out;
  out.lambda = lambda;
  const bool closed = opt.preferred == Backend::bessel &&
                      detail::bessel_available(m, Equation::refracted, lambda);
  std::optional<DiffSample<T>> via_bessel;
  if (closed) {
    try {
      DiffSample<T> b;
      b.lambda = lambda;
      b.free = detail::bessel_dtn(m, mode, lambda, Equation::free);
      b.refracted = detail::bessel_dtn(m, mode, lambda, Equation::refracted);
      b.value = b.refracted.value - b.free.value;
      if (m.has_obstacle() && lambda == T(0))
        b.value = T(bessel::annulus_static_difference(m.dimension(), mode.k, m.outer_radius(),
                                                      m.obstacle_radius()));
      b.backend = Backend::bessel;
      via_bessel = b;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::backend_unavailable) throw;
    }
  }
  if (via_bessel && !opt.record_discrepancy) {
    out = *via_bessel;
  } else {
    const auto p = ode::solve_pair<T>(m, mode, lambda, opt.ode);
    const double R = m.outer_radius();
    DiffSample<T> o;
    o.lambda = lambda;
    o.free = detail::from_solution(p.free, mode.k, R, lambda);
    o.refracted = detail::from_solution(p.refracted, mode.k, R, lambda);
    o.value = ode::difference(p);
    o.backend = Backend::ode;
    if (via_bessel) {
      out = *via_bessel;
      out.discrepancy = ode::mag(via_bessel->value - o.value) / (1.0 + ode::mag(via_bessel->value));
    } else {
      out = o;
    }
  }
  out.near_pole = out.free.near_pole || out.refracted.near_pole;
  return out;
}

/// d/dlambda of the D-to-N value by central differences with one Richardson
/// step. Throws StepCollision when a pole sits inside the stencil.
inline double dtn_deriv(const RadialMedium& m, const ModeIndex& mode, double lambda,
                        Equation eq = Equation::refracted, const DtnOptions& opt = {}) {
  const double h = 1e-5 * std::max(1.0, std::abs(lambda));
  const auto centre = dtn_value(m, mode, lambda, eq, opt);
  double f[4];
  const double offs[4] = {-h, -0.5 * h, 0.5 * h, h};
  for (int i = 0; i < 4; ++i) f[i] = dtn_value(m, mode, lambda + offs[i], eq, opt).value;
  // f is decreasing between poles; an increase across the stencil means a
  // pole was crossed.
  if (!(f[0] > f[1] && f[1] > centre.value && centre.value > f[2] && f[2] > f[3]))
    throw Error(ErrorCode::step_collision, "stencil values not monotone, pole suspected");
  const double coarse = (f[3] - f[0]) / (2.0 * h);
  const double fine = (f[2] - f[1]) / h;
  const double slope = (4.0 * fine - coarse) / 3.0;
  // Next to a simple pole f''/f' ~ 2/(lambda0 - lambda). |f/f'| is no use
  // here since it also vanishes where f crosses zero.
  const double curv = (f[3] - 2.0 * centre.value + f[0]) / (h * h);
  if (2.0 * std::abs(slope) < 4.0 * h * std::abs(curv))
    throw Error(ErrorCode::step_collision, "pole inside the difference stencil");
  return slope;
}

/// Relative disagreement |bessel - ode| / (1 + |bessel|) over f and f_n. The
/// cross-Wronskian difference is checked too, against 1 + max(|f|, |f_n|):
/// next to a pole d inherits the absolute error of maps of that size.
/// Needs a constant profile.
template <class T>
double crosscheck(const RadialMedium& m, const ModeIndex& mode, T lambda,
                  const ode::Options& ode_opt = {}) {
  if (!detail::bessel_available(m, Equation::refracted, lambda))
    throw Error(ErrorCode::backend_unavailable, "crosscheck needs a constant profile");
  const auto bf = detail::bessel_dtn(m, mode, lambda, Equation::free);
  const auto bn = detail::bessel_dtn(m, mode, lambda, Equation::refracted);
  const auto p = ode::solve_pair<T>(m, mode, lambda, ode_opt);
  const double R = m.outer_radius();
  const auto of = detail::from_solution(p.free, mode.k, R, lambda);
  const auto on = detail::from_solution(p.refracted, mode.k, R, lambda);
  auto rel = [](T b, T o) { return ode::mag(b - o) / (1.0 + ode::mag(b)); };
  const double scale = 1.0 + std::max(ode::mag(bf.value), ode::mag(bn.value));
  return std::max({rel(bf.value, of.value), rel(bn.value, on.value),
                   ode::mag(bn.value - bf.value - ode::difference(p)) / scale});
}

}  // namespace itelab
