#pragma once

// Radially symmetric medium: a disk (d = 2) or ball (d = 3) of radius R with
// refraction profile n(r), optionally containing a concentric sound-soft
// obstacle of radius r0.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "itelab/error.hpp"

namespace itelab {

/// Polynomial sum_i c_i r^i in the absolute radial coordinate.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coefficients) : c_(std::move(coefficients)) {
    if (c_.empty()) c_.push_back(0.0);
  }

  double operator()(double r) const {
    double acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * r + *it;
    return acc;
  }

  double derivative(double r) const {
    double acc = 0.0;
    for (std::size_t i = c_.size(); i-- > 1;) acc = acc * r + static_cast<double>(i) * c_[i];
    return acc;
  }

  std::span<const double> coefficients() const { return c_; }
  std::size_t degree() const { return c_.size() - 1; }

 private:
  std::vector<double> c_{0.0};
};

struct ConstantProfile {
  double value = 1.0;
};

struct PolynomialProfile {
  Polynomial poly;
};

/// Polynomial pieces on [breaks[i], breaks[i+1]]; breaks must start at 0 and
/// end at R.
struct PiecewiseProfile {
  std::vector<double> breaks;
  std::vector<Polynomial> pieces;
};

using Profile = std::variant<ConstantProfile, PolynomialProfile, PiecewiseProfile>;

enum class BoundaryClass {
  b1,          // n(R) != 1, difference operator of order -1
  b2,          // n(R) == 1, n'(R) != 0, order -2
  degenerate,  // neither holds; only reachable in test mode
};

struct BoundaryInfo {
  BoundaryClass cls = BoundaryClass::b1;
  int order = 1;  // s
};

inline constexpr double boundary_tolerance = 1e-12;

class RadialMedium {
 public:
  RadialMedium(int dimension, double outer_radius, double obstacle_radius, Profile profile,
               bool test_mode = false)
      : dim_(dimension),
        R_(outer_radius),
        r0_(obstacle_radius),
        profile_(std::move(profile)),
        test_mode_(test_mode) {
    if (dim_ != 2 && dim_ != 3) throw Error(ErrorCode::config_error, "dimension must be 2 or 3");
    if (!(R_ > 0.0)) throw Error(ErrorCode::config_error, "outer radius must be positive");
    if (!(r0_ >= 0.0 && r0_ < R_))
      throw Error(ErrorCode::config_error, "obstacle radius must satisfy 0 <= r0 < R");
    if (auto* pw = std::get_if<PiecewiseProfile>(&profile_)) {
      const auto& b = pw->breaks;
      if (b.size() < 2 || pw->pieces.size() + 1 != b.size())
        throw Error(ErrorCode::config_error, "piecewise profile needs m+1 breaks for m pieces");
      if (std::abs(b.front()) > 0.0 || std::abs(b.back() - R_) > 1e-14 * R_)
        throw Error(ErrorCode::config_error, "piecewise breaks must span [0, R]");
      if (!std::is_sorted(b.begin(), b.end()) ||
          std::adjacent_find(b.begin(), b.end()) != b.end())
        throw Error(ErrorCode::config_error, "piecewise breaks must be strictly increasing");
    }
  }

  /// Convenience constructor for the common constant-profile case.
  static RadialMedium constant(int dimension, double R, double n, double r0 = 0.0,
                               bool test_mode = false) {
    return RadialMedium(dimension, R, r0, ConstantProfile{n}, test_mode);
  }

  static RadialMedium polynomial(int dimension, double R, std::vector<double> coefficients,
                                 double r0 = 0.0, bool test_mode = false) {
    return RadialMedium(dimension, R, r0, PolynomialProfile{Polynomial(std::move(coefficients))},
                        test_mode);
  }

  int dimension() const { return dim_; }
  double outer_radius() const { return R_; }
  double obstacle_radius() const { return r0_; }
  bool has_obstacle() const { return r0_ > 0.0; }
  bool test_mode() const { return test_mode_; }
  const Profile& profile() const { return profile_; }

  bool is_constant() const { return std::holds_alternative<ConstantProfile>(profile_); }
  double constant_value() const { return std::get<ConstantProfile>(profile_).value; }

  double n(double r) const {
    return std::visit(
        [&](const auto& p) -> double {
          using P = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<P, ConstantProfile>) {
            return p.value;
          } else if constexpr (std::is_same_v<P, PolynomialProfile>) {
            return p.poly(r);
          } else {
            return p.pieces[piece_index(p, r)](r);
          }
        },
        profile_);
  }

  double dn(double r) const {
    return std::visit(
        [&](const auto& p) -> double {
          using P = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<P, ConstantProfile>) {
            return 0.0;
          } else if constexpr (std::is_same_v<P, PolynomialProfile>) {
            return p.poly.derivative(r);
          } else {
            return p.pieces[piece_index(p, r)].derivative(r);
          }
        },
        profile_);
  }

  /// Interior points of (r0, R) where the profile may jump; the radial
  /// integrators stop there.
  std::vector<double> breakpoints() const {
    std::vector<double> out;
    if (const auto* pw = std::get_if<PiecewiseProfile>(&profile_)) {
      for (std::size_t i = 1; i + 1 < pw->breaks.size(); ++i)
        if (pw->breaks[i] > r0_ && pw->breaks[i] < R_) out.push_back(pw->breaks[i]);
    }
    return out;
  }

  /// Sampled extrema of n over [r0, R] (exact for constant profiles).
  double max_n() const { return extremum(true); }
  double min_n() const { return extremum(false); }

 private:
  static std::size_t piece_index(const PiecewiseProfile& p, double r) {
    auto it = std::upper_bound(p.breaks.begin(), p.breaks.end(), r);
    auto idx = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - p.breaks.begin() - 1, 0));
    return std::min(idx, p.pieces.size() - 1);
  }

  double extremum(bool want_max) const {
    if (is_constant()) return constant_value();
    constexpr int samples = 4096;
    double best = n(r0_);
    auto consider = [&](double r) {
      double v = n(r);
      best = want_max ? std::max(best, v) : std::min(best, v);
    };
    for (int i = 0; i <= samples; ++i) consider(r0_ + (R_ - r0_) * i / samples);
    for (double b : breakpoints()) {
      consider(b);
      consider(std::nextafter(b, 0.0));
    }
    return best;
  }

  int dim_;
  double R_;
  double r0_;
  Profile profile_;
  bool test_mode_;
};

/// Classifies the boundary behaviour of n. Throws AmbiguousBoundary when
/// neither n(R) != 1 nor n'(R) != 0 holds (unless the medium is in test
/// mode) and NonpositiveProfile when n <= 0 somewhere on [r0, R].
inline BoundaryInfo validate(const RadialMedium& m) {
  if (!(m.min_n() > 0.0))
    throw Error(ErrorCode::nonpositive_profile, "n(r) must be positive on [r0, R]");
  const double R = m.outer_radius();
  const double jump = m.n(R) - 1.0;
  const double slope = m.dn(R);
  if (std::abs(jump) > boundary_tolerance) return {BoundaryClass::b1, 1};
  if (std::abs(slope) > boundary_tolerance) return {BoundaryClass::b2, 2};
  if (m.test_mode()) return {BoundaryClass::degenerate, 0};
  throw Error(ErrorCode::ambiguous_boundary, "n(R) = 1 and n'(R) = 0");
}

/// Sign of n - 1 just inside the outer boundary.
inline int sigma(const RadialMedium& m) {
  const auto info = validate(m);
  const double R = m.outer_radius();
  switch (info.cls) {
    case BoundaryClass::b1: return m.n(R) > 1.0 ? 1 : -1;
    case BoundaryClass::b2: return m.dn(R) < 0.0 ? 1 : -1;
    case BoundaryClass::degenerate: return 1;
  }
  return 1;
}

inline double ball_volume(int dimension, double radius) {
  using std::numbers::pi;
  return dimension == 2 ? pi * radius * radius : 4.0 / 3.0 * pi * radius * radius * radius;
}

/// sigma * (Vol(O) - int_{O \ V} n^{d/2} dx), integrated piece by piece
/// with adaptive Gauss-Kronrod to relative tolerance `rel_tol`.
inline double gamma(const RadialMedium& m, double rel_tol = 1e-10) {
  using std::numbers::pi;
  const int d = m.dimension();
  const double R = m.outer_radius();
  const double r0 = m.obstacle_radius();

  auto integrand = [&](double r) {
    const double nr = m.n(r);
    return d == 2 ? 2.0 * pi * r * nr : 4.0 * pi * r * r * std::pow(nr, 1.5);
  };

  std::vector<double> cuts{r0};
  for (double b : m.breakpoints()) cuts.push_back(b);
  cuts.push_back(R);

  double total = 0.0;
  double total_err = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double err = 0.0;
    total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        integrand, cuts[i], cuts[i + 1], 20, rel_tol * 1e-2, &err);
    total_err += err;
  }
  if (!(total_err <= rel_tol * std::max(std::abs(total), 1e-300)))
    throw Error(ErrorCode::quadrature_failure,
                "profile integral error estimate " + std::to_string(total_err));
  return sigma(m) * (ball_volume(d, R) - total);
}

}  // namespace itelab
