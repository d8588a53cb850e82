#pragma once

#include <cmath>

namespace itelab {

/// One angular mode of the radial separation: Fourier index in 2D, spherical
/// degree in 3D.
struct ModeIndex {
  int dimension = 2;
  int k = 0;

  int multiplicity() const { return dimension == 2 ? (k == 0 ? 1 : 2) : 2 * k + 1; }

  /// Co-vector length k / R on the boundary circle or sphere.
  double tangential_frequency(double R) const { return k / R; }

  /// Laplace-Beltrami eigenvalue on the boundary (k^2/R^2 or k(k+1)/R^2).
  double laplace_beltrami(double R) const {
    const double kk = dimension == 2 ? double(k) * k : double(k) * (k + 1);
    return kk / (R * R);
  }

  /// Cylinder-function order of the radial solutions: k in 2D, k + 1/2 in 3D.
  double bessel_order() const { return k + 0.5 * (dimension - 2); }

  friend bool operator==(const ModeIndex&, const ModeIndex&) = default;
};

}  // namespace itelab
