#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "itelab/dtn.hpp"
#include "itelab/medium.hpp"
#include "itelab/spectra.hpp"
#include "oracles.hpp"

using namespace itelab;
using cplx = std::complex<double>;

namespace {

DtnOptions ode_only() {
  DtnOptions o;
  o.preferred = Backend::ode;
  return o;
}

double rel(double a, double b) { return std::abs(a - b) / (1.0 + std::abs(b)); }

const RadialMedium n4 = RadialMedium::constant(2, 1.0, 4.0);
const RadialMedium grazing = RadialMedium::polynomial(2, 1.0, {2.0, 0.0, -1.0});
const RadialMedium annulus = RadialMedium::constant(2, 1.0, 2.0, 0.8);

}  // namespace

TEST(DtnFree, StaticValueIsKOverR) {
  for (int k : {0, 1, 3, 17}) {
    EXPECT_NEAR(dtn_free(n4, {2, k}, 0.0).value, double(k), 1e-12);
    EXPECT_NEAR(dtn_free(n4, {2, k}, 0.0, ode_only()).value, double(k), 1e-12);
    EXPECT_NEAR(dtn_n(grazing, {2, k}, 0.0).value, double(k), 1e-12);
  }
  const auto R2 = RadialMedium::constant(3, 2.0, 4.0);
  EXPECT_NEAR(dtn_free(R2, {3, 3}, 0.0).value, 1.5, 1e-12);
  EXPECT_NEAR(dtn_n(R2, {3, 3}, 0.0, ode_only()).value, 1.5, 1e-12);
}

TEST(DtnFree, KnownValueAtOne) {
  EXPECT_NEAR(dtn_free(n4, {2, 0}, 1.0).value, oracle::frozen::free_k0_at_1, 1e-13);
  EXPECT_NEAR(dtn_free(n4, {2, 0}, 1.0, ode_only()).value, oracle::frozen::free_k0_at_1, 1e-10);
  EXPECT_NEAR(oracle::disk_dtn(2, 0, 1.0, 1.0, 1.0), oracle::frozen::free_k0_at_1, 1e-14);
}

TEST(DtnN, KnownValueForIndexFour) {
  EXPECT_NEAR(dtn_n(n4, {2, 0}, 1.0).value, oracle::frozen::n4_k0_at_1, 1e-12);
  EXPECT_NEAR(dtn_n(n4, {2, 0}, 1.0, ode_only()).value, oracle::frozen::n4_k0_at_1, 1e-9);
}

TEST(DtnN, AnnulusStaticValue) {
  EXPECT_NEAR(dtn_n(annulus, {2, 0}, 0.0).value, oracle::frozen::annulus_k0_at_0, 1e-12);
  EXPECT_NEAR(dtn_n(annulus, {2, 0}, 0.0, ode_only()).value, oracle::frozen::annulus_k0_at_0, 1e-9);
}

TEST(DtnFree, PoleIsFlaggedAndThrowsWhenHit) {
  const double p = oracle::frozen::j01_sq;
  EXPECT_TRUE(dtn_free(n4, {2, 0}, p - 1e-9).near_pole);
  EXPECT_FALSE(dtn_free(n4, {2, 0}, p - 1e-3).near_pole);
  EXPECT_LT(dtn_free(n4, {2, 0}, p - 1e-6).value, -1e5);
  EXPECT_GT(dtn_free(n4, {2, 0}, p + 1e-6).value, 1e5);
  EXPECT_NEAR(dtn_free(n4, {2, 0}, p - 1e-3).pole_distance, 1e-3, 1e-5);
}

TEST(DtnN, NoContrastMatchesFree) {
  const auto one = RadialMedium::constant(2, 1.0, 1.0, 0.0, true);
  for (int k : {0, 2, 9})
    for (double l : {-20.0, 0.3, 7.0, 55.0}) {
      EXPECT_NEAR(dtn_n(one, {2, k}, l).value, dtn_free(one, {2, k}, l).value, 1e-12);
      EXPECT_NEAR(dtn_n(one, {2, k}, l, ode_only()).value, dtn_free(one, {2, k}, l, ode_only()).value,
                  1e-12);
      EXPECT_EQ(dtn_diff(one, {2, k}, l).value, 0.0);
    }
}

TEST(DtnDiff, LargeModeDecayForB1) {
  const auto d = dtn_diff(n4, {2, 200}, 1.0);
  EXPECT_NEAR(d.value / -7.5e-3, 1.0, 0.01);
}

TEST(DtnDiff, LargeModeDecayForB2) {
  const auto d = dtn_diff(grazing, {2, 200}, 1.0);
  EXPECT_LT(d.value, 0.0);
  EXPECT_NEAR(d.value / -1.25e-5, 1.0, 0.02);
}

TEST(DtnDiff, AnnulusStaticDifferenceHasNoCancellation) {
  for (int k : {0, 1, 10, 60}) {
    const double q = std::pow(0.8, 2.0 * k);
    const double expect = k == 0 ? 1 / std::log(1.25) : 2.0 * k * q / (1 - q);
    EXPECT_NEAR(dtn_diff(annulus, {2, k}, 0.0).value / expect, 1.0, 1e-12) << k;
    EXPECT_NEAR(dtn_diff(annulus, {2, k}, 0.0, ode_only()).value / expect, 1.0, 1e-8) << k;
  }
}

TEST(DtnDeriv, MatchesClosedFormSlope) {
  for (double l : {0.3, 1.0, 1.4}) {
    const double exact = oracle::disk_k0_slope(4.0, l);
    EXPECT_NEAR(dtn_deriv(n4, {2, 0}, l), exact, 1e-7 * std::abs(exact)) << l;
  }
  EXPECT_NEAR(dtn_deriv(n4, {2, 0}, 2.0, Equation::free), oracle::disk_k0_slope(1.0, 2.0), 1e-7);
}

TEST(DtnDeriv, SmallLambdaLimit) {
  // f ~ k/R - lambda R / (2 (k + 1)) for the free disk.
  EXPECT_NEAR(dtn_deriv(n4, {2, 1}, 1e-6, Equation::free), -0.25, 1e-6);
  EXPECT_NEAR(dtn_deriv(n4, {2, 0}, 1e-6, Equation::free), -0.5, 1e-6);
}

TEST(DtnDeriv, StepCollisionNextToPole) {
  EXPECT_THROW(dtn_deriv(n4, {2, 0}, oracle::frozen::j01_sq + 1e-6, Equation::free), Error);
  try {
    dtn_deriv(n4, {2, 0}, oracle::frozen::j01_sq + 1e-6, Equation::free);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::step_collision);
  }
}

TEST(DtnDeriv, DecreasingBetweenPoles) {
  // Sampled monotonicity across a whole pole gap for closed form and ODE media.
  // Annulus refracted poles sit near 123 p^2.
  for (const auto* m : {&n4, &grazing, &annulus}) {
    const auto poles = dirichlet_poles(*m, Equation::refracted, {2, 1}, 0.1, 600.0, false);
    ASSERT_GE(poles.size(), 2u);
    const double a = poles[0].lambda, b = poles[1].lambda;
    double prev = INFINITY;
    for (int j = 1; j < 40; ++j) {
      const double l = a + (b - a) * j / 40.0;
      const double v = dtn_n(*m, {2, 1}, l).value;
      EXPECT_LT(v, prev) << l;
      prev = v;
      EXPECT_LT(dtn_deriv(*m, {2, 1}, l), 0.0) << l;
    }
  }
}

TEST(Crosscheck, BackendsAgree) {
  EXPECT_LT(crosscheck(n4, {2, 0}, 1.0), 1e-9);
  EXPECT_LT(crosscheck(RadialMedium::constant(2, 1.0, 2.0), {2, 10}, 50.0), 1e-8);
  EXPECT_LT(crosscheck(RadialMedium::constant(2, 1.0, 1.0, 0.0, true), {2, 0}, 3.0), 1e-9);
  EXPECT_LT(crosscheck(annulus, {2, 4}, 33.0), 1e-8);
  EXPECT_LT(crosscheck(RadialMedium::constant(3, 1.0, 4.0), {3, 3}, -40.0), 1e-8);
  EXPECT_THROW(crosscheck(grazing, {2, 0}, 1.0), Error);
}

TEST(Crosscheck, RecordedDiscrepancy) {
  DtnOptions o;
  o.record_discrepancy = true;
  const auto d = dtn_diff(n4, {2, 3}, 12.0, o);
  ASSERT_TRUE(d.discrepancy.has_value());
  EXPECT_LT(*d.discrepancy, 1e-8);
  EXPECT_EQ(d.backend, Backend::bessel);
  EXPECT_FALSE(dtn_diff(n4, {2, 3}, 12.0).discrepancy.has_value());
}

TEST(DtnN, SeriesOracleGrid) {
  // Real and complex lambda against the long-double series, 2D and 3D.
  for (int d : {2, 3})
    for (double n : {0.5, 4.0})
      for (int k : {0, 1, 4, 12})
        for (double l : {-30.0, -1.0, 0.7, 9.0, 20.0}) {
          const auto m = RadialMedium::constant(d, 1.0, n);
          const double ex = oracle::disk_dtn(d, k, 1.0, n, l);
          if (std::abs(ex) > 1e4) continue;
          EXPECT_LT(rel(dtn_n(m, {d, k}, l).value, ex), 1e-11) << d << ' ' << n << ' ' << k << ' ' << l;
          EXPECT_LT(rel(dtn_n(m, {d, k}, l, ode_only()).value, ex), 1e-9);
        }
  for (double th : {0.5, 1.5, 2.5, 3.0}) {
    const cplx l = std::polar(20.0, th);
    const cplx ex = oracle::disk_dtn<cplx>(2, 3, 1.0, 4.0, l);
    EXPECT_LT(std::abs(dtn_n(n4, {2, 3}, l).value - ex) / (1 + std::abs(ex)), 1e-11);
    EXPECT_LT(std::abs(dtn_n(n4, {2, 3}, l, ode_only()).value - ex) / (1 + std::abs(ex)), 1e-9);
  }
}

TEST(DtnN, PiecewiseConstantTransferOracle) {
  const RadialMedium m(2, 1.0, 0.0, PiecewiseProfile{{0.0, 0.5, 1.0}, {Polynomial({3.0}), Polynomial({1.5})}});
  for (int k : {0, 1, 3})
    for (double l : {0.8, 4.0, 11.0}) {
      const double ex = oracle::layered_dtn(k, 3.0, 1.5, 0.5, l);
      EXPECT_LT(rel(dtn_n(m, {2, k}, l).value, ex), 1e-9) << k << ' ' << l;
    }
}

TEST(DtnDiff, ConjugateSymmetry) {
  for (const auto* m : {&n4, &grazing, &annulus})
    for (int k : {0, 5})
      for (double th : {0.4, 1.9, 2.8}) {
        const cplx l = std::polar(13.0, th);
        const cplx a = dtn_diff<cplx>(*m, {2, k}, l).value;
        const cplx b = dtn_diff<cplx>(*m, {2, k}, std::conj(l)).value;
        EXPECT_LT(std::abs(a - std::conj(b)), 1e-12 * (1 + std::abs(a)));
      }
}

TEST(DtnDiff, RealAxisValuesAreReal) {
  for (const auto* m : {&n4, &grazing})
    for (double l : {-9.0, 2.5}) {
      const cplx v = dtn_diff<cplx>(*m, {2, 2}, cplx(l, 0.0)).value;
      EXPECT_LT(std::abs(v.imag()), 1e-13 * (1 + std::abs(v)));
      EXPECT_LT(std::abs(v.real() - dtn_diff(*m, {2, 2}, l).value), 1e-9 * (1 + std::abs(v)));
    }
}

TEST(DtnDiff, DimensionMismatchRejected) {
  EXPECT_THROW(dtn_diff(n4, {3, 1}, 1.0), Error);
}
