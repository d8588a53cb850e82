#include <gtest/gtest.h>

#include <cmath>

#include "itelab/spectra.hpp"
#include "oracles.hpp"

using namespace itelab;

namespace {

const RadialMedium n4 = RadialMedium::constant(2, 1.0, 4.0);
const RadialMedium grazing = RadialMedium::polynomial(2, 1.0, {2.0, 0.0, -1.0});
const RadialMedium annulus = RadialMedium::constant(2, 1.0, 2.0, 0.8);

}  // namespace

TEST(DirichletCount, FreeDiskModeZero) {
  EXPECT_EQ(dirichlet_count(n4, Equation::free, {2, 0}, 30.0), 1);
  EXPECT_EQ(dirichlet_count(n4, Equation::free, {2, 0}, 6.0), 1);
  EXPECT_EQ(dirichlet_count(n4, Equation::free, {2, 0}, 5.0), 0);
  EXPECT_EQ(dirichlet_count(n4, Equation::free, {2, 0}, 31.0), 2);
  EXPECT_EQ(dirichlet_count(n4, Equation::free, {2, 0}, -3.0), 0);
  EXPECT_EQ(dirichlet_count(n4, Equation::refracted, {2, 0}, 1.5), 1);
}

TEST(DirichletCount, OnEigenvalueRaised) {
  try {
    dirichlet_count(n4, Equation::free, {2, 0}, oracle::frozen::j01_sq);
    ADD_FAILURE() << "expected OnEigenvalue";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::on_eigenvalue);
  }
}

TEST(CountN, MatchesBesselZeroEnumeration) {
  EXPECT_EQ(count_N(n4, 100.0), 21);
  EXPECT_EQ(count_N(n4, 100.0), oracle::free_dirichlet_count(2, 100.0));
  EXPECT_EQ(count_N(n4, 333.0), oracle::free_dirichlet_count(2, 333.0));
  const auto ball = RadialMedium::constant(3, 1.0, 4.0);
  EXPECT_EQ(count_N(ball, 150.0), oracle::free_dirichlet_count(3, 150.0));
}

TEST(CountN, RefractedIsFreeAtScaledLambda) {
  // For constant n the refracted spectrum is the free one divided by n.
  for (double l : {7.0, 40.0, 91.0}) EXPECT_EQ(count_Nn(n4, l), count_N(n4, 4.0 * l));
}

TEST(CountN, MonotoneWithUnitModeSteps) {
  int prev = 0;
  for (int j = 1; j <= 400; ++j) {
    const double l = 0.25 * j;
    const int c = dirichlet_count(grazing, Equation::refracted, {2, 2}, l);
    EXPECT_GE(c, prev);
    EXPECT_LE(c - prev, 1) << l;
    prev = c;
  }
  EXPECT_GT(prev, 0);
}

TEST(CountN, WeylLeadingTerm) {
  // Unit disk: N(lambda) ~ lambda/4 - sqrt(lambda)/2, the second term from the
  // perimeter. The remainder is o(sqrt(lambda)).
  for (double l : {500.0, 2000.0}) {
    const double two_term = l / 4 - std::sqrt(l) / 2;
    EXPECT_NEAR(double(count_N(n4, l)), two_term, 0.1 * std::sqrt(l)) << l;
    EXPECT_LT(double(count_N(n4, l)) / l, 0.25);
  }
}

TEST(DirichletPoles, FreeModeZeroAndResidues) {
  const auto poles = dirichlet_poles(n4, Equation::free, {2, 0}, 1.0, 40.0);
  ASSERT_EQ(poles.size(), 2u);
  EXPECT_NEAR(poles[0].lambda, oracle::frozen::j01_sq, 1e-9 * oracle::frozen::j01_sq);
  EXPECT_NEAR(poles[1].lambda, oracle::frozen::j02_sq, 1e-9 * oracle::frozen::j02_sq);
  EXPECT_NEAR(poles[0].lambda, oracle::bessel_zero_sq(0, 1), 1e-9 * poles[0].lambda);
  for (const auto& p : poles) {
    // Residue of the disk value is 2 lambda0 / R^2 x R for every mode.
    EXPECT_EQ(p.residue_sign, 1);
    EXPECT_NEAR(p.residue_below / (2 * p.lambda), 1.0, 1e-6);
    EXPECT_NEAR(p.residue_above / (2 * p.lambda), 1.0, 1e-6);
  }
}

TEST(DirichletPoles, RefractedIsScaledFree) {
  for (int k : {0, 1, 3}) {
    const auto f = dirichlet_poles(n4, Equation::free, {2, k}, 0.5, 120.0, false);
    const auto r = dirichlet_poles(n4, Equation::refracted, {2, k}, 0.1, 30.0, false);
    ASSERT_EQ(f.size(), r.size()) << k;
    for (std::size_t i = 0; i < f.size(); ++i)
      EXPECT_NEAR(r[i].lambda, f[i].lambda / 4.0, 1e-9 * f[i].lambda) << k;
  }
  const auto r = dirichlet_poles(n4, Equation::refracted, {2, 1}, 1.0, 6.0, false);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_NEAR(r[0].lambda, oracle::frozen::j11_sq / 4.0, 1e-9);
}

TEST(DirichletPoles, EmptyBelowGround) {
  EXPECT_TRUE(dirichlet_poles(n4, Equation::free, {2, 0}, 0.1, 5.0).empty());
  EXPECT_TRUE(dirichlet_poles(n4, Equation::free, {2, 0}, 5.0, 5.0).empty());
}

TEST(DirichletPoles, VariableProfileResiduesAgreeAndArePositive) {
  for (const auto* m : {&grazing, &annulus})
    for (int k : {0, 2}) {
      const auto poles = dirichlet_poles(*m, Equation::refracted, {2, k}, 0.5, 300.0);
      ASSERT_FALSE(poles.empty());
      for (const auto& p : poles) {
        EXPECT_EQ(p.residue_sign, 1) << p.lambda;
        EXPECT_NEAR(p.residue_below, p.residue_above, 1e-6 * std::abs(p.residue_above)) << p.lambda;
      }
    }
}

TEST(DirichletPoles, ThreeDimensionalResidue) {
  const auto ball = RadialMedium::constant(3, 1.0, 4.0);
  const auto poles = dirichlet_poles(ball, Equation::free, {3, 0}, 1.0, 50.0);
  ASSERT_EQ(poles.size(), 2u);
  // j_0 zeros are p pi.
  EXPECT_NEAR(poles[0].lambda, M_PI * M_PI, 1e-8);
  EXPECT_NEAR(poles[1].lambda, 4 * M_PI * M_PI, 1e-8);
  EXPECT_NEAR(poles[0].residue_below / (2 * poles[0].lambda), 1.0, 1e-6);
}

TEST(GroundEigenvalue, ModeZero) {
  EXPECT_NEAR(ground_eigenvalue(n4, Equation::free, {2, 0}), oracle::frozen::j01_sq, 1e-8);
  EXPECT_NEAR(ground_eigenvalue(n4, Equation::refracted, {2, 0}), oracle::frozen::j01_sq / 4, 1e-8);
  // Ground eigenvalue grows with the mode index.
  double prev = 0.0;
  for (int k = 0; k < 6; ++k) {
    const double g = ground_eigenvalue(grazing, Equation::refracted, {2, k});
    EXPECT_GT(g, prev);
    prev = g;
  }
}
