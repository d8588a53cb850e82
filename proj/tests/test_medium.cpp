#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "itelab/config.hpp"
#include "itelab/medium.hpp"
#include "itelab/mode.hpp"

using namespace itelab;
using std::numbers::pi;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::config_error;
}

RadialMedium layered() {
  return RadialMedium(2, 1.0, 0.0,
                      PiecewiseProfile{{0.0, 0.5, 1.0}, {Polynomial({3.0}), Polynomial({2.0, 0.0, -1.0})}});
}

}  // namespace

TEST(Polynomial, HornerValueAndDerivative) {
  Polynomial p({2.0, 0.0, -1.0});
  EXPECT_DOUBLE_EQ(p(0.0), 2.0);
  EXPECT_DOUBLE_EQ(p(1.0), 1.0);
  EXPECT_DOUBLE_EQ(p(0.5), 1.75);
  EXPECT_DOUBLE_EQ(p.derivative(1.0), -2.0);
  EXPECT_DOUBLE_EQ(p.derivative(0.25), -0.5);
  EXPECT_EQ(p.degree(), 2u);
  EXPECT_DOUBLE_EQ(Polynomial(std::vector<double>{})(3.0), 0.0);
}

TEST(Validate, ConstantAboveOneIsB1PlusOne) {
  const auto m = RadialMedium::constant(2, 1.0, 4.0);
  const auto info = validate(m);
  EXPECT_EQ(info.cls, BoundaryClass::b1);
  EXPECT_EQ(info.order, 1);
  EXPECT_EQ(sigma(m), 1);
}

TEST(Validate, ConstantBelowOneFlipsSigma) {
  EXPECT_EQ(sigma(RadialMedium::constant(2, 1.0, 0.5)), -1);
}

TEST(Validate, GrazingProfileIsB2) {
  const auto m = RadialMedium::polynomial(2, 1.0, {2.0, 0.0, -1.0});
  const auto info = validate(m);
  EXPECT_EQ(info.cls, BoundaryClass::b2);
  EXPECT_EQ(info.order, 2);
  EXPECT_EQ(sigma(m), 1);
  // n = (1 + r^2)/2 meets 1 at R with positive slope.
  EXPECT_EQ(sigma(RadialMedium::polynomial(2, 1.0, {0.5, 0.0, 0.5})), -1);
}

TEST(Validate, NoContrastIsAmbiguous) {
  EXPECT_EQ(code_of([] { validate(RadialMedium::constant(2, 1.0, 1.0)); }),
            ErrorCode::ambiguous_boundary);
  // n'(R) = 0 with n(R) = 1 but nontrivial inside.
  EXPECT_EQ(code_of([] { validate(RadialMedium::polynomial(2, 1.0, {2.0, -2.0, 1.0})); }),
            ErrorCode::ambiguous_boundary);
}

TEST(Validate, TestModeAdmitsDegenerateMedium) {
  const auto m = RadialMedium::constant(2, 1.0, 1.0, 0.0, true);
  EXPECT_EQ(validate(m).cls, BoundaryClass::degenerate);
  EXPECT_EQ(validate(m).order, 0);
}

TEST(Validate, NonpositiveProfileRejected) {
  EXPECT_EQ(code_of([] { validate(RadialMedium::polynomial(2, 1.0, {1.0, 0.0, -2.0})); }),
            ErrorCode::nonpositive_profile);
  EXPECT_EQ(code_of([] { validate(RadialMedium::constant(3, 1.0, 0.0)); }),
            ErrorCode::nonpositive_profile);
  // Negative only inside the obstacle: fine.
  EXPECT_NO_THROW(validate(RadialMedium::polynomial(2, 1.0, {-1.0, 3.0}, 0.5)));
}

TEST(Validate, Idempotent) {
  const auto m = layered();
  const auto a = validate(m), b = validate(m);
  EXPECT_EQ(a.cls, b.cls);
  EXPECT_EQ(a.order, b.order);
  EXPECT_EQ(a.cls, BoundaryClass::b2);
}

TEST(Validate, SigmaFlipsUnderReflectionAboutOne) {
  // n -> 2 - n mirrors n(R) - 1 and n'(R), so sigma must flip.
  for (double c : {0.1, 0.3, 0.7, 0.99, 1.01, 1.5, 1.9}) {
    EXPECT_EQ(sigma(RadialMedium::constant(2, 1.0, c)), -sigma(RadialMedium::constant(2, 1.0, 2.0 - c)))
        << c;
  }
  for (double s : {-3.0, -0.5, 0.25, 2.0}) {
    // n = 1 + s (r - 1) + 0.1 (r - 1)^2 and its mirror, both B2 at R = 1.
    const auto up = RadialMedium::polynomial(2, 1.0, {1.0 - s + 0.1, s - 0.2, 0.1});
    const auto dn = RadialMedium::polynomial(2, 1.0, {1.0 + s - 0.1, -s + 0.2, -0.1});
    if (up.min_n() <= 0 || dn.min_n() <= 0) continue;
    EXPECT_EQ(sigma(up), -sigma(dn)) << s;
  }
}

TEST(Constructor, RejectsBadGeometry) {
  EXPECT_EQ(code_of([] { RadialMedium::constant(4, 1.0, 2.0); }), ErrorCode::config_error);
  EXPECT_EQ(code_of([] { RadialMedium::constant(2, -1.0, 2.0); }), ErrorCode::config_error);
  EXPECT_EQ(code_of([] { RadialMedium::constant(2, 1.0, 2.0, 1.0); }), ErrorCode::config_error);
  EXPECT_EQ(code_of([] {
              RadialMedium(2, 1.0, 0.0, PiecewiseProfile{{0.0, 0.7, 0.5, 1.0},
                                                         {Polynomial({1.5}), Polynomial({2.0}), Polynomial({2.0})}});
            }),
            ErrorCode::config_error);
  EXPECT_EQ(code_of([] {
              RadialMedium(2, 1.0, 0.0, PiecewiseProfile{{0.0, 0.9}, {Polynomial({1.5})}});
            }),
            ErrorCode::config_error);
}

TEST(Profile, PiecewiseEvaluatesOwningPiece) {
  const auto m = layered();
  EXPECT_DOUBLE_EQ(m.n(0.2), 3.0);
  EXPECT_DOUBLE_EQ(m.n(0.75), 2.0 - 0.5625);
  EXPECT_DOUBLE_EQ(m.n(1.0), 1.0);
  EXPECT_DOUBLE_EQ(m.dn(1.0), -2.0);
  ASSERT_EQ(m.breakpoints().size(), 1u);
  EXPECT_DOUBLE_EQ(m.breakpoints()[0], 0.5);
  EXPECT_DOUBLE_EQ(m.max_n(), 3.0);
}

TEST(Gamma, ClosedForms) {
  EXPECT_NEAR(gamma(RadialMedium::constant(2, 1.0, 4.0)), -3 * pi, 1e-10);
  EXPECT_NEAR(gamma(RadialMedium::constant(2, 1.0, 2.0, 0.8)), 0.28 * pi, 1e-10);
  EXPECT_NEAR(gamma(RadialMedium::polynomial(2, 1.0, {2.0, 0.0, -1.0})), -pi / 2, 1e-10);
  EXPECT_NEAR(gamma(RadialMedium::constant(2, 1.0, 0.5)), -pi / 2, 1e-10);
  EXPECT_NEAR(gamma(RadialMedium::constant(3, 1.0, 4.0)), -28 * pi / 3, 1e-9);
  EXPECT_NEAR(gamma(layered()), -0.78125 * pi, 1e-10);
  const double shell = 4 * pi / 3 * (1 - std::pow(2.0, 1.5) * 0.875);
  EXPECT_NEAR(gamma(RadialMedium::constant(3, 1.0, 2.0, 0.5)), shell, 1e-9);
}

TEST(Gamma, StableUnderTighterTolerance) {
  const auto m = RadialMedium::polynomial(3, 1.3, {1.7, 0.4, -0.9, 0.05});
  EXPECT_NEAR(gamma(m, 1e-8), gamma(m, 1e-12), 1e-8 * std::abs(gamma(m, 1e-12)));
}

TEST(Gamma, RadiusScaling) {
  // Vol and the profile integral scale as R^d for n(r) = c.
  const double g1 = gamma(RadialMedium::constant(2, 1.0, 3.0));
  EXPECT_NEAR(gamma(RadialMedium::constant(2, 2.0, 3.0)), 4 * g1, 1e-9);
  const double h1 = gamma(RadialMedium::constant(3, 1.0, 3.0));
  EXPECT_NEAR(gamma(RadialMedium::constant(3, 2.0, 3.0)), 8 * h1, 1e-8);
}

TEST(Mode, MultiplicityAndOrders) {
  EXPECT_EQ((ModeIndex{2, 0}).multiplicity(), 1);
  EXPECT_EQ((ModeIndex{2, 5}).multiplicity(), 2);
  EXPECT_EQ((ModeIndex{3, 0}).multiplicity(), 1);
  EXPECT_EQ((ModeIndex{3, 4}).multiplicity(), 9);
  EXPECT_DOUBLE_EQ((ModeIndex{3, 4}).laplace_beltrami(2.0), 5.0);
  EXPECT_DOUBLE_EQ((ModeIndex{2, 4}).laplace_beltrami(2.0), 4.0);
  EXPECT_DOUBLE_EQ((ModeIndex{3, 2}).bessel_order(), 2.5);
}

TEST(Config, ParsesAllProfileKinds) {
  auto c = parse_config(
      "[medium]\ndimension = 2\nouter_radius = 1\nprofile = constant\nvalue = 4 ; inline comment\n"
      "[run]\nlambda_max = 60\ngrid = 12\n");
  EXPECT_TRUE(c.medium.is_constant());
  EXPECT_DOUBLE_EQ(c.medium.constant_value(), 4.0);
  EXPECT_DOUBLE_EQ(*c.run.lambda_max, 60.0);
  EXPECT_EQ(*c.run.grid, 12);
  EXPECT_FALSE(c.run.kmax.has_value());

  c = parse_config("[medium]\ndimension=3\nouter_radius=2\nobstacle_radius=0.5\nprofile=polynomial\n"
                   "coefficients = 2, 0, -0.25\n");
  EXPECT_EQ(c.medium.dimension(), 3);
  EXPECT_DOUBLE_EQ(c.medium.n(2.0), 1.0);

  c = parse_config("[medium]\ndimension=2\nouter_radius=1\nprofile=piecewise\nbreaks=0,0.5,1\n"
                   "piece0=3\npiece1=2,0,-1\n");
  EXPECT_DOUBLE_EQ(c.medium.n(0.25), 3.0);
  EXPECT_DOUBLE_EQ(c.medium.n(1.0), 1.0);
}

TEST(Config, HashTracksContents) {
  const std::string a = "[medium]\ndimension=2\nouter_radius=1\nprofile=constant\nvalue=4\n";
  EXPECT_EQ(parse_config(a).hash, parse_config(a).hash);
  EXPECT_NE(parse_config(a).hash, parse_config(a + "\n").hash);
  EXPECT_EQ(fnv1a(""), 2166136261u);
  EXPECT_EQ(fnv1a("a"), 0xe40c292cu);
}

TEST(Config, ErrorsAreConfigErrors) {
  for (const char* bad : {
           "[medium]\nouter_radius=1\nprofile=constant\nvalue=4\n",
           "[medium]\ndimension=2\nouter_radius=1\nprofile=spline\n",
           "[medium]\ndimension=2\nouter_radius=1\nprofile=polynomial\ncoefficients=1,x\n",
           "[medium]\ndimension=2\nouter_radius=1\nprofile=piecewise\nbreaks=0,0.5,1\npiece0=3\n",
           "[medium]\ndimension=2\nouter_radius=1\nprofile=constant\nvalue=4\ntest_mode=maybe\n",
           "[medium\n",
       }) {
    EXPECT_EQ(code_of([&] { parse_config(bad); }), ErrorCode::config_error) << bad;
  }
  EXPECT_EQ(code_of([] { load_config("/nonexistent/medium.ini"); }), ErrorCode::config_error);
}
