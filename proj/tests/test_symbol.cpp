#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "itelab/symbol.hpp"

using namespace itelab;
using cplx = std::complex<double>;

namespace {

const RadialMedium n4 = RadialMedium::constant(2, 1.0, 4.0);
const RadialMedium grazing = RadialMedium::polynomial(2, 1.0, {2.0, 0.0, -1.0});
const RadialMedium ball = RadialMedium::constant(3, 1.0, 4.0);
const RadialMedium layered(2, 1.0, 0.0,
                           PiecewiseProfile{{0.0, 0.5, 1.0}, {Polynomial({3.0}), Polynomial({2.0, 0.0, -1.0})}});

}  // namespace

TEST(ExpectedF0, Examples) {
  EXPECT_NEAR(expected_f0(n4, 3.0, 0.0).real(), 3.0, 1e-15);
  EXPECT_NEAR(expected_f0(n4, 10.0, -9.0).real(), std::sqrt(136.0), 1e-12);
  const auto f = dtn_free(n4, {2, 100}, -50.0).value;
  EXPECT_NEAR(f / std::sqrt(100.0 * 100.0 + 50.0), 1.0, 1e-2);
  // Positive real part on the cut-free branch.
  EXPECT_GT(expected_f0(n4, 1.0, cplx(5.0, 1e-3)).real(), 0.0);
}

TEST(ExpectedF0, BranchSingularity) {
  try {
    expected_f0(n4, 2.0, 1.0);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::on_branch_singularity);
  }
}

TEST(ExpectedDiff, Examples) {
  EXPECT_NEAR(expected_diff_symbol(n4, 200.0, 1.0).real(), -7.5e-3, 1e-15);
  EXPECT_NEAR(expected_diff_symbol(grazing, 200.0, 1.0).real(), -1.25e-5, 1e-18);
  EXPECT_EQ(expected_diff_symbol(n4, 50.0, 0.0), cplx(0.0));
  EXPECT_EQ(expected_diff_symbol(RadialMedium::constant(2, 1.0, 1.0, 0.0, true), 5.0, 3.0), cplx(0.0));
}

TEST(StaticValue, IndependentOfProfile) {
  // At lambda = 0 the refracted value does not see n.
  for (const auto* m : {&n4, &grazing, &layered})
    for (int k : {0, 4, 30}) EXPECT_NEAR(dtn_n(*m, {2, k}, 0.0).value, double(k), 1e-12);
}

TEST(AsymptoticLimit, ClassB1ConvergesMonotonically) {
  const auto r = asymptotic_limit_check(n4, 1.0, {50, 100, 200, 400});
  ASSERT_EQ(r.size(), 4u);
  EXPECT_NEAR(r.back().ratio, 1.0, 5e-3);
  for (std::size_t i = 1; i < r.size(); ++i)
    EXPECT_LT(std::abs(r[i].ratio - 1), std::abs(r[i - 1].ratio - 1));
}

TEST(AsymptoticLimit, ClassB2SignAndRatio) {
  const auto r = asymptotic_limit_check(grazing, 1.0, {100, 400});
  EXPECT_LT(r.back().d, 0.0);
  EXPECT_LT(r.back().expected, 0.0);
  EXPECT_NEAR(r.back().ratio, 1.0, 0.02);
  const auto l = asymptotic_limit_check(layered, 1.0, {400});
  EXPECT_NEAR(l.back().ratio, 1.0, 0.02);
}

TEST(AsymptoticLimit, ThreeDimensions) {
  const auto r = asymptotic_limit_check(ball, 1.0, {400});
  EXPECT_NEAR(r.back().ratio, 1.0, 1e-2);
}

TEST(OrderFit, SlopeMatchesClass) {
  const std::vector<int> ks{50, 100, 200, 400};
  EXPECT_NEAR(order_fit(n4, 1.0, ks).slope, -1.0, 0.05);
  EXPECT_NEAR(order_fit(ball, 1.0, ks).slope, -1.0, 0.05);
  EXPECT_NEAR(order_fit(grazing, 1.0, ks).slope, -2.0, 0.05);
  EXPECT_NEAR(order_fit(layered, 1.0, ks).slope, -2.0, 0.05);
}

TEST(OrderFit, DegenerateInputs) {
  const auto one = RadialMedium::constant(2, 1.0, 1.0, 0.0, true);
  auto code = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::config_error;
  };
  EXPECT_EQ(code([&] { order_fit(one, 1.0, {50, 100}); }), ErrorCode::degenerate_fit);
  EXPECT_EQ(code([&] { order_fit(n4, 1.0, {50}); }), ErrorCode::degenerate_fit);
  EXPECT_EQ(code([&] { order_fit(n4, 1.0, {50, 50}); }), ErrorCode::degenerate_fit);
}

TEST(SymbolFrequency, CircleAndSphere) {
  EXPECT_DOUBLE_EQ(symbol_frequency({2, 7}, 2.0), 3.5);
  EXPECT_DOUBLE_EQ(symbol_frequency({3, 3}, 1.0), std::sqrt(12.0));
}
