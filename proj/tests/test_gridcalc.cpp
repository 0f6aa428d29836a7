#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "jpr/gridcalc.hpp"

using namespace jpr;

namespace {

RealGrid gauss1d(std::size_t n, double lo = -8.0, double hi = 8.0) {
  return RealGrid::tabulate({Axis("X", lo, hi, n)}, [](auto c) { return std::exp(-c[0] * c[0]); });
}

double at_x(const RealGrid& f, double x) { return f[f.axis(0).nearest(x)]; }

}  // namespace

TEST(Axis, Basics) {
  Axis a("X", -8, 8, 161);
  EXPECT_DOUBLE_EQ(a.spacing(), 0.1);
  EXPECT_NEAR(a[80], 0.0, 1e-15);
  EXPECT_EQ(a.nearest(1.0), 90u);
  EXPECT_THROW(Axis("X", 1, 0, 10), Error);
  EXPECT_THROW(Axis("X", 0, 1, 2), Error);
}

TEST(GridFn, LayoutIsRowMajor) {
  auto f = RealGrid::tabulate({Axis("a", 0, 2, 3), Axis("b", 0, 3, 4)},
                              [](auto c) { return 10 * c[0] + c[1]; });
  EXPECT_DOUBLE_EQ(f.at({1, 2}), 12.0);
  EXPECT_EQ(f.stride(0), 4u);
  EXPECT_EQ(f.unflatten(7), (std::vector<std::size_t>{1, 3}));
  EXPECT_EQ(f.axis_index("b"), 1u);
  EXPECT_THROW(f.axis_index("c"), Error);
}

TEST(Derivative, GaussianOracle) {
  auto d = derivative(gauss1d(161), 0);
  EXPECT_NEAR(at_x(d, 1.0), -2.0 * std::exp(-1.0), 1e-6);
  auto d2 = derivative(gauss1d(161), 0, 2);
  EXPECT_NEAR(at_x(d2, 0.0), -2.0, 1e-6);
  EXPECT_NEAR(at_x(d2, 1.0), 2.0 * std::exp(-1.0), 1e-6);
}

TEST(Derivative, PolynomialExactIncludingBoundary) {
  auto f = RealGrid::tabulate({Axis("x", -1, 2, 31)}, [](auto c) { return std::pow(c[0], 5) - 3 * c[0]; });
  auto d = derivative(f, 0);
  for (std::size_t i = 0; i < d.size(); ++i) {
    double x = d.axis(0)[i];
    EXPECT_NEAR(d[i], 5 * std::pow(x, 4) - 3, 1e-8);
  }
}

TEST(Derivative, ConvergenceOrder) {
  // Halving h should cut the error by at least 2^3 at accuracy 4.
  auto err = [](std::size_t n) {
    auto f = RealGrid::tabulate({Axis("x", -3, 3, n)}, [](auto c) { return std::sin(2 * c[0]); });
    auto d = derivative(f, 0, 1, 4);
    double e = 0;
    for (std::size_t i = 0; i < n; ++i) e = std::max(e, std::abs(d[i] - 2 * std::cos(2 * d.axis(0)[i])));
    return e;
  };
  EXPECT_GT(err(41) / err(81), 8.0);
}

TEST(Derivative, RejectsBadInput) {
  auto f = gauss1d(161);
  EXPECT_THROW(derivative(f, 0, 3), Error);
  EXPECT_THROW(derivative(f, 1), Error);
  EXPECT_THROW(derivative(gauss1d(6), 0), Error);
}

TEST(Derivative, Linearity) {
  auto f = gauss1d(161);
  auto g = RealGrid::tabulate(f.axes(), [](auto c) { return std::exp(-(c[0] - 1) * (c[0] - 1)); });
  auto lhs = derivative(2.0 * f + g, 0);
  auto rhs = 2.0 * derivative(f, 0) + derivative(g, 0);
  EXPECT_LT(max_abs(lhs - rhs), 1e-12);
}

TEST(InverseDerivative, ErfOracle) {
  auto f = gauss1d(161);
  auto F = inverse_derivative(f, 0);
  EXPECT_TRUE(F.warnings().empty());
  for (std::size_t i = 0; i < F.size(); ++i) {
    double x = F.axis(0)[i];
    EXPECT_NEAR(F[i], 0.5 * std::sqrt(std::numbers::pi) * (1 + std::erf(x)), 1e-6);
  }
}

TEST(InverseDerivative, RoundTripsAndIterates) {
  auto f = RealGrid::tabulate({Axis("X", -8, 8, 161)}, [](auto c) { return (c[0] - 0.3) * std::exp(-c[0] * c[0]); });
  auto back = derivative(inverse_derivative(f, 0), 0);
  EXPECT_LT(max_abs(back - f), 1e-6);
  auto twice = inverse_derivative(f, 0, 2);
  auto iter = inverse_derivative(inverse_derivative(f, 0), 0);
  EXPECT_LT(max_abs(twice - iter), 1e-10);
}

TEST(InverseDerivative, WarnsWithoutDecay) {
  auto f = RealGrid::tabulate({Axis("X", -8, 8, 161)}, [](auto) { return 1.0; });
  auto F = inverse_derivative(f, 0);
  ASSERT_EQ(F.warnings().size(), 1u);
}

TEST(InverseDerivative, AlongSecondAxisOfComplexGrid) {
  auto f = ComplexGrid::tabulate({Axis("a", 0, 1, 3), Axis("X", -8, 8, 161)},
                                 [](auto c) { return cplx(1 + c[0], -c[0]) * std::exp(-c[1] * c[1]); });
  auto F = inverse_derivative(f, 1);
  double sp = std::sqrt(std::numbers::pi);
  EXPECT_NEAR(std::abs(F.at({2, 160}) - cplx(2, -1) * sp), 0.0, 1e-8);
}

TEST(Integrate, Gaussian2D) {
  Axis m("mu", -4.5, 4.5, 97), n("nu", -4.5, 4.5, 97);
  auto g = RealGrid::tabulate({m, n}, [](auto c) {
    return std::exp(-c[0] * c[0] - c[1] * c[1]) / std::numbers::pi;
  });
  EXPECT_NEAR(integrate_all(g), 1.0, 1e-6);
  auto partial = integrate(g, {1});
  ASSERT_EQ(partial.rank(), 1u);
  EXPECT_EQ(partial.axis(0).name(), "mu");
  EXPECT_NEAR(partial[48], 1.0 / std::sqrt(std::numbers::pi), 1e-8);
}

TEST(Integrate, TrapezoidConvergence) {
  auto err = [](std::size_t n) {
    auto f = RealGrid::tabulate({Axis("x", 0, 1, n)}, [](auto c) { return c[0] * c[0]; });
    return std::abs(integrate_all(f) - 1.0 / 3.0);
  };
  EXPECT_GT(err(11) / err(21), 3.5);
}

TEST(Interpolate, ExactAtNodesAndLinear) {
  auto f = RealGrid::tabulate({Axis("a", 0, 1, 5), Axis("b", -1, 1, 9)},
                              [](auto c) { return 2 * c[0] - 3 * c[1] + c[0] * c[1]; });
  EXPECT_DOUBLE_EQ(interpolate(f, {0.25, 0.5}), f.at({1, 6}));
  EXPECT_NEAR(interpolate(f, {0.3, 0.1}), 0.6 - 0.3 + 0.03, 1e-12);
  EXPECT_THROW(interpolate(f, {1.5, 0.0}), Error);
}

TEST(BSpline2D, SmoothFunctionAccuracy) {
  Axis a("q", -8, 8, 161), b("p", -8, 8, 161);
  auto f = RealGrid::tabulate({a, b}, [](auto c) { return std::exp(-c[0] * c[0] - 0.5 * c[1] * c[1]); });
  BSpline2D s(a, b, f.values());
  double e = 0;
  for (double x = -2; x <= 2; x += 0.037)
    for (double y = -2; y <= 2; y += 0.041)
      e = std::max(e, std::abs(s(x, y) - std::exp(-x * x - 0.5 * y * y)));
  EXPECT_LT(e, 1e-5);
  EXPECT_NEAR(s(a[10], b[20]), f.at({10, 20}), 1e-12);
  EXPECT_EQ(s(20, 0), 0.0);
}
