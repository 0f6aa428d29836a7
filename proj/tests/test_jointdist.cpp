#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "jpr/jointdist.hpp"

using namespace jpr;

namespace {

const OscillatorParams kDefault{};
Axis small_mu() { return Axis("mu", -4.5, 4.5, 25); }
Axis small_nu() { return Axis("nu", -4.5, 4.5, 25); }

double factorial(int n) { return std::tgamma(n + 1.0); }

}  // namespace

TEST(Prior, P1Values) {
  EXPECT_NEAR(prior_value(GaussianPrior{}, 0, 0), 1 / std::numbers::pi, 1e-15);
  auto g = prior_eval(GaussianPrior{}, {default_mu_axis(), default_nu_axis()});
  EXPECT_NEAR(integrate_all(g), 1.0, 1e-6);
  EXPECT_THROW(prior_eval(GaussianPrior{0, 0, -1, 1}, {default_mu_axis(), default_nu_axis()}), Error);
}

TEST(Prior, P2NormalizationAndPositivity) {
  GaussianSumPrior p;
  auto g = prior_eval(p, {default_theta_axis()});
  EXPECT_NEAR(integrate_all(g, Quadrature::high_order), 1.0, 1e-8);
  EXPECT_NEAR(integrate_all(g), 1.0, 1e-4);
  for (double v : g.values()) EXPECT_GT(v, 0.0);
  GaussianSumPrior wide({{1.0, std::numbers::pi / 2, 10.0}});
  auto w = prior_eval(wide, {default_theta_axis()});
  for (double v : w.values()) EXPECT_NEAR(v, 1 / std::numbers::pi, 2e-2);
  EXPECT_NO_THROW(GaussianSumPrior({{0.7, 1.0, 0.5}, {0.3, 2.0, 0.5}}));
  EXPECT_THROW(GaussianSumPrior({{0.7, 1.0, 0.5}, {0.4, 2.0, 0.5}}), Error);
  EXPECT_THROW(GaussianSumPrior({{1.0, 1.0, 0.0}}), Error);
  EXPECT_THROW(prior_eval(p, {Axis("theta", -0.5, 1, 11)}), Error);
}

TEST(Prior, LogDerivativeClosedForm) {
  auto axes = std::vector<Axis>{default_mu_axis(), default_nu_axis()};
  auto L = prior_log_derivative(GaussianPrior{}, axes, "mu");
  const std::size_t i1 = default_mu_axis().nearest(1.0);
  EXPECT_NEAR(L.at({i1, 10}), -2.0 * default_mu_axis()[i1], 1e-12);

  GaussianPrior p{0.5, -0.3, 1.3, 1.2};
  auto P = prior_eval(p, axes);
  auto dP = derivative(P, 1);
  auto Ln = prior_log_derivative(p, axes, "nu");
  // bulk of the prior, |nu − nu0| ≤ 2 zeta
  for (std::size_t i = 10; i < 87; i += 7)
    for (std::size_t j = 0; j < 97; ++j)
      if (std::abs(axes[1][j] - p.nu0) <= 2 * p.zeta) {
        EXPECT_NEAR(dP.at({i, j}) / P.at({i, j}), Ln.at({i, j}), 1e-6);
      }

  GaussianSumPrior s;
  auto th = std::vector<Axis>{default_theta_axis()};
  auto Q = prior_eval(s, th);
  auto dQ = derivative(Q, 0);
  auto Lt = prior_log_derivative(s, th, "theta");
  for (std::size_t i = 5; i < 176; ++i) EXPECT_NEAR(dQ[i] / Q[i], Lt[i], 1e-6);

  GaussianSumPrior one({{1.0, 1.2, 0.6}});
  auto L1 = prior_log_derivative(one, th, "theta");
  for (std::size_t i = 0; i < 181; ++i)
    EXPECT_NEAR(L1[i], -2 * (default_theta_axis()[i] - 1.2) / 0.36, 1e-12);
}

TEST(Prior, UnderflowIsAnError) {
  GaussianPrior narrow{0, 0, 0.05, 0.05};
  EXPECT_THROW(prior_log_derivative(narrow, {default_mu_axis(), default_nu_axis()}, "mu"), Error);
}

TEST(Prior, DerivativeRatioMatchesFiniteDifference) {
  GaussianPrior p{0.2, 0.1, 0.9, 1.4};
  auto axes = std::vector<Axis>{default_mu_axis(), default_nu_axis()};
  auto P = prior_eval(p, axes);
  auto d21 = derivative(derivative(P, 0, 2), 1, 1);
  for (std::size_t i = 20; i < 77; i += 9)
    for (std::size_t j = 20; j < 77; j += 9) {
      const double mu = axes[0][i], nu = axes[1][j];
      EXPECT_NEAR(d21.at({i, j}), prior_derivative_ratio(p, 2, 1, mu, nu) * P.at({i, j}), 1e-6);
    }
}

TEST(Prior, MomentIdentity) {
  const std::vector<GaussianPrior> priors{{0, 0, 1, 1}, {0.7, -0.4, 0.5, 1.5}, {-1, 1, 2, 0.5}, {1, 1, 2, 2}};
  for (const auto& p : priors) {
    for (int k = 0; k <= 3; ++k)
      for (int l = 0; l <= 3; ++l) {
        const double expect = ((k + l) % 2 ? -1.0 : 1.0) * factorial(k) * factorial(l);
        EXPECT_NEAR(prior_moment_integral(p, k, l), expect, 1e-6) << k << "," << l;
        // derivative order above the exponent integrates to zero
        if (k > 0) {
          EXPECT_NEAR(prior_moment_integral(p, k, l, k - 1, l), 0.0, 1e-8);
        }
        if (l > 0) {
          EXPECT_NEAR(prior_moment_integral(p, k, l, k, l - 1), 0.0, 1e-8);
        }
      }
  }
  EXPECT_NEAR(prior_moment_integral(GaussianPrior{}, 1, 0), -1.0, 1e-10);
  EXPECT_NEAR(prior_moment_integral(GaussianPrior{}, 2, 1), -2.0, 1e-10);
}

TEST(Joint, BayesRoundTrip) {
  auto axes = std::vector<Axis>{default_x_axis(), small_mu(), small_nu()};
  auto T = tomogram_analytic(Fock{0}, kDefault, Representation::symplectic, axes);
  auto J = make_joint(T, GaussianPrior{});
  EXPECT_NEAR(integrate_all(J.grid), 1.0, 1e-3);
  const std::size_t i = small_mu().nearest(1.5), j = small_nu().nearest(0);
  const double mu = small_mu()[i];
  EXPECT_NEAR(J.grid.at({80, i, j}), std::exp(-mu * mu) / (std::pow(std::numbers::pi, 1.5) * mu), 1e-6);
  auto back = recover_conditional(J);
  EXPECT_LT(max_abs(back.grid - T.grid), 1e-10);
  EXPECT_THROW(make_joint(T, GaussianSumPrior{}), Error);
}

TEST(Joint, DefaultGridValueOracle) {
  auto T = tomogram_analytic(Fock{0}, kDefault, Representation::symplectic,
                             {default_x_axis(), default_mu_axis(), default_nu_axis()});
  auto J = make_joint(T, GaussianPrior{});
  // M̃(0,1,0) = e⁻¹/π^{3/2}; mu = 1 falls between nodes, so interpolate
  const double v = interpolate(J.grid, {0.0, 1.0, 0.0});
  EXPECT_NEAR(v, std::exp(-1.0) / std::pow(std::numbers::pi, 1.5), 1e-3);
  const std::size_t i = default_mu_axis().nearest(1.0), j = default_nu_axis().nearest(0.0);
  const double mu = default_mu_axis()[i];
  EXPECT_NEAR(J.grid.at({80, i, j}), std::exp(-mu * mu) / (std::pow(std::numbers::pi, 1.5) * mu), 1e-10);
  EXPECT_NEAR(integrate_all(J.grid), 1.0, 1e-3);
}

TEST(Joint, OpticalJointNormalized) {
  auto T = tomogram_exact(Fock{2}, kDefault, Representation::optical, {default_x_axis(), default_theta_axis()});
  auto J = make_joint(T, GaussianSumPrior{});
  EXPECT_NEAR(integrate_all(J.grid), 1.0, 1e-3);
  for (double v : J.grid.values()) EXPECT_GT(v, -1e-6);
}

TEST(PriorSpec, Parsing) {
  auto p1 = std::get<GaussianPrior>(parse_prior("p1:mu0=0.5,nu0=0,xi=1,zeta=2"));
  EXPECT_DOUBLE_EQ(p1.mu0, 0.5);
  EXPECT_DOUBLE_EQ(p1.zeta, 2.0);
  auto p2 = std::get<GaussianSumPrior>(parse_prior("p2:[{0.6,1.0472,0.7},{q=0.4,f=2.0944,phi=0.9}]"));
  ASSERT_EQ(p2.components().size(), 2u);
  EXPECT_DOUBLE_EQ(p2.components()[1].width, 0.9);
  EXPECT_EQ(std::get<GaussianSumPrior>(parse_prior("p2")).components().size(), 2u);
  EXPECT_THROW(parse_prior("p1:xi=0"), Error);
  EXPECT_THROW(parse_prior("p1:sigma=1"), Error);
  EXPECT_THROW(parse_prior("p2:[{0.6,1,0.7}]"), Error);
  EXPECT_THROW(parse_prior("p3"), Error);
  auto round = parse_prior(to_string(parse_prior("p1:mu0=0.25,xi=0.5")));
  EXPECT_DOUBLE_EQ(std::get<GaussianPrior>(round).xi, 0.5);
}
