#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "jpr/states.hpp"

using namespace jpr;

namespace {

const Axis kQ("q", -8, 8, 161);
const Axis kP("p", -8, 8, 161);
const OscillatorParams kDefault{};

double value_at(const RealGrid& W, double q, double p) {
  return W.at({W.axis(0).nearest(q), W.axis(1).nearest(p)});
}

std::vector<StateSpec> catalog() {
  return {Fock{0}, Fock{1}, Fock{2}, Fock{3}, Coherent{{0.5, 0.0}}, Coherent{{0.5, 0.5}}, SqueezedGaussian{0, 0, 2},
          SqueezedGaussian{1, 0, 0.5}};
}

}  // namespace

TEST(StateSpec, Parsing) {
  EXPECT_EQ(std::get<Fock>(parse_state("fock:n=2")).n, 2);
  auto c = std::get<Coherent>(parse_state("coherent:re=0.5,im=0.0"));
  EXPECT_DOUBLE_EQ(c.alpha.real(), 0.5);
  auto g = std::get<SqueezedGaussian>(parse_state("gauss:q=1,p=0,s=2"));
  EXPECT_DOUBLE_EQ(g.q, 1.0);
  EXPECT_DOUBLE_EQ(g.s, 2.0);
  EXPECT_THROW(parse_state("fock:n=13"), Error);
  EXPECT_THROW(parse_state("fock:n=-1"), Error);
  EXPECT_THROW(parse_state("gauss:s=0"), Error);
  EXPECT_THROW(parse_state("cat:n=1"), Error);
  EXPECT_THROW(parse_state("fock:m=1"), Error);
  EXPECT_EQ(to_string(parse_state("gauss:q=1,p=0,s=2")), "gauss:q=1,p=0,s=2");
}

TEST(Wavefunction, GroundStateOracle) {
  auto psi = wavefunction(Fock{0}, kDefault, kQ);
  EXPECT_NEAR(psi[80].real(), std::pow(std::numbers::pi, -0.25), 1e-10);
  auto coh = wavefunction(Coherent{}, kDefault, kQ);
  for (std::size_t i = 0; i < psi.size(); ++i) EXPECT_NEAR(std::abs(psi[i] - coh[i]), 0.0, 1e-12);
}

TEST(Wavefunction, Normalized) {
  for (const auto& s : catalog()) {
    auto psi = wavefunction(s, kDefault, kQ);
    RealGrid d(psi.axes());
    for (std::size_t i = 0; i < psi.size(); ++i) d[i] = std::norm(psi[i]);
    EXPECT_NEAR(integrate_all(d), 1.0, 1e-10) << to_string(s);
  }
  EXPECT_TRUE(wavefunction(Fock{3}, kDefault, kQ).warnings().empty());
  EXPECT_FALSE(wavefunction(Fock{12}, kDefault, kQ).warnings().empty());
  auto narrow = wavefunction(Fock{2}, kDefault, Axis("q", -2, 2, 41));
  EXPECT_FALSE(narrow.warnings().empty());
}

TEST(DensityMatrix, HermitianAndNormalized) {
  auto rho = density_matrix(Fock{1}, kDefault, kQ);
  const std::size_t n = kQ.count();
  cplx tr{};
  auto w = trapezoid_weights(kQ);
  for (std::size_t i = 0; i < n; ++i) {
    tr += w[i] * rho[i * n + i];
    for (std::size_t j = 0; j < n; ++j) EXPECT_EQ(rho[i * n + j], std::conj(rho[j * n + i]));
  }
  EXPECT_NEAR(tr.real(), 1.0, 1e-8);
  auto rho0 = density_matrix(Fock{0}, kDefault, kQ);
  EXPECT_NEAR(rho0.at({80, 80}).real(), 1 / std::sqrt(std::numbers::pi), 1e-10);
}

TEST(Wigner, FromDensityGroundState) {
  auto W = wigner_from_density(density_matrix(Fock{0}, kDefault, kQ), kDefault, kP);
  EXPECT_NEAR(value_at(W.grid, 0, 0), 1 / std::numbers::pi, 1e-4);
  EXPECT_NEAR(integrate_all(W.grid), 1.0, 1e-4);
  auto A = wigner_analytic(Fock{0}, kDefault, kQ, kP);
  EXPECT_LT(max_abs(A.grid - W.grid), 1e-4);
}

TEST(Wigner, CoherentIsDisplacedGround) {
  const cplx alpha(0.5, -0.3);
  auto W = wigner_from_density(density_matrix(Coherent{alpha}, kDefault, kQ), kDefault, kP);
  const double q0 = std::sqrt(2.0) * alpha.real(), p0 = std::sqrt(2.0) * alpha.imag();
  auto expected = RealGrid::tabulate(W.grid.axes(), [&](auto c) {
    return std::exp(-(c[0] - q0) * (c[0] - q0) - (c[1] - p0) * (c[1] - p0)) / std::numbers::pi;
  });
  EXPECT_LT(max_abs(expected - W.grid), 1e-4);
}

TEST(Wigner, FockMatchesLaguerreAndAlternates) {
  for (int n = 0; n <= 3; ++n) {
    auto W = wigner_from_density(density_matrix(Fock{n}, kDefault, kQ), kDefault, kP);
    auto L = wigner_fock(n, kDefault, kQ, kP);
    EXPECT_LT(max_abs(W.grid - L.grid), 1e-4) << n;
    const double origin = value_at(W.grid, 0, 0);
    EXPECT_NEAR(origin, (n % 2 ? -1.0 : 1.0) / std::numbers::pi, 1e-4);
  }
}

TEST(Wigner, MarginalsAndMoments) {
  for (const auto& s : catalog()) {
    auto W = wigner_from_density(density_matrix(s, kDefault, kQ), kDefault, kP);
    EXPECT_NEAR(integrate_all(W.grid), 1.0, 1e-4) << to_string(s);
    for (std::size_t a : {0u, 1u}) {
      auto marg = integrate(W.grid, {a});
      for (double v : marg.values()) EXPECT_GT(v, -1e-6);
      EXPECT_NEAR(integrate_all(marg), 1.0, 1e-4);
    }
    auto m = moments(W);
    auto e = exact_moments(s, kDefault);
    EXPECT_NEAR(m.q, e.q, 1e-4) << to_string(s);
    EXPECT_NEAR(m.p, e.p, 1e-4) << to_string(s);
    EXPECT_NEAR(m.q2, e.q2, 1e-4) << to_string(s);
    EXPECT_NEAR(m.p2, e.p2, 1e-4) << to_string(s);
  }
}

TEST(Wigner, AnalyticSqueezed) {
  auto W = wigner_analytic(SqueezedGaussian{0, 0, 2}, kDefault, kQ, kP);
  EXPECT_NEAR(integrate_all(W.grid), 1.0, 1e-10);
  auto m = moments(W);
  EXPECT_NEAR(m.q2, 1.0, 1e-4);
  EXPECT_NEAR(m.p2, 0.25, 1e-4);
  EXPECT_THROW(wigner_analytic(Fock{1}, kDefault, kQ, kP), Error);
}

TEST(Wigner, NonDefaultParams) {
  OscillatorParams pr{2.0, 0.5, 0.7};
  auto W = wigner_from_density(density_matrix(Fock{1}, pr, kQ), pr, kP);
  auto m = moments(W);
  auto e = exact_moments(Fock{1}, pr);
  EXPECT_NEAR(m.q2, e.q2, 1e-4);
  EXPECT_NEAR(m.p2, e.p2, 1e-4);
  EXPECT_LT(max_abs(W.grid - wigner_fock(1, pr, kQ, kP).grid), 1e-4);
}

TEST(Wigner, RejectsNonHermitian) {
  auto rho = density_matrix(Fock{1}, kDefault, kQ);
  rho[80 * 161 + 90] += cplx(0, 0.5);
  EXPECT_THROW(wigner_from_density(rho, kDefault, kP), Error);
}
