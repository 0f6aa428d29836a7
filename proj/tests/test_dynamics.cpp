#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numbers>

#include "jpr/dynamics.hpp"

using namespace jpr;

namespace {

const OscillatorParams kDefault{};
const double r2 = 1 / std::numbers::sqrt2;
const PolynomialPotential kHarmonic{};

std::vector<Axis> sym_axes() { return {default_x_axis(), default_mu_axis(), default_nu_axis()}; }
std::vector<Axis> opt_axes() { return {default_x_axis(), default_theta_axis()}; }

const JointDistribution& joint(const StateSpec& s, const Prior& prior = GaussianPrior{}) {
  static std::map<std::string, JointDistribution> cache;
  const std::string key = to_string(s) + "|" + to_string(prior);
  auto it = cache.find(key);
  if (it == cache.end()) {
    const bool sym = std::holds_alternative<GaussianPrior>(prior);
    auto T = tomogram_exact(s, kDefault, sym ? Representation::symplectic : Representation::optical,
                            sym ? sym_axes() : opt_axes());
    it = cache.emplace(key, make_joint(T, prior)).first;
  }
  return it->second;
}

double energy(int n) { return kDefault.hbar * kDefault.omega * (n + 0.5); }

}  // namespace

TEST(Potential, ParseAndValidate) {
  auto v = parse_potential("0, 0, 0.5");
  EXPECT_EQ(v.coefficients.size(), 3u);
  EXPECT_DOUBLE_EQ(v(2.0), 2.0);
  EXPECT_EQ(to_string(v), "0,0,0.5");
  EXPECT_THROW(parse_potential("1,2,3,4,5,6,7,8"), Error);
  EXPECT_THROW(parse_potential("0,x"), Error);
  EXPECT_EQ(PolynomialPotential::harmonic({1, 2, 3}).coefficients[2], 0.5 * 1 * 4);
}

TEST(Symplectic, FockStatesDoNotEvolve) {
  for (int n = 0; n <= 2; ++n) {
    const auto& J = joint(Fock{n});
    auto t = evolution_terms_symplectic(J, kHarmonic);
    auto total = t.total();
    auto r = residual_report("rhs", total, RealGrid(total.axes()), {&t.drift, &t.potential});
    EXPECT_LT(r.relative, 1e-2) << "n=" << n;
  }
}

TEST(Symplectic, CoherentMatchesAnalyticTrajectory) {
  const Prior prior = GaussianPrior{};
  for (cplx a : {cplx(r2, 0), cplx(0.5, 0.5)}) {
    const auto J = coherent_joint_trajectory(a, 0.0, prior, sym_axes());
    auto rhs = evolution_rhs_symplectic(J, kHarmonic);
    auto oracle = coherent_time_derivative(a, 0.0, prior, sym_axes());
    EXPECT_LT(residual_report("coherent", rhs, oracle).relative, 1e-2) << a;
  }
}

TEST(Symplectic, PrintedDriftEqualsComposedKinetic) {
  for (const auto& g : {GaussianPrior{}, GaussianPrior{0.3, -0.4, 1.2, 0.9}}) {
    const auto& J = joint(Coherent{{0.5, -0.3}}, g);
    auto printed = evolution_rhs_symplectic(J, kHarmonic);
    auto general = evolution_rhs_general(J, kHarmonic);
    EXPECT_LT(residual_report("general", printed, general).relative, 2e-4);
  }
}

TEST(Symplectic, StationarityConditionIsHalfTheRightHandSide) {
  const auto& J = joint(Coherent{{r2, 0}});
  auto cond = stationarity_condition_values(J, kHarmonic);
  auto rhs = evolution_rhs_symplectic(J, kHarmonic);
  rhs *= 0.5;
  EXPECT_LT(max_abs(cond - rhs), 1e-10 * (1 + max_abs(rhs)));
  EXPECT_GE(stationarity_condition_symplectic(J, kHarmonic).relative, 0.1);
  for (int n = 0; n <= 2; ++n) EXPECT_LT(stationarity_condition_symplectic(joint(Fock{n}), kHarmonic).relative, 1e-2);
}

TEST(Symplectic, StationaryEquationForFockStates) {
  for (int n = 0; n <= 2; ++n) {
    const auto& J = joint(Fock{n});
    EXPECT_LT(stationary_residual_symplectic(J, kHarmonic, energy(n)).relative, 1e-2) << n;
    const double off = stationary_residual_symplectic(J, kHarmonic, energy(n) + 0.2).relative;
    // shifting E by δ gives a residual near δ/(E+δ)
    EXPECT_NEAR(off, 0.2 / (energy(n) + 0.2), 1e-2) << n;
  }
}

TEST(Symplectic, TypesetStationaryForm) {
  const auto& centred = joint(Fock{1});
  EXPECT_LT(stationary_typeset_discrepancy(centred, kHarmonic).relative, 2e-3);
  const auto& shifted = joint(Fock{1}, GaussianPrior{0.0, 0.5, 1.0, 1.0});
  EXPECT_LT(stationary_residual_symplectic(shifted, kHarmonic, energy(1)).relative, 1e-2);
  EXPECT_GT(stationary_typeset_discrepancy(shifted, kHarmonic).relative, 5e-2);
}

TEST(Symplectic, RejectsOpticalJoint) {
  EXPECT_THROW(evolution_rhs_symplectic(joint(Fock{0}, GaussianSumPrior{}), kHarmonic), Error);
}

TEST(Optical, FockStatesDoNotEvolve) {
  for (int n = 0; n <= 2; ++n) {
    const auto& J = joint(Fock{n}, GaussianSumPrior{});
    auto t = evolution_terms_optical(J, kHarmonic);
    auto total = t.total();
    EXPECT_LT(residual_report("rhs", total, RealGrid(total.axes()), {&t.drift, &t.potential}).relative, 1e-2) << n;
  }
}

TEST(Optical, CoherentMatchesAnalyticTrajectory) {
  const Prior prior = GaussianSumPrior{};
  const cplx a{r2, 0.2};
  const auto J = coherent_joint_trajectory(a, 0.0, prior, opt_axes());
  auto rhs = evolution_rhs_optical(J, kHarmonic);
  auto oracle = coherent_time_derivative(a, 0.0, prior, opt_axes());
  EXPECT_LT(residual_report("coherent", rhs, oracle).relative, 1e-2);
  EXPECT_LT(residual_report("general", rhs, evolution_rhs_general(J, kHarmonic)).relative, 1e-6);
}

TEST(Optical, JointEquationIsConjugatedTomographicEquation) {
  const GaussianSumPrior prior({{0.6, 1.0, 0.6}, {0.4, 2.2, 0.4}});
  auto T = tomogram_exact(Coherent{{0.4, -0.6}}, kDefault, Representation::optical, opt_axes());
  auto J = make_joint(T, prior);
  auto direct = evolution_rhs_optical_tomogram(T, kHarmonic);
  RealGrid weighted = T.grid;
  const auto ith = J.grid.axis_index("theta");
  for (std::size_t f = 0; f < direct.size(); ++f) {
    const double p = prior_value(prior, J.grid.axis(ith)[J.grid.unflatten(f)[ith]]);
    direct[f] *= p;
    weighted[f] *= p;
  }
  // make_joint renormalizes
  direct *= integrate_all(J.grid) / integrate_all(weighted);
  auto rhs = evolution_rhs_optical(J, kHarmonic);
  EXPECT_LT(residual_report("conjugation", rhs, direct).relative, 1e-6);
}

TEST(Optical, StationaryEquation) {
  const GaussianSumPrior one({{1.0, 1.4, 0.7}});
  for (int n = 0; n <= 2; ++n) {
    for (const auto& prior : {GaussianSumPrior{}, one}) {
      const auto& J = joint(Fock{n}, prior);
      EXPECT_LT(stationary_residual_optical(J, kHarmonic, energy(n)).relative, 1e-2) << n;
      auto composed = real_part(apply_operator(hamiltonian_operator(kHarmonic, detail::op_rep(J)), J.grid));
      EXPECT_LT(residual_report("composed", stationary_rhs_optical(J, kHarmonic, false), composed).relative, 1e-6);
    }
    const auto& J = joint(Fock{n}, one);
    auto general = stationary_rhs_optical(J, kHarmonic, false);
    auto single = stationary_rhs_optical(J, kHarmonic, true);
    EXPECT_LT(max_abs(general - single), 1e-8 * (1 + max_abs(general)));
  }
  EXPECT_THROW(stationary_residual_optical(joint(Fock{0}, GaussianSumPrior{}), kHarmonic, 0.5, true), Error);
}

TEST(Stepping, CoherentStateFollowsTrajectory) {
  const Prior prior = GaussianSumPrior{};
  const cplx a{r2, 0};
  auto J0 = coherent_joint_trajectory(a, 0.0, prior, opt_axes());
  const double bound = stability_bound(J0, kHarmonic);
  EXPECT_GT(bound, 0.0);
  const double dt = std::min(0.02, 0.5 * bound);
  const auto steps = static_cast<std::size_t>(std::ceil(0.2 / dt));
  auto res = step_evolution(J0, kHarmonic, 0.2 / static_cast<double>(steps), steps);
  auto exact = coherent_joint_trajectory(a, res.time, prior, opt_axes());
  EXPECT_LT(residual_report("trajectory", res.joint.grid, exact.grid).relative, 1e-2);
  EXPECT_LT(res.mass_drift, 1e-3);
  EXPECT_THROW(step_evolution(J0, kHarmonic, 50 * bound, 40), Error);
  EXPECT_THROW(step_evolution(J0, kHarmonic, 1.0, 10), Error);
}

TEST(Stepping, ContinuedRightHandSidesAgree) {
  const auto& O = joint(Coherent{{0.4, -0.6}}, GaussianSumPrior{});
  EXPECT_LT(residual_report("continued", evolution_rhs_optical_continued(O, kHarmonic, 12), evolution_rhs_optical(O, kHarmonic))
                .relative,
            1e-6);
  const auto& S = joint(Coherent{{0.4, -0.6}});
  EXPECT_LT(residual_report("tomogram", detail::symplectic_rhs_via_tomogram(S, kHarmonic), evolution_rhs_symplectic(S, kHarmonic))
                .relative,
            1e-3);
}

TEST(Stepping, FockStateStaysPut) {
  const auto& J0 = joint(Fock{0}, GaussianSumPrior{});
  auto res = step_evolution(J0, kHarmonic, 0.02, 157);
  EXPECT_LT(residual_report("fock", res.joint.grid, J0.grid).relative, 2e-2);
  EXPECT_LT(std::abs(integrate_all(res.joint.grid) - 1.0), 1e-2);
}

TEST(Stepping, SymplecticCoherentState) {
  const Prior prior = GaussianPrior{};
  const std::vector<Axis> axes{default_x_axis(), Axis("mu", -3, 3, 49), Axis("nu", -3, 3, 49)};
  const cplx a{r2, 0};
  auto J0 = coherent_joint_trajectory(a, 0.0, prior, axes);
  const double dt = std::min(0.05, 0.5 * stability_bound(J0, kHarmonic));
  const auto steps = static_cast<std::size_t>(std::ceil(0.2 / dt));
  auto res = step_evolution(J0, kHarmonic, 0.2 / static_cast<double>(steps), steps);
  auto exact = coherent_joint_trajectory(a, res.time, prior, axes);
  EXPECT_LT(residual_report("trajectory", res.joint.grid, exact.grid).relative, 5e-2);
}
