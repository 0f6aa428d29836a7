#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numbers>

#include "jpr/opalg.hpp"
#include "jpr/symbols.hpp"
#include "jpr/tomography.hpp"

using namespace jpr;

namespace {

const OscillatorParams kDefault{};
const double r2 = 1 / std::numbers::sqrt2;

// Fourth moments and wide priors weight slices whose X support leaves [-8, 8].
const Axis kWideX("X", -16, 16, 321);
// Trace forms need slices next to the origin resolved in X.
const Axis kFineX("X", -8, 8, 321);

const JointDistribution& joint(const StateSpec& s, const Prior& prior = GaussianPrior{},
                               const Axis& x = default_x_axis()) {
  static std::map<std::string, JointDistribution> cache;
  const std::string key = to_string(s) + "|" + to_string(prior) + "|" + fmt(x.min()) + fmt(x.count());
  auto it = cache.find(key);
  if (it == cache.end()) {
    const bool sym = std::holds_alternative<GaussianPrior>(prior);
    auto T = tomogram_exact(s, kDefault, sym ? Representation::symplectic : Representation::optical,
                            sym ? std::vector<Axis>{x, default_mu_axis(), default_nu_axis()}
                                : std::vector<Axis>{x, default_theta_axis()});
    it = cache.emplace(key, make_joint(T, prior)).first;
  }
  return it->second;
}

/// ∫ qᵏ pˡ W dq dp
double wigner_moment(const StateSpec& s, int k, int l) {
  auto st = std::get_if<Fock>(&s);
  auto W = st ? wigner_fock(st->n, kDefault, default_q_axis(), default_p_axis())
              : wigner_analytic(s, kDefault, default_q_axis(), default_p_axis());
  auto f = RealGrid::tabulate(W.grid.axes(), [&](auto c) { return std::pow(c[0], k) * std::pow(c[1], l); });
  return integrate_all(hadamard(f, W.grid));
}

void expect_rel(cplx got, cplx want, double tol, const std::string& what) {
  EXPECT_LE(std::abs(got - want), tol * std::max(1.0, std::abs(want))) << what << " got " << got << " want " << want;
}

}  // namespace

TEST(Regular, Examples) {
  const GaussianPrior g{};
  expect_rel(pair(regular_symbol("q", g), joint(Coherent{{r2, 0}})), 1.0, 1e-2, "q coherent");
  expect_rel(pair(regular_symbol("qp", g), joint(Fock{0})), cplx(0, 0.5), 1e-2, "qp vacuum");
  expect_rel(pair(regular_symbol("n", g), joint(Fock{0})), 0.0, 1e-2, "n vacuum");
  expect_rel(pair(regular_symbol("q", g), joint(Fock{1})), 0.0, 1e-2, "q Fock 1");
  expect_rel(pair(regular_symbol("n", g), joint(Coherent{{1, 0}})), 1.0, 2e-2, "n coherent");
  EXPECT_THROW(regular_symbol("x3", g), Error);
}

TEST(Regular, PrintedFormsMatchGeneralDerivativeForm) {
  GaussianPrior g{0.5, -0.5, 0.75, 1.5};
  auto q = regular_symbol("q", g);
  auto m = monomial_regular_symbol(1, 0, g);
  auto q2 = regular_symbol("q2", g), m2 = monomial_regular_symbol(2, 0, g);
  auto qp = regular_symbol("qp", g), m11 = monomial_regular_symbol(1, 1, g);
  for (double X : {-2.0, 0.3, 1.7})
    for (double mu : {-1.0, 0.4, 2.0})
      for (double nu : {-0.6, 1.1}) {
        const double c[3] = {X, mu, nu};
        EXPECT_NEAR(std::abs(q(c) - m(c)), 0.0, 1e-12);
        EXPECT_NEAR(std::abs(q2(c) - m2(c)), 0.0, 1e-12);
        EXPECT_NEAR(std::abs(qp(c) - m11(c) - cplx(0, 0.5)), 0.0, 1e-12);
      }
  EXPECT_THROW(monomial_regular_symbol(3, 2, g), Error);
}

TEST(Regular, CatalogOracles) {
  const GaussianPrior g{};
  for (const auto& s : state_catalog()) {
    const auto& J = joint(s);
    auto m = exact_moments(s, kDefault);
    const std::string n = to_string(s);
    expect_rel(pair(regular_symbol("q", g), J), m.q, 2e-2, n + " q");
    expect_rel(pair(regular_symbol("p", g), J), m.p, 2e-2, n + " p");
    expect_rel(pair(regular_symbol("q2", g), J), m.q2, 2e-2, n + " q2");
    expect_rel(pair(regular_symbol("p2", g), J), m.p2, 2e-2, n + " p2");
    expect_rel(pair(regular_symbol("qp", g), J), cplx(m.qp, 0.5), 2e-2, n + " qp");
    expect_rel(pair(regular_symbol("n", g), J), m.number(kDefault), 2e-2, n + " n");
    auto qp = pair(regular_symbol("qp", g), J), pq = pair(regular_symbol("pq", g), J);
    expect_rel(qp - pq, cplx(0, kDefault.hbar), 3e-2, n + " [q,p]");
    auto alt = alternative_regular_symbols_q2_p2(g);
    expect_rel(pair(alt.q2, J), m.q2, 2e-2, n + " q2 alt");
    expect_rel(pair(alt.p2, J), m.p2, 2e-2, n + " p2 alt");
  }
}

TEST(Regular, FourthOrderMonomials) {
  const GaussianPrior g{};
  for (const StateSpec& s : {StateSpec{Fock{1}}, StateSpec{Coherent{{r2, r2}}}, StateSpec{SqueezedGaussian{0, 0, 2}}})
    for (auto [k, l] : std::vector<std::pair<int, int>>{{4, 0}, {0, 4}, {2, 2}, {3, 1}, {1, 1}})
      expect_rel(pair(monomial_regular_symbol(k, l, g), joint(s, g, kWideX)), wigner_moment(s, k, l), 3e-2,
                 to_string(s) + " monomial " + std::to_string(k) + "," + std::to_string(l));
  expect_rel(pair(monomial_regular_symbol(2, 0, g), joint(Fock{0})), 0.5, 2e-2, "q2 vacuum");
  expect_rel(pair(monomial_regular_symbol(1, 1, g), joint(Coherent{{r2, r2}})), 1.0, 3e-2, "qp coherent");
}

TEST(Regular, AlternativeFormsDifferPointwise) {
  const GaussianPrior g{};
  auto alt = alternative_regular_symbols_q2_p2(g);
  auto q2 = regular_symbol("q2", g);
  double diff = 0;
  for (double X : {-8.0, -3.0, 0.0, 2.0, 8.0})
    for (double mu : {-4.5, -1.0, 0.0, 2.5})
      for (double nu : {-4.5, 0.0, 3.0}) {
        const double c[3] = {X, mu, nu};
        diff = std::max(diff, std::abs(alt.q2(c) - q2(c)));
      }
  EXPECT_GT(diff, 0.1);
  expect_rel(pair(alt.q2, joint(Fock{0})), 0.5, 2e-2, "alt q2 vacuum");
  expect_rel(pair(alt.p2, joint(SqueezedGaussian{0, 0, 2})), 0.25, 2e-2, "alt p2 squeezed");
}

TEST(Regular, PriorInvariance) {
  const std::vector<StateSpec> states{Coherent{{r2, r2}}, Fock{1}};
  for (double mu0 : {0.0, 0.5, -0.5})
    for (double w : {0.75, 1.5}) {
      GaussianPrior g{mu0, -mu0, w, w == 0.75 ? 1.5 : 0.75};
      for (const auto& s : states) {
        auto m = exact_moments(s, kDefault);
        const auto& J = joint(s, g, kWideX);
        const std::string n = to_string(s) + " " + to_string(Prior{g});
        expect_rel(pair(regular_symbol("q", g), J), m.q, 2e-2, n + " q");
        expect_rel(pair(regular_symbol("p2", g), J), m.p2, 2e-2, n + " p2");
        expect_rel(pair(singular_symbol("one", g), J), 1.0, 2e-2, n + " one");
        expect_rel(pair(singular_symbol("q", g), J), m.q, 2e-2, n + " singular q");
      }
    }
}

TEST(Singular, Examples) {
  const GaussianPrior g{};
  for (const auto& s : state_catalog()) expect_rel(pair(singular_symbol("one", g), joint(s)), 1.0, 1e-2, to_string(s));
  auto coh = joint(Coherent{{r2, 0}});
  const cplx sq = pair(singular_symbol("q", g), coh);
  expect_rel(sq, 1.0, 2e-2, "singular q");
  expect_rel(sq, pair(regular_symbol("q", g), coh), 2e-2, "singular vs regular q");
  expect_rel(pair(singular_symbol("qn(2)", g), joint(Fock{0})), 0.5, 2e-2, "qn(2) vacuum");
  EXPECT_THROW(singular_symbol("xyz", g), Error);
  EXPECT_THROW(pair(singular_symbol("q", GaussianPrior{0, 0, 5, 1}), to_complex(joint(Fock{0}).grid)), Error);
  EXPECT_THROW(pair(singular_symbol("q", g), joint(Fock{0}, GaussianPrior{0, 0, 2, 1})), Error);
}

TEST(Singular, CatalogCrossAgreement) {
  const GaussianPrior g{};
  for (const auto& s : state_catalog()) {
    const auto& J = joint(s);
    auto m = exact_moments(s, kDefault);
    const std::string n = to_string(s);
    const std::vector<std::pair<const char*, cplx>> cases{
        {"q", m.q}, {"p", m.p}, {"qn(2)", m.q2}, {"pn(2)", m.p2}, {"qp", cplx(m.qp, 0.5)}, {"number", m.number(kDefault)}};
    for (auto [name, want] : cases) {
      const cplx got = pair(singular_symbol(name, g), J);
      expect_rel(got, want, 2e-2, n + " singular " + name);
      std::string reg = name;
      if (reg == "qn(2)") reg = "q2";
      if (reg == "pn(2)") reg = "p2";
      if (reg == "number") reg = "n";
      expect_rel(got, pair(regular_symbol(reg, g), J), 2e-2, n + " cross " + name);
    }
  }
}

TEST(Singular, CharacteristicFunctionForms) {
  for (const auto& g : {GaussianPrior{}, GaussianPrior{0.5, -0.5, 1.5, 0.75}})
    for (const StateSpec& s : {StateSpec{Coherent{{r2, r2}}}, StateSpec{SqueezedGaussian{0.5, -0.3, 2}}}) {
      auto m = exact_moments(s, kDefault);
      const auto& J = joint(s, g, kFineX);
      expect_rel(pair(singular_symbol("q_trace", g), J), m.q, 2e-2, to_string(s) + " q_trace");
      expect_rel(pair(singular_symbol("p_trace", g), J), m.p, 2e-2, to_string(s) + " p_trace");
      expect_rel(pair(singular_symbol("qp_trace", g), J), cplx(m.qp, 0.5), 2e-2, to_string(s) + " qp_trace");
    }
}

TEST(Optical, CatalogOracles) {
  const GaussianSumPrior prior{};
  for (const auto& s : state_catalog()) {
    const auto& J = joint(s, prior);
    auto m = exact_moments(s, kDefault);
    const std::string n = to_string(s);
    expect_rel(pair(regular_symbol("q", prior), J), m.q, 2e-2, n + " q");
    expect_rel(pair(regular_symbol("p", prior), J), m.p, 2e-2, n + " p");
    expect_rel(pair(regular_symbol("q2", prior), J), m.q2, 2e-2, n + " q2");
    expect_rel(pair(regular_symbol("p2", prior), J), m.p2, 2e-2, n + " p2");
    expect_rel(pair(regular_symbol("qp", prior), J), cplx(m.qp, 0.5), 2e-2, n + " qp");
    expect_rel(pair(regular_symbol("n", prior), J), m.number(kDefault), 2e-2, n + " n");
  }
  EXPECT_THROW(pair(regular_symbol("q", prior), joint(Fock{0})), Error);
}

TEST(TracePairing, IdentitySymbolAgainstAppliedOperators) {
  for (const auto& g : {GaussianPrior{}, GaussianPrior{0.5, -0.5, 1.5, 0.75}}) {
    auto rep = OpRepresentation::symplectic_joint(g, kDefault);
    for (const StateSpec& s : {StateSpec{Coherent{{r2, r2}}}, StateSpec{SqueezedGaussian{-0.4, 0.6, 0.5}}}) {
      auto m = exact_moments(s, kDefault);
      auto J = to_complex(joint(s, g, kFineX).grid);
      auto one = singular_symbol("one", g);
      expect_rel(pair(one, apply_operator(position_operator(rep), J)), m.q, 1e-2, to_string(s) + " [q]");
      expect_rel(pair(one, apply_operator(momentum_operator(rep), J)), m.p, 1e-2, to_string(s) + " [p]");
    }
  }
}
