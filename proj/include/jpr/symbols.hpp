#pragma once
// Dual symbols of observables and their pairing with joint distributions.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "jpr/error.hpp"
#include "jpr/gridcalc.hpp"
#include "jpr/jointdist.hpp"
#include "jpr/parse.hpp"
#include "jpr/states.hpp"

namespace jpr {

/// Smooth dual symbol, a closed form over (X, mu, nu) or (X, theta).
struct RegularSymbol {
  std::string name;
  Representation rep = Representation::symplectic;
  Prior prior;
  std::vector<std::string> vars;
  std::function<cplx(std::span<const double>)> fn;

  cplx operator()(std::span<const double> x) const { return fn(x); }
};

/// δ^{(order)}(axis − support).
struct DeltaFactor {
  std::string axis;
  double support = 0;
  int order = 0;
};

/// coefficient · weight(X) · Π deltas
struct SingularTerm {
  cplx coefficient{1.0, 0.0};
  std::function<cplx(double)> weight;
  std::vector<DeltaFactor> deltas;
};

/// Delta-supported dual symbol (symplectic only). Never placed on a grid:
/// pairing slices the X-integrated joint distribution at the supports.
struct SingularSymbol {
  std::string name;
  GaussianPrior prior;
  std::vector<SingularTerm> terms;

  SingularSymbol& operator+=(const SingularSymbol& o) {
    terms.insert(terms.end(), o.terms.begin(), o.terms.end());
    return *this;
  }
  SingularSymbol& operator*=(cplx c) {
    for (auto& t : terms) t.coefficient *= c;
    return *this;
  }
};

namespace detail {

inline cplx ci(double v) { return {0.0, v}; }

inline bool same_prior(const Prior& a, const Prior& b) { return to_string(a) == to_string(b); }

inline RegularSymbol symplectic_symbol(std::string name, const GaussianPrior& g,
                                       std::function<cplx(double, double, double)> f) {
  return {std::move(name), Representation::symplectic, Prior{g}, {"X", "mu", "nu"},
          [f = std::move(f)](std::span<const double> c) { return f(c[0], c[1], c[2]); }};
}

inline RegularSymbol optical_symbol(std::string name, const GaussianSumPrior& s,
                                    std::function<cplx(double, double)> f) {
  return {std::move(name), Representation::optical, Prior{s}, {"X", "theta"},
          [f = std::move(f)](std::span<const double> c) { return f(c[0], c[1]); }};
}

}  // namespace detail

inline constexpr int kMaxMonomialOrder = 4;

/// (−1)^{k+l} X^{k+l}/(k+l)! · ∂ᵏ_μ∂ˡ_ν P / P. Pairs to the Weyl-symmetrized
/// moment ∫ qᵏ pˡ W dq dp; operator-ordered products differ by commutator terms.
inline RegularSymbol monomial_regular_symbol(int k, int l, const GaussianPrior& g) {
  g.validate();
  require(k >= 0 && l >= 0, "monomial orders must be non-negative");
  require(k + l <= kMaxMonomialOrder, "monomial order k+l above " + std::to_string(kMaxMonomialOrder) + " not supported");
  const int n = k + l;
  const double scale = ((n % 2) ? -1.0 : 1.0) / std::tgamma(n + 1.0);
  return detail::symplectic_symbol("monomial:" + std::to_string(k) + "," + std::to_string(l), g,
                                   [=](double X, double mu, double nu) {
                                     return cplx(scale * std::pow(X, n) * prior_derivative_ratio(g, k, l, mu, nu));
                                   });
}

/// Regular dual symbol of q, p, q2, p2, qp, pq or n.
inline RegularSymbol regular_symbol(std::string_view name, const Prior& prior, const OscillatorParams& pr = {}) {
  pr.validate();
  const double mw = pr.mass * pr.omega, hbar = pr.hbar;
  const std::string nm(name);
  if (auto* gp = std::get_if<GaussianPrior>(&prior)) {
    const GaussianPrior g = *gp;
    g.validate();
    const double mu0 = g.mu0, nu0 = g.nu0, xi2 = g.xi * g.xi, ze2 = g.zeta * g.zeta;
    auto q2 = [=](double X, double mu) { return X * X / (xi2 * xi2) * (2 * (mu - mu0) * (mu - mu0) - xi2); };
    auto p2 = [=](double X, double nu) { return X * X / (ze2 * ze2) * (2 * (nu - nu0) * (nu - nu0) - ze2); };
    if (name == "q")
      return detail::symplectic_symbol(nm, g, [=](double X, double mu, double) { return cplx(2 * (mu - mu0) / xi2 * X); });
    if (name == "p")
      return detail::symplectic_symbol(nm, g, [=](double X, double, double nu) { return cplx(2 * (nu - nu0) / ze2 * X); });
    if (name == "q2") return detail::symplectic_symbol(nm, g, [=](double X, double mu, double) { return cplx(q2(X, mu)); });
    if (name == "p2") return detail::symplectic_symbol(nm, g, [=](double X, double, double nu) { return cplx(p2(X, nu)); });
    if (name == "qp" || name == "pq") {
      const double c = name == "qp" ? hbar / 2 : -hbar / 2;
      return detail::symplectic_symbol(nm, g, [=](double X, double mu, double nu) {
        return cplx(2 * X * X * (mu - mu0) / xi2 * (nu - nu0) / ze2, c);
      });
    }
    if (name == "n")
      return detail::symplectic_symbol(nm, g, [=](double X, double mu, double nu) {
        const double a = (2 * (mu - mu0) * (mu - mu0) - xi2) / (xi2 * xi2);
        const double b = (2 * (nu - nu0) * (nu - nu0) - ze2) / (mw * mw * ze2 * ze2);
        return cplx(X * X * mw / (2 * hbar) * (a + b) - 0.5);
      });
    fail(ErrorKind::invalid_argument, "unknown symbol '" + nm + "' (expected q|p|q2|p2|qp|pq|n)");
  }
  const auto& s = std::get<GaussianSumPrior>(prior);
  const double pi = std::numbers::pi;
  auto P = [s](double th) { return prior_value(s, th); };
  if (name == "q")
    return detail::optical_symbol(nm, s, [=](double X, double th) { return cplx(2 * X * std::cos(th) / (pi * P(th))); });
  if (name == "p")
    return detail::optical_symbol(nm, s,
                                  [=](double X, double th) { return cplx(2 * mw * X * std::sin(th) / (pi * P(th))); });
  if (name == "q2")
    return detail::optical_symbol(
        nm, s, [=](double X, double th) { return cplx(X * X * (1 + 2 * std::cos(2 * th)) / (pi * P(th))); });
  if (name == "p2")
    return detail::optical_symbol(nm, s, [=](double X, double th) {
      return cplx(X * X * mw * mw * (1 - 2 * std::cos(2 * th)) / (pi * P(th)));
    });
  if (name == "qp" || name == "pq") {
    const double c = name == "qp" ? hbar / 2 : -hbar / 2;
    return detail::optical_symbol(
        nm, s, [=](double X, double th) { return cplx(2 * mw * X * X * std::sin(2 * th) / (pi * P(th)), c); });
  }
  if (name == "n")
    return detail::optical_symbol(nm, s, [=](double X, double th) {
      const double q2 = X * X * (1 + 2 * std::cos(2 * th));
      const double p2 = X * X * mw * mw * (1 - 2 * std::cos(2 * th));
      return cplx((mw * q2 / hbar + p2 / (hbar * mw)) / (2 * pi * P(th)) - 0.5);
    });
  fail(ErrorKind::invalid_argument, "unknown symbol '" + nm + "' (expected q|p|q2|p2|qp|pq|n)");
}

struct SymbolPair {
  RegularSymbol q2;
  RegularSymbol p2;
};

/// Exponentially weighted forms of the q² and p² symbols. They differ from
/// the primary ones pointwise but give the same averages.
inline SymbolPair alternative_regular_symbols_q2_p2(const GaussianPrior& g) {
  g.validate();
  const double mu0 = g.mu0, nu0 = g.nu0, xi2 = g.xi * g.xi, ze2 = g.zeta * g.zeta;
  auto e = [=](double mu, double nu) { return std::exp(-mu0 * (2 * mu - mu0) / xi2 - nu0 * (2 * nu - nu0) / ze2); };
  return {detail::symplectic_symbol("q2_alt", g,
                                    [=](double X, double mu, double nu) {
                                      return cplx(X * X / (2 * xi2) * (3 * mu * mu / xi2 - nu * nu / ze2) * e(mu, nu));
                                    }),
          detail::symplectic_symbol("p2_alt", g, [=](double X, double mu, double nu) {
            return cplx(X * X / (2 * ze2) * (3 * nu * nu / ze2 - mu * mu / xi2) * e(mu, nu));
          })};
}

// ---------------------------------------------------------------------------
// Singular symbols

namespace detail {

inline SingularSymbol slice_symbol(std::string name, const GaussianPrior& g, cplx coef, int power, double mu_s,
                                   double nu_s) {
  SingularTerm t{coef, [power](double X) { return cplx(std::pow(X, power)); }, {{"mu", mu_s, 0}, {"nu", nu_s, 0}}};
  return {std::move(name), g, {t}};
}

inline std::pair<std::string, int> split_power(std::string_view name) {
  // qn(3) -> ("qn", 3)
  auto open = name.find('(');
  if (open == std::string_view::npos || name.back() != ')') return {std::string(name), 0};
  const long n = parse_long(name.substr(open + 1, name.size() - open - 2), "symbol power");
  return {std::string(name.substr(0, open)), static_cast<int>(n)};
}

}  // namespace detail

/// Singular dual symbol: one | q | p | qp | qn(n) | pn(n) | number, plus the
/// characteristic-function forms q_trace | p_trace | qp_trace.
inline SingularSymbol singular_symbol(std::string_view name, const GaussianPrior& g, const OscillatorParams& pr = {}) {
  g.validate();
  pr.validate();
  const double pi = std::numbers::pi;
  const double xi = g.xi, ze = g.zeta, mu0 = g.mu0, nu0 = g.nu0;
  const double c0 = std::exp(mu0 * mu0 / (xi * xi) + nu0 * nu0 / (ze * ze));
  const double mw = pr.mass * pr.omega;
  auto [base, n] = detail::split_power(name);
  if (base == "q2") base = "qn", n = 2;
  if (base == "p2") base = "pn", n = 2;
  if (base == "n") base = "number";
  if (base == "1") base = "one";

  auto q_pow = [&](int k) {
    const double c = pi * ze / std::pow(xi, k - 1) *
                     std::exp((xi - mu0) * (xi - mu0) / (xi * xi) + nu0 * nu0 / (ze * ze));
    return detail::slice_symbol(k == 1 ? "q" : "qn(" + std::to_string(k) + ")", g, c, k, xi, 0.0);
  };
  auto p_pow = [&](int k) {
    const double c = pi * xi / std::pow(ze, k - 1) *
                     std::exp(mu0 * mu0 / (xi * xi) + (ze - nu0) * (ze - nu0) / (ze * ze));
    return detail::slice_symbol(k == 1 ? "p" : "pn(" + std::to_string(k) + ")", g, c, k, 0.0, ze);
  };
  auto one = [&] { return detail::slice_symbol("one", g, pi * xi * ze * c0, 0, 0.0, 0.0); };

  if (base == "one") return one();
  if (base == "q") return q_pow(1);
  if (base == "p") return p_pow(1);
  if (base == "qn" || base == "pn") {
    require(n >= 1 && n <= kMaxMonomialOrder, "symbol power must be in 1.." + std::to_string(kMaxMonomialOrder));
    return base == "qn" ? q_pow(n) : p_pow(n);
  }
  if (base == "qp") {
    auto s = detail::slice_symbol("qp", g,
                                  pi / 2 * std::exp((xi - mu0) * (xi - mu0) / (xi * xi) +
                                                    (ze - nu0) * (ze - nu0) / (ze * ze)),
                                  2, xi, ze);
    auto sq = detail::slice_symbol("", g,
                                   -pi / 2 * std::exp((xi - mu0) * (xi - mu0) / (xi * xi) + nu0 * nu0 / (ze * ze)), 2,
                                   xi, 0.0);
    auto sp = detail::slice_symbol("", g,
                                   -pi / 2 * std::exp(mu0 * mu0 / (xi * xi) + (ze - nu0) * (ze - nu0) / (ze * ze)), 2,
                                   0.0, ze);
    auto c = one();
    c *= detail::ci(pr.hbar / 2);
    s += sq;
    s += sp;
    s += c;
    return s;
  }
  if (base == "number") {
    auto s = q_pow(2);
    s *= mw / pr.hbar;
    auto p = p_pow(2);
    p *= 1 / (pr.hbar * mw);
    auto o = one();
    o *= -1.0;
    s += p;
    s += o;
    s *= 0.5;
    s.name = "number";
    return s;
  }
  if (base == "q_trace" || base == "p_trace" || base == "qp_trace") {
    const double k = std::sqrt(mw / pr.hbar);
    auto wexp = [k](double X) { return std::exp(detail::ci(k * X)); };
    const double scale = pi * xi * ze * c0;
    SingularSymbol s{std::string(base), g, {}};
    auto term = [&](cplx coef, int dmu, int dnu) {
      s.terms.push_back({coef, wexp, {{"mu", 0.0, dmu}, {"nu", 0.0, dnu}}});
    };
    const double am = 2 * mu0 / (xi * xi), an = 2 * nu0 / (ze * ze);
    if (base == "q_trace" || base == "p_trace") {
      const cplx c = detail::ci(std::sqrt(pr.hbar / mw)) * scale;
      const bool q = base == "q_trace";
      term(c * (q ? am : an), 0, 0);
      term(c, q ? 1 : 0, q ? 0 : 1);
    } else {
      const double c = -pr.hbar / mw * scale;
      term(c * am * an, 0, 0);
      term(c * am, 0, 1);
      term(c * an, 1, 0);
      term(c, 1, 1);
      term(detail::ci(pr.hbar / 2) * scale, 0, 0);
    }
    return s;
  }
  fail(ErrorKind::invalid_argument, "unknown singular symbol '" + std::string(name) +
                                        "' (expected one|q|p|qp|qn(n)|pn(n)|number|q_trace|p_trace|qp_trace)");
}

// ---------------------------------------------------------------------------
// Pairing

namespace detail {

/// 4-point Lagrange weights around x on the axis; nodal points are exact.
inline std::vector<std::pair<std::size_t, double>> cubic_weights(const Axis& ax, double x) {
  const double tol = 1e-12 * (ax.max() - ax.min());
  if (x < ax.min() - tol || x > ax.max() + tol)
    fail(ErrorKind::invalid_argument, "delta support " + ax.name() + "=" + fmt(x) + " outside the grid hull");
  const std::size_t near = ax.nearest(x);
  if (std::abs(ax[near] - x) <= tol) return {{near, 1.0}};
  const double u = (x - ax.min()) / ax.spacing();
  auto i0 = static_cast<long>(std::floor(u)) - 1;
  i0 = std::clamp<long>(i0, 0, static_cast<long>(ax.count()) - 4);
  std::vector<std::pair<std::size_t, double>> w;
  for (long a = i0; a < i0 + 4; ++a) {
    double l = 1;
    for (long b = i0; b < i0 + 4; ++b)
      if (b != a) l *= (x - ax[b]) / (ax[a] - ax[b]);
    w.push_back({static_cast<std::size_t>(a), l});
  }
  return w;
}

inline void check_symbol_target(Representation rep, const Prior& prior, Representation jrep, const Prior& jprior) {
  if (rep != jrep)
    fail(ErrorKind::invalid_argument,
         "symbol is " + to_string(rep) + " but the joint distribution is " + to_string(jrep));
  if (!same_prior(prior, jprior))
    fail(ErrorKind::invalid_argument, "symbol built for prior " + to_string(prior) + ", joint uses " + to_string(jprior));
}

}  // namespace detail

/// ∫ symbol · values over all axes; values are joint-distribution data (or
/// an operator applied to it) on axes named X, mu, nu or X, theta.
inline cplx pair(const RegularSymbol& s, const ComplexGrid& values, Quadrature rule = Quadrature::trapezoid) {
  std::vector<std::size_t> idx;
  for (const auto& v : s.vars) {
    if (!values.has_axis(v)) fail(ErrorKind::invalid_argument, "symbol variable '" + v + "' missing from grid");
    idx.push_back(values.axis_index(v));
  }
  std::vector<double> arg(idx.size());
  auto prod = ComplexGrid::tabulate(values.axes(), [&](std::span<const double> c) {
    for (std::size_t k = 0; k < idx.size(); ++k) arg[k] = c[idx[k]];
    return s.fn(arg);
  });
  for (std::size_t f = 0; f < prod.size(); ++f) prod[f] *= values[f];
  return integrate_all(prod, rule);
}

inline cplx pair(const RegularSymbol& s, const JointDistribution& j, Quadrature rule = Quadrature::trapezoid) {
  detail::check_symbol_target(s.rep, s.prior, j.rep, j.prior);
  return pair(s, to_complex(j.grid), rule);
}

/// Slices at the delta supports; δ⁽ᵏ⁾ factors become (−∂)ᵏ of the X-integrated
/// data, evaluated by 4-point interpolation in mu and nu.
inline cplx pair(const SingularSymbol& s, const ComplexGrid& values) {
  for (const char* a : {"X", "mu", "nu"})
    if (!values.has_axis(a)) fail(ErrorKind::invalid_argument, std::string("singular pairing needs axis '") + a + "'");
  const std::size_t ix = values.axis_index("X");
  const Axis& xa = values.axis(ix);
  cplx total = 0;
  for (const auto& t : s.terms) {
    // G(mu, nu) = ∫ weight(X) values dX
    std::vector<cplx> wt(xa.count());
    for (std::size_t i = 0; i < xa.count(); ++i) wt[i] = t.weight(xa[i]);
    ComplexGrid weighted = values;
    weighted.for_each_line(ix, [&](std::size_t start, std::size_t stride, std::size_t n) {
      for (std::size_t i = 0; i < n; ++i) weighted[start + i * stride] *= wt[i];
    });
    ComplexGrid G = integrate(weighted, {ix});
    double sign = 1;
    for (const auto& dlt : t.deltas)
      if (dlt.order > 0) {
        G = derivative(G, G.axis_index(dlt.axis), dlt.order);
        if (dlt.order % 2) sign = -sign;
      }
    std::vector<std::vector<std::pair<std::size_t, double>>> w(G.rank());
    for (std::size_t a = 0; a < G.rank(); ++a) {
      const auto& name = G.axis(a).name();
      const DeltaFactor* df = nullptr;
      for (const auto& dlt : t.deltas)
        if (dlt.axis == name) df = &dlt;
      if (!df) fail(ErrorKind::invalid_argument, "singular symbol has no support for axis '" + name + "'");
      w[a] = detail::cubic_weights(G.axis(a), df->support);
    }
    require(G.rank() == 2, "singular pairing expects exactly mu and nu besides X");
    cplx v = 0;
    for (auto [i, a] : w[0])
      for (auto [k, b] : w[1]) v += a * b * G.at({i, k});
    total += t.coefficient * sign * v;
  }
  return total;
}

inline cplx pair(const SingularSymbol& s, const JointDistribution& j) {
  detail::check_symbol_target(Representation::symplectic, Prior{s.prior}, j.rep, j.prior);
  return pair(s, to_complex(j.grid));
}

}  // namespace jpr
