#pragma once
// Linear operators on complex grid functions and the correspondence rules of
// position, momentum and ladder operators in tomographic and joint
// representations.

#include <algorithm>
#include <complex>
#include <functional>
#include <memory>
#include <cmath>
#include <span>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "jpr/error.hpp"
#include "jpr/gridcalc.hpp"
#include "jpr/jointdist.hpp"
#include "jpr/parse.hpp"
#include "jpr/states.hpp"

namespace jpr {

class OperatorExpr;

namespace op_node {

struct MulCoord {
  std::string axis;
  int power = 1;
};
/// Multiplication by a closed-form function of some grid coordinates.
struct MulFunc {
  std::vector<std::string> vars;
  std::function<cplx(std::span<const double>)> fn;
  std::string label;
};
struct Deriv {
  std::string axis;
  int order = 1;
};
struct InvDeriv {
  std::string axis;
  int n = 1;
};
struct Scalar {
  cplx value{1.0, 0.0};
};
struct Sum {
  std::vector<OperatorExpr> terms;
};
/// Composition; the rightmost factor acts first.
struct Product {
  std::vector<OperatorExpr> factors;
};

using Node = std::variant<MulCoord, MulFunc, Deriv, InvDeriv, Scalar, Sum, Product>;

}  // namespace op_node

/// Immutable operator expression tree.
class OperatorExpr {
 public:
  OperatorExpr() : node_(std::make_shared<op_node::Node>(op_node::Scalar{})) {}
  explicit OperatorExpr(op_node::Node n) : node_(std::make_shared<op_node::Node>(std::move(n))) {}

  const op_node::Node& node() const { return *node_; }

 private:
  std::shared_ptr<const op_node::Node> node_;
};

// ---------------------------------------------------------------------------
// Construction

inline OperatorExpr identity() { return OperatorExpr(op_node::Scalar{1.0}); }
inline OperatorExpr scalar(cplx c) { return OperatorExpr(op_node::Scalar{c}); }
inline OperatorExpr coord(std::string axis, int power = 1) {
  return OperatorExpr(op_node::MulCoord{std::move(axis), power});
}
inline OperatorExpr func(std::vector<std::string> vars, std::function<cplx(std::span<const double>)> fn,
                         std::string label) {
  return OperatorExpr(op_node::MulFunc{std::move(vars), std::move(fn), std::move(label)});
}
inline OperatorExpr d(std::string axis, int order = 1) {
  require(order == 1 || order == 2, "derivative order must be 1 or 2");
  return OperatorExpr(op_node::Deriv{std::move(axis), order});
}
inline OperatorExpr dinv(std::string axis, int n = 1) {
  require(n >= 1, "inverse derivative order must be positive");
  return OperatorExpr(op_node::InvDeriv{std::move(axis), n});
}
inline OperatorExpr sum(std::vector<OperatorExpr> terms) { return OperatorExpr(op_node::Sum{std::move(terms)}); }
inline OperatorExpr product(std::vector<OperatorExpr> factors) {
  return OperatorExpr(op_node::Product{std::move(factors)});
}

inline OperatorExpr operator+(const OperatorExpr& a, const OperatorExpr& b) { return sum({a, b}); }
inline OperatorExpr operator*(const OperatorExpr& a, const OperatorExpr& b) { return product({a, b}); }
inline OperatorExpr operator*(cplx c, const OperatorExpr& a) { return product({scalar(c), a}); }
inline OperatorExpr operator-(const OperatorExpr& a, const OperatorExpr& b) { return sum({a, product({scalar(-1.0), b})}); }

// ---------------------------------------------------------------------------
// Printing and structure

namespace detail {

inline std::string scalar_text(cplx c) {
  if (c.imag() == 0.0) return fmt_g(c.real(), 12);
  if (c.real() == 0.0) return fmt_g(c.imag(), 12) + "i";
  return "(" + fmt_g(c.real(), 12) + (c.imag() < 0 ? "" : "+") + fmt_g(c.imag(), 12) + "i)";
}

inline std::string render(const OperatorExpr& e, bool canonical) {
  using namespace op_node;
  return std::visit(
      [&](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, MulCoord>) {
          return n.power == 1 ? n.axis : n.axis + "^" + std::to_string(n.power);
        } else if constexpr (std::is_same_v<T, MulFunc>) {
          return "[" + n.label + "]";
        } else if constexpr (std::is_same_v<T, Deriv>) {
          return "d_" + n.axis + (n.order == 2 ? "^2" : "");
        } else if constexpr (std::is_same_v<T, InvDeriv>) {
          return "d_" + n.axis + "^-" + std::to_string(n.n);
        } else if constexpr (std::is_same_v<T, Scalar>) {
          return scalar_text(n.value);
        } else if constexpr (std::is_same_v<T, Sum>) {
          std::vector<std::string> parts;
          for (const auto& t : n.terms) parts.push_back(render(t, canonical));
          if (canonical) std::sort(parts.begin(), parts.end());
          std::string s = "(";
          for (std::size_t i = 0; i < parts.size(); ++i) s += (i ? " + " : "") + parts[i];
          return s + ")";
        } else {
          std::string s;
          for (std::size_t i = 0; i < n.factors.size(); ++i) s += (i ? " " : "") + render(n.factors[i], canonical);
          return n.factors.empty() ? "1" : s;
        }
      },
      e.node());
}

}  // namespace detail

inline std::string to_string(const OperatorExpr& e) { return detail::render(e, false); }

/// Structural equality up to the order of summands.
inline bool same_structure(const OperatorExpr& a, const OperatorExpr& b) {
  return detail::render(a, true) == detail::render(b, true);
}

// ---------------------------------------------------------------------------
// Application

struct ApplyOptions {
  int accuracy = kDefaultAccuracy;
};

namespace detail {

/// Values of fn over the referenced axes of g, broadcast to g's layout.
inline void multiply_by(ComplexGrid& g, const std::vector<std::string>& vars,
                        const std::function<cplx(std::span<const double>)>& fn) {
  std::vector<std::size_t> ax;
  for (const auto& v : vars) {
    if (!g.has_axis(v)) fail(ErrorKind::invalid_argument, "operator references axis '" + v + "' missing from grid");
    ax.push_back(g.axis_index(v));
  }
  std::vector<Axis> sub;
  for (auto a : ax) sub.push_back(g.axis(a));
  auto table = sub.empty() ? ComplexGrid() : ComplexGrid::tabulate(sub, fn);
  if (sub.empty()) table[0] = fn({});
  std::vector<std::size_t> tstride(ax.size(), 1);
  for (std::size_t k = ax.size(); k-- > 1;) tstride[k - 1] = tstride[k] * sub[k].count();
  for (std::size_t flat = 0; flat < g.size(); ++flat) {
    std::size_t t = 0;
    for (std::size_t k = 0; k < ax.size(); ++k) t += ((flat / g.stride(ax[k])) % g.axis(ax[k]).count()) * tstride[k];
    g[flat] *= table[t];
  }
}

inline std::size_t axis_of(const ComplexGrid& g, const std::string& name) {
  if (!g.has_axis(name)) fail(ErrorKind::invalid_argument, "operator references axis '" + name + "' missing from grid");
  return g.axis_index(name);
}

}  // namespace detail

/// Evaluates the operator on f. Products act right to left.
inline ComplexGrid apply_operator(const OperatorExpr& e, const ComplexGrid& f, const ApplyOptions& opt = {}) {
  using namespace op_node;
  return std::visit(
      [&](const auto& n) -> ComplexGrid {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, MulCoord>) {
          ComplexGrid g = f;
          const int p = n.power;
          detail::multiply_by(g, {n.axis}, [p](std::span<const double> c) { return cplx(std::pow(c[0], p)); });
          return g;
        } else if constexpr (std::is_same_v<T, MulFunc>) {
          ComplexGrid g = f;
          detail::multiply_by(g, n.vars, n.fn);
          return g;
        } else if constexpr (std::is_same_v<T, Deriv>) {
          return derivative(f, detail::axis_of(f, n.axis), n.order, opt.accuracy);
        } else if constexpr (std::is_same_v<T, InvDeriv>) {
          return inverse_derivative(f, detail::axis_of(f, n.axis), n.n, opt.accuracy);
        } else if constexpr (std::is_same_v<T, Scalar>) {
          ComplexGrid g = f;
          if (n.value != cplx(1.0)) g *= n.value;
          return g;
        } else if constexpr (std::is_same_v<T, Sum>) {
          if (n.terms.empty()) return ComplexGrid(f.axes());
          ComplexGrid acc = apply_operator(n.terms[0], f, opt);
          for (std::size_t i = 1; i < n.terms.size(); ++i) acc += apply_operator(n.terms[i], f, opt);
          return acc;
        } else {
          ComplexGrid g = f;
          for (auto it = n.factors.rbegin(); it != n.factors.rend(); ++it) g = apply_operator(*it, g, opt);
          return g;
        }
      },
      e.node());
}

inline ComplexGrid apply_operator(const OperatorExpr& e, const RealGrid& f, const ApplyOptions& opt = {}) {
  return apply_operator(e, to_complex(f), opt);
}

inline constexpr int kMaxPolynomialDegree = 6;

/// c₀ + c₁ A + c₂ A² + … composed by Horner's rule.
inline OperatorExpr polynomial_of_operator(const OperatorExpr& op, const std::vector<double>& coefficients) {
  require(!coefficients.empty(), "polynomial needs at least one coefficient");
  require(coefficients.size() <= kMaxPolynomialDegree + 1,
          "polynomial degree above " + std::to_string(kMaxPolynomialDegree) + " not supported");
  OperatorExpr acc = scalar(coefficients.back());
  for (std::size_t k = coefficients.size() - 1; k-- > 0;) {
    if (coefficients[k] == 0.0)
      acc = product({op, acc});
    else
      acc = sum({scalar(coefficients[k]), product({op, acc})});
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Representations

enum class RepKind { symplectic_tomogram, symplectic_joint, optical_tomogram, optical_joint };

struct OpRepresentation {
  RepKind kind = RepKind::symplectic_tomogram;
  std::optional<Prior> prior;
  OscillatorParams params;

  static OpRepresentation symplectic(OscillatorParams p = {}) { return {RepKind::symplectic_tomogram, {}, p}; }
  static OpRepresentation symplectic_joint(GaussianPrior pr, OscillatorParams p = {}) {
    return {RepKind::symplectic_joint, Prior{pr}, p};
  }
  static OpRepresentation optical(OscillatorParams p = {}) { return {RepKind::optical_tomogram, {}, p}; }
  static OpRepresentation optical_joint(GaussianSumPrior pr, OscillatorParams p = {}) {
    return {RepKind::optical_joint, Prior{std::move(pr)}, p};
  }

  bool is_symplectic() const { return kind == RepKind::symplectic_tomogram || kind == RepKind::symplectic_joint; }
  bool is_joint() const { return kind == RepKind::symplectic_joint || kind == RepKind::optical_joint; }
  /// Tomographic representation underlying a joint one.
  OpRepresentation tomographic() const {
    return {is_symplectic() ? RepKind::symplectic_tomogram : RepKind::optical_tomogram, {}, params};
  }
  const GaussianPrior& p1() const { return std::get<GaussianPrior>(*prior); }
  const GaussianSumPrior& p2() const { return std::get<GaussianSumPrior>(*prior); }
};


inline std::string to_string(const OpRepresentation& r) {
  switch (r.kind) {
    case RepKind::symplectic_tomogram: return "symplectic-tomogram";
    case RepKind::symplectic_joint: return "symplectic-joint(" + to_string(*r.prior) + ")";
    case RepKind::optical_tomogram: return "optical-tomogram";
    case RepKind::optical_joint: return "optical-joint(" + to_string(*r.prior) + ")";
  }
  return "?";
}

/// Which construction to use for joint-representation operators.
enum class Path { printed, conjugated };

// ---------------------------------------------------------------------------
// Prior factors shared by printed forms and conjugation

/// −(∂_η P)/P for the prior and parameter axis η, as a multiplication operator.
inline OperatorExpr neg_log_derivative(const Prior& prior, const std::string& axis) {
  if (auto* g = std::get_if<GaussianPrior>(&prior)) {
    if (axis == "mu") {
      const double mu0 = g->mu0, xi = g->xi;
      return func({"mu"}, [=](std::span<const double> c) { return cplx(2 * (c[0] - mu0) / (xi * xi)); },
                  "2(mu-" + fmt(mu0) + ")/" + fmt(xi) + "^2");
    }
    if (axis == "nu") {
      const double nu0 = g->nu0, zeta = g->zeta;
      return func({"nu"}, [=](std::span<const double> c) { return cplx(2 * (c[0] - nu0) / (zeta * zeta)); },
                  "2(nu-" + fmt(nu0) + ")/" + fmt(zeta) + "^2");
    }
    fail(ErrorKind::unsupported, "P1 has no parameter axis '" + axis + "'");
  }
  const auto& s = std::get<GaussianSumPrior>(prior);
  if (axis != "theta") fail(ErrorKind::unsupported, "P2 has no parameter axis '" + axis + "'");
  return func({"theta"},
              [s](std::span<const double> c) { return cplx(-prior_derivative(s, 1, c[0]) / prior_value(s, c[0])); },
              "2/P2 sum Q_k(theta-f_k)/phi_k^2 P_k");
}

/// 2(∂P/P)² − ∂²P/P, the zeroth-order term of P ∂² P⁻¹.
inline OperatorExpr second_conjugation_term(const Prior& prior, const std::string& axis) {
  if (auto* g = std::get_if<GaussianPrior>(&prior)) {
    const bool mu = axis == "mu";
    require(mu || axis == "nu", "P1 has no parameter axis '" + axis + "'");
    const double c0 = mu ? g->mu0 : g->nu0, w = mu ? g->xi : g->zeta;
    return func({axis},
                [=](std::span<const double> c) {
                  const double l = gaussian_derivative_ratio(1, c[0], c0, w);
                  return cplx(2 * l * l - gaussian_derivative_ratio(2, c[0], c0, w));
                },
                "2(d" + axis + " P/P)^2-d" + axis + "^2 P/P");
  }
  const auto& s = std::get<GaussianSumPrior>(prior);
  require(axis == "theta", "P2 has no parameter axis '" + axis + "'");
  return func({"theta"},
              [s](std::span<const double> c) {
                const double p = prior_value(s, c[0]);
                const double l = prior_derivative(s, 1, c[0]) / p;
                return cplx(2 * l * l - prior_derivative(s, 2, c[0]) / p);
              },
              "2(dtheta P/P)^2-dtheta^2 P/P");
}

namespace detail {

inline bool is_param_axis(const Prior& prior, const std::string& axis) {
  if (std::holds_alternative<GaussianPrior>(prior)) return axis == "mu" || axis == "nu";
  return axis == "theta";
}

}  // namespace detail

/// P · op · P⁻¹ with P ∂ P⁻¹ = ∂ − ∂P/P and
/// P ∂² P⁻¹ = ∂² − 2(∂P/P)∂ + 2(∂P/P)² − ∂²P/P.
inline OperatorExpr conjugate_by_prior(const OperatorExpr& e, const Prior& prior) {
  using namespace op_node;
  return std::visit(
      [&](const auto& n) -> OperatorExpr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Deriv>) {
          if (!detail::is_param_axis(prior, n.axis)) return e;
          if (n.order == 1) return sum({d(n.axis), neg_log_derivative(prior, n.axis)});
          return sum({d(n.axis, 2), product({scalar(2.0), neg_log_derivative(prior, n.axis), d(n.axis)}),
                      second_conjugation_term(prior, n.axis)});
        } else if constexpr (std::is_same_v<T, InvDeriv>) {
          if (detail::is_param_axis(prior, n.axis))
            fail(ErrorKind::unsupported, "no conjugation rule for an inverse derivative in parameter '" + n.axis + "'");
          return e;
        } else if constexpr (std::is_same_v<T, Sum>) {
          std::vector<OperatorExpr> t;
          for (const auto& x : n.terms) t.push_back(conjugate_by_prior(x, prior));
          return sum(std::move(t));
        } else if constexpr (std::is_same_v<T, Product>) {
          std::vector<OperatorExpr> t;
          for (const auto& x : n.factors) t.push_back(conjugate_by_prior(x, prior));
          return product(std::move(t));
        } else {
          return e;  // multiplications commute with P
        }
      },
      e.node());
}

// ---------------------------------------------------------------------------
// Correspondence rules

namespace detail {

inline cplx I(double v) { return {0.0, v}; }

inline OperatorExpr sin_theta() {
  return func({"theta"}, [](std::span<const double> c) { return cplx(std::sin(c[0])); }, "sin theta");
}
inline OperatorExpr cos_theta() {
  return func({"theta"}, [](std::span<const double> c) { return cplx(std::cos(c[0])); }, "cos theta");
}

/// Symplectic tomogram rules.
inline OperatorExpr q_symplectic(const OscillatorParams& p) {
  return sum({product({scalar(-1.0), d("mu"), dinv("X")}), product({scalar(I(p.hbar / 2)), coord("nu"), d("X")})});
}
inline OperatorExpr p_symplectic(const OscillatorParams& p) {
  return sum({product({scalar(-1.0), d("nu"), dinv("X")}), product({scalar(I(-p.hbar / 2)), coord("mu"), d("X")})});
}

/// Optical tomogram rules.
inline OperatorExpr q_optical(const OscillatorParams& p) {
  return sum({product({sin_theta(), dinv("X"), d("theta")}), product({coord("X"), cos_theta()}),
              product({scalar(I(p.hbar / (2 * p.mass * p.omega))), sin_theta(), d("X")})});
}
inline OperatorExpr p_optical(const OscillatorParams& p) {
  const double mw = p.mass * p.omega;
  return sum({product({scalar(mw), sum({product({scalar(-1.0), cos_theta(), dinv("X"), d("theta")}),
                                        product({coord("X"), sin_theta()})})}),
              product({scalar(I(-p.hbar / 2)), cos_theta(), d("X")})});
}

/// Joint-symplectic rules transcribed from their closed forms.
inline OperatorExpr q_symplectic_joint(const GaussianPrior& g, const OscillatorParams& p) {
  return sum({product({scalar(-1.0), sum({d("mu"), neg_log_derivative(g, "mu")}), dinv("X")}),
              product({scalar(I(p.hbar / 2)), coord("nu"), d("X")})});
}
/// Momentum rule with the ∂_X term carrying −iħμ/2, as conjugation requires.
inline OperatorExpr p_symplectic_joint(const GaussianPrior& g, const OscillatorParams& p, double x_term_sign = -1.0) {
  return sum({product({scalar(-1.0), sum({d("nu"), neg_log_derivative(g, "nu")}), dinv("X")}),
              product({scalar(I(x_term_sign * p.hbar / 2)), coord("mu"), d("X")})});
}

inline OperatorExpr q_optical_joint(const GaussianSumPrior& s, const OscillatorParams& p) {
  return sum({product({sin_theta(), dinv("X"), sum({d("theta"), neg_log_derivative(s, "theta")})}),
              product({coord("X"), cos_theta()}),
              product({scalar(I(p.hbar / (2 * p.mass * p.omega))), sin_theta(), d("X")})});
}
inline OperatorExpr p_optical_joint(const GaussianSumPrior& s, const OscillatorParams& p) {
  const double mw = p.mass * p.omega;
  return sum({product({scalar(mw),
                       sum({product({scalar(-1.0), cos_theta(), dinv("X"), sum({d("theta"), neg_log_derivative(s, "theta")})}),
                            product({coord("X"), sin_theta()})})}),
              product({scalar(I(-p.hbar / 2)), cos_theta(), d("X")})});
}

}  // namespace detail

/// [q̂] in the given representation. For joint representations, `path`
/// selects the closed-form transcription or P·[q̂]_tomo·P⁻¹.
inline OperatorExpr position_operator(const OpRepresentation& rep, Path path = Path::printed) {
  rep.params.validate();
  switch (rep.kind) {
    case RepKind::symplectic_tomogram: return detail::q_symplectic(rep.params);
    case RepKind::optical_tomogram: return detail::q_optical(rep.params);
    case RepKind::symplectic_joint:
      return path == Path::printed ? detail::q_symplectic_joint(rep.p1(), rep.params)
                                   : conjugate_by_prior(detail::q_symplectic(rep.params), *rep.prior);
    case RepKind::optical_joint:
      return path == Path::printed ? detail::q_optical_joint(rep.p2(), rep.params)
                                   : conjugate_by_prior(detail::q_optical(rep.params), *rep.prior);
  }
  fail(ErrorKind::unsupported, "unknown representation");
}

/// [p̂] in the given representation.
inline OperatorExpr momentum_operator(const OpRepresentation& rep, Path path = Path::printed) {
  rep.params.validate();
  switch (rep.kind) {
    case RepKind::symplectic_tomogram: return detail::p_symplectic(rep.params);
    case RepKind::optical_tomogram: return detail::p_optical(rep.params);
    case RepKind::symplectic_joint:
      return path == Path::printed ? detail::p_symplectic_joint(rep.p1(), rep.params)
                                   : conjugate_by_prior(detail::p_symplectic(rep.params), *rep.prior);
    case RepKind::optical_joint:
      return path == Path::printed ? detail::p_optical_joint(rep.p2(), rep.params)
                                   : conjugate_by_prior(detail::p_optical(rep.params), *rep.prior);
  }
  fail(ErrorKind::unsupported, "unknown representation");
}

/// The joint-symplectic momentum rule with its ∂_X term exactly as typeset
/// (+iħμ/2). It is not conjugate to the tomographic rule; kept for the
/// deviation ledger and regression checks.
inline OperatorExpr momentum_operator_as_typeset(const OpRepresentation& rep) {
  require(rep.kind == RepKind::symplectic_joint, "typeset momentum variant exists for symplectic-joint only");
  return detail::p_symplectic_joint(rep.p1(), rep.params, +1.0);
}

struct LadderPair {
  OperatorExpr a;
  OperatorExpr adag;
};

/// [â], [â†] in closed form (symplectic representations only).
inline LadderPair ladder_operators(const OpRepresentation& rep, Path path = Path::printed) {
  if (!rep.is_symplectic())
    fail(ErrorKind::unsupported, "ladder operators are only available in symplectic representations");
  const auto& p = rep.params;
  p.validate();
  const double mw = p.mass * p.omega;
  const double pref = std::sqrt(mw / (2 * p.hbar));
  if (rep.kind == RepKind::symplectic_joint && path == Path::conjugated) {
    auto tomo = ladder_operators(rep.tomographic());
    return {conjugate_by_prior(tomo.a, *rep.prior), conjugate_by_prior(tomo.adag, *rep.prior)};
  }
  // ħ/2 ∂_X (±mu/(mω) + i nu)
  auto x_part = [&](double sign) {
    return product({scalar(p.hbar / 2), d("X"),
                    sum({product({scalar(sign / mw), coord("mu")}), product({scalar(detail::I(1.0)), coord("nu")})})});
  };
  // ∂_X⁻¹ (∂_mu ± i ∂_nu/(mω) [+ shifts])
  auto inv_part = [&](double sign) {
    std::vector<OperatorExpr> inner{d("mu"), product({scalar(detail::I(sign / mw)), d("nu")})};
    if (rep.kind == RepKind::symplectic_joint) {
      inner.push_back(neg_log_derivative(*rep.prior, "mu"));
      inner.push_back(product({scalar(detail::I(sign / mw)), neg_log_derivative(*rep.prior, "nu")}));
    }
    return product({dinv("X"), sum(std::move(inner))});
  };
  auto build = [&](double sign) {
    return product({scalar(pref), sum({x_part(sign), product({scalar(-1.0), inv_part(sign)})})});
  };
  return {build(+1.0), build(-1.0)};
}

/// [â] = √(mω/2ħ)([q̂] + i[p̂]/(mω)), [â†] = √(mω/2ħ)([q̂] − i[p̂]/(mω)).
inline LadderPair ladder_from_position_momentum(const OpRepresentation& rep, Path path = Path::printed) {
  const auto& p = rep.params;
  const double mw = p.mass * p.omega;
  const double pref = std::sqrt(mw / (2 * p.hbar));
  auto q = position_operator(rep, path);
  auto pm = momentum_operator(rep, path);
  return {product({scalar(pref), sum({q, product({scalar(detail::I(1.0 / mw)), pm})})}),
          product({scalar(pref), sum({q, product({scalar(detail::I(-1.0 / mw)), pm})})})};
}

inline OperatorExpr number_operator(const OpRepresentation& rep, Path path = Path::printed) {
  auto l = ladder_operators(rep, path);
  return product({l.adag, l.a});
}

/// Operators selectable by name: q, p, a, adag, n, q2, p2, qp.
inline OperatorExpr named_operator(std::string_view name, const OpRepresentation& rep, Path path = Path::printed) {
  if (name == "q") return position_operator(rep, path);
  if (name == "p") return momentum_operator(rep, path);
  if (name == "a") return ladder_operators(rep, path).a;
  if (name == "adag") return ladder_operators(rep, path).adag;
  if (name == "n") return number_operator(rep, path);
  if (name == "q2") return product({position_operator(rep, path), position_operator(rep, path)});
  if (name == "p2") return product({momentum_operator(rep, path), momentum_operator(rep, path)});
  if (name == "qp") return product({position_operator(rep, path), momentum_operator(rep, path)});
  fail(ErrorKind::invalid_argument, "unknown operator '" + std::string(name) + "' (expected q|p|a|adag|n|q2|p2|qp)");
}

/// Interior mask excluding `margin` (fraction) of every axis at both ends.
inline std::vector<bool> interior_mask(const std::vector<Axis>& axes, double margin = 0.1) {
  std::size_t total = 1;
  for (const auto& a : axes) total *= a.count();
  std::vector<bool> mask(total, true);
  std::vector<std::size_t> stride(axes.size(), 1);
  for (std::size_t k = axes.size(); k-- > 1;) stride[k - 1] = stride[k] * axes[k].count();
  for (std::size_t flat = 0; flat < total; ++flat)
    for (std::size_t k = 0; k < axes.size(); ++k) {
      const std::size_t n = axes[k].count();
      const std::size_t i = (flat / stride[k]) % n;
      const auto cut = static_cast<std::size_t>(std::ceil(margin * static_cast<double>(n - 1)));
      if (i < cut || i + cut > n - 1) {
        mask[flat] = false;
        break;
      }
    }
  return mask;
}

}  // namespace jpr
