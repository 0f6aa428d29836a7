#pragma once
// Evolution right-hand sides, stationary-state residuals and the
// stationarity condition in symplectic and optical joint representations.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "jpr/error.hpp"
#include "jpr/gridcalc.hpp"
#include "jpr/jointdist.hpp"
#include "jpr/opalg.hpp"
#include "jpr/parse.hpp"
#include "jpr/states.hpp"
#include "jpr/tomography.hpp"

namespace jpr {

inline constexpr int kMaxPotentialDegree = 6;

/// V(q) = Σ c_k qᵏ.
struct PolynomialPotential {
  std::vector<double> coefficients{0.0, 0.0, 0.5};

  void validate() const {
    require(!coefficients.empty(), "potential needs at least one coefficient");
    require(coefficients.size() <= kMaxPotentialDegree + 1,
            "potential degree above " + std::to_string(kMaxPotentialDegree) + " not supported");
    for (double c : coefficients) require(std::isfinite(c), "potential coefficients must be finite");
  }

  /// mω²q²/2
  static PolynomialPotential harmonic(const OscillatorParams& pr) {
    return {{0.0, 0.0, 0.5 * pr.mass * pr.omega * pr.omega}};
  }

  double operator()(double q) const {
    double v = 0;
    for (std::size_t k = coefficients.size(); k-- > 0;) v = v * q + coefficients[k];
    return v;
  }
};

/// "0,0,0.5" -> c₀, c₁, c₂
inline PolynomialPotential parse_potential(std::string_view text) {
  PolynomialPotential v{{}};
  for (const auto& part : split(text, ',')) v.coefficients.push_back(parse_double(trim(part), "potential coefficient"));
  v.validate();
  return v;
}

inline std::string to_string(const PolynomialPotential& v) {
  std::string s;
  for (std::size_t i = 0; i < v.coefficients.size(); ++i) s += (i ? "," : "") + fmt(v.coefficients[i]);
  return s;
}

struct ResidualReport {
  std::string equation;
  std::string state;
  double relative = 0;
  double max_abs = 0;
  double lhs_norm = 0;
  double rhs_norm = 0;
  std::vector<Axis> axes;
  std::size_t points = 0;
  std::vector<std::string> notes;
};

struct ResidualOptions {
  double margin = 0.1;
  /// Chebyshev radius (cells) around μ=ν=0 left out of symplectic norms.
  std::size_t origin_cells = 6;
  int accuracy = kDefaultAccuracy;
};

inline constexpr double kResidualEps = 1e-12;

namespace detail {

inline OpRepresentation op_rep(const JointDistribution& j) {
  if (j.rep == Representation::symplectic) {
    if (!std::holds_alternative<GaussianPrior>(j.prior))
      fail(ErrorKind::invalid_argument, "symplectic joint needs a Gaussian prior");
    return OpRepresentation::symplectic_joint(std::get<GaussianPrior>(j.prior), j.params);
  }
  return OpRepresentation::optical_joint(std::get<GaussianSumPrior>(j.prior), j.params);
}

inline void require_rep(const JointDistribution& j, Representation r) {
  if (j.rep != r)
    fail(ErrorKind::invalid_argument, "expected a " + to_string(r) + " joint distribution, got " + to_string(j.rep));
}

inline std::vector<bool> residual_mask(const std::vector<Axis>& axes, const ResidualOptions& opt) {
  auto mask = interior_mask(axes, opt.margin);
  std::vector<std::size_t> pidx;
  for (std::size_t a = 0; a < axes.size(); ++a)
    if (axes[a].name() == "mu" || axes[a].name() == "nu") pidx.push_back(a);
  if (pidx.size() != 2) return mask;
  std::vector<std::size_t> stride(axes.size(), 1);
  for (std::size_t k = axes.size(); k-- > 1;) stride[k - 1] = stride[k] * axes[k].count();
  std::vector<long> centre;
  for (auto a : pidx) {
    const auto c = axes[a].nearest(0.0);
    if (std::abs(axes[a][c]) > 0.5 * axes[a].spacing()) return mask;
    centre.push_back(static_cast<long>(c));
  }
  const long r = static_cast<long>(opt.origin_cells);
  for (std::size_t f = 0; f < mask.size(); ++f) {
    if (!mask[f]) continue;
    bool near = true;
    for (std::size_t k = 0; k < 2; ++k) {
      const long i = static_cast<long>((f / stride[pidx[k]]) % axes[pidx[k]].count());
      if (std::abs(i - centre[k]) > r) near = false;
    }
    if (near) mask[f] = false;
  }
  return mask;
}

inline double masked_norm(const RealGrid& g, const std::vector<bool>& mask) {
  double s = 0;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (mask[i]) s += g[i] * g[i];
  return std::sqrt(s);
}

}  // namespace detail

/// ||L − R|| / max(||L||, ||R||, scale terms, ε) over the interior. Extra
/// scale terms make a vanishing right-hand side a cancellation ratio.
inline ResidualReport residual_report(std::string equation, const RealGrid& lhs, const RealGrid& rhs,
                                      const std::vector<const RealGrid*>& scale_terms = {},
                                      const ResidualOptions& opt = {}) {
  require(lhs.axes() == rhs.axes(), "residual sides live on different grids");
  auto mask = detail::residual_mask(lhs.axes(), opt);
  ResidualReport r;
  r.equation = std::move(equation);
  r.axes = lhs.axes();
  RealGrid diff = lhs - rhs;
  r.lhs_norm = detail::masked_norm(lhs, mask);
  r.rhs_norm = detail::masked_norm(rhs, mask);
  double denom = std::max({r.lhs_norm, r.rhs_norm, kResidualEps});
  for (const auto* t : scale_terms) denom = std::max(denom, detail::masked_norm(*t, mask));
  r.relative = detail::masked_norm(diff, mask) / denom;
  for (std::size_t i = 0; i < diff.size(); ++i)
    if (mask[i]) {
      r.max_abs = std::max(r.max_abs, std::abs(diff[i]));
      ++r.points;
    }
  for (const auto* g : {&lhs, &rhs})
    for (const auto& w : g->warnings()) r.notes.push_back(w);
  if (!all_finite(diff)) fail(ErrorKind::numeric, "non-finite values in " + r.equation + " residual");
  return r;
}

// ---------------------------------------------------------------------------
// Symplectic

/// V([q̂]) composed from the position rule.
inline OperatorExpr potential_operator(const PolynomialPotential& V, const OpRepresentation& rep) {
  V.validate();
  return polynomial_of_operator(position_operator(rep, Path::conjugated), V.coefficients);
}

/// Σ p̂²/2m + V(q̂) in the given representation.
inline OperatorExpr hamiltonian_operator(const PolynomialPotential& V, const OpRepresentation& rep) {
  auto p = momentum_operator(rep, Path::conjugated);
  return sum({product({scalar(0.5 / rep.params.mass), p, p}), potential_operator(V, rep)});
}

struct EvolutionTerms {
  RealGrid drift;      // kinetic part
  RealGrid potential;  // (2/ħ) Im V([q̂]) M̃
  RealGrid total() const { return drift + potential; }
};

/// Terms of ∂_t M̃ = [Σ (μ/m)(2(ν−ν₀)/ζ² + ∂_ν) + (2/ħ) Im V([q̂])] M̃.
inline EvolutionTerms evolution_terms_symplectic(const JointDistribution& j, const PolynomialPotential& V,
                                                 const ApplyOptions& opt = {}) {
  detail::require_rep(j, Representation::symplectic);
  const auto rep = detail::op_rep(j);
  const auto& g = rep.p1();
  const double m = j.params.mass;
  const std::size_t imu = j.grid.axis_index("mu"), inu = j.grid.axis_index("nu");
  auto dnu = derivative(j.grid, inu, 1, opt.accuracy);
  RealGrid drift(j.grid.axes());
  for (std::size_t f = 0; f < drift.size(); ++f) {
    auto idx = j.grid.unflatten(f);
    const double mu = j.grid.axis(imu)[idx[imu]], nu = j.grid.axis(inu)[idx[inu]];
    drift[f] = mu / m * (2 * (nu - g.nu0) / (g.zeta * g.zeta) * j.grid[f] + dnu[f]);
  }
  auto vm = apply_operator(potential_operator(V, rep), j.grid, opt);
  RealGrid pot = imag_part(vm);
  pot *= 2 / j.params.hbar;
  return {std::move(drift), std::move(pot)};
}

inline RealGrid evolution_rhs_symplectic(const JointDistribution& j, const PolynomialPotential& V,
                                         const ApplyOptions& opt = {}) {
  return evolution_terms_symplectic(j, V, opt).total();
}

/// (2/ħ) Im Ĥ([q̂],[p̂]) M̃ with the kinetic term composed from [p̂].
inline RealGrid evolution_rhs_general(const JointDistribution& j, const PolynomialPotential& V,
                                      const ApplyOptions& opt = {}) {
  auto h = apply_operator(hamiltonian_operator(V, detail::op_rep(j)), j.grid, opt);
  RealGrid out = imag_part(h);
  out *= 2 / j.params.hbar;
  return out;
}

/// [Σ (μ/m)((ν−ν₀)/ζ² + ∂_ν/2) + (1/ħ) Im V([q̂])] M̃, evaluated as printed.
inline RealGrid stationarity_condition_values(const JointDistribution& j, const PolynomialPotential& V,
                                              const ApplyOptions& opt = {}) {
  detail::require_rep(j, Representation::symplectic);
  const auto rep = detail::op_rep(j);
  const auto& g = rep.p1();
  const double m = j.params.mass;
  const std::size_t imu = j.grid.axis_index("mu"), inu = j.grid.axis_index("nu");
  auto dnu = derivative(j.grid, inu, 1, opt.accuracy);
  auto vm = imag_part(apply_operator(potential_operator(V, rep), j.grid, opt));
  RealGrid out(j.grid.axes());
  for (std::size_t f = 0; f < out.size(); ++f) {
    auto idx = j.grid.unflatten(f);
    const double mu = j.grid.axis(imu)[idx[imu]], nu = j.grid.axis(inu)[idx[inu]];
    out[f] = mu / m * ((nu - g.nu0) / (g.zeta * g.zeta) * j.grid[f] + 0.5 * dnu[f]) + vm[f] / j.params.hbar;
  }
  return out;
}

inline ResidualReport stationarity_condition_symplectic(const JointDistribution& j, const PolynomialPotential& V,
                                                        const ResidualOptions& opt = {}) {
  auto terms = evolution_terms_symplectic(j, V, {opt.accuracy});
  RealGrid half_drift = terms.drift, half_pot = terms.potential;
  half_drift *= 0.5;
  half_pot *= 0.5;
  auto cond = stationarity_condition_values(j, V, {opt.accuracy});
  return residual_report("stationarity-condition-symplectic", cond, RealGrid(cond.axes()), {&half_drift, &half_pot},
                         opt);
}

/// Right-hand side of the stationary equation with the kinetic operator as
/// typeset: (ν+ν₀) where the correspondence rules give (ν−ν₀).
inline RealGrid stationary_rhs_typeset(const JointDistribution& j, const PolynomialPotential& V,
                                       const ApplyOptions& opt = {}) {
  detail::require_rep(j, Representation::symplectic);
  const auto rep = detail::op_rep(j);
  const auto& g = rep.p1();
  const auto& pr = j.params;
  const double nu0 = g.nu0, z2 = g.zeta * g.zeta;
  auto s = func({"nu"}, [=](std::span<const double> c) { return cplx((c[0] + nu0) / z2); }, "(nu+nu0)/zeta^2");
  auto s2 = func({"nu"}, [=](std::span<const double> c) { return cplx(2 * (c[0] + nu0) * (c[0] + nu0) / (z2 * z2)); },
                 "2(nu+nu0)^2/zeta^4");
  auto inner = sum({s2, product({scalar(0.5), d("nu", 2)}), product({scalar(2.0), s, d("nu")}), scalar(1 / z2)});
  auto kinetic = sum({product({scalar(1 / pr.mass), dinv("X", 2), inner}),
                      product({scalar(-pr.hbar * pr.hbar / (8 * pr.mass)), coord("mu", 2), d("X", 2)})});
  auto h = apply_operator(sum({kinetic, potential_operator(V, rep)}), j.grid, opt);
  return real_part(h);
}

/// E M̃ against Re Ĥ([q̂],[p̂]) M̃. The kinetic operator is composed from the
/// momentum rule; `typeset` switches to the displayed (ν+ν₀) form.
inline ResidualReport stationary_residual_symplectic(const JointDistribution& j, const PolynomialPotential& V, double E,
                                                     bool typeset = false, const ResidualOptions& opt = {}) {
  detail::require_rep(j, Representation::symplectic);
  RealGrid rhs = typeset ? stationary_rhs_typeset(j, V, {opt.accuracy})
                         : real_part(apply_operator(hamiltonian_operator(V, detail::op_rep(j)), j.grid, {opt.accuracy}));
  RealGrid lhs = j.grid;
  lhs *= E;
  auto r = residual_report(typeset ? "stationary-symplectic-typeset" : "stationary-symplectic", lhs, rhs, {}, opt);
  r.notes.push_back("E=" + fmt(E));
  return r;
}

/// Relative difference between the composed and typeset stationary right-hand sides.
inline ResidualReport stationary_typeset_discrepancy(const JointDistribution& j, const PolynomialPotential& V,
                                                     const ResidualOptions& opt = {}) {
  auto composed = real_part(apply_operator(hamiltonian_operator(V, detail::op_rep(j)), j.grid, {opt.accuracy}));
  auto typeset = stationary_rhs_typeset(j, V, {opt.accuracy});
  auto r = residual_report("stationary-symplectic typeset vs composed", typeset, composed, {}, opt);
  r.notes.push_back("typeset kinetic term uses (nu+nu0); composition from the momentum rule gives (nu-nu0)");
  return r;
}

// ---------------------------------------------------------------------------
// Optical

namespace detail {

inline OperatorExpr cos2_theta() {
  return func({"theta"}, [](std::span<const double> c) { return cplx(std::cos(c[0]) * std::cos(c[0])); }, "cos^2 theta");
}
inline OperatorExpr sin2_theta_double() {
  return func({"theta"}, [](std::span<const double> c) { return cplx(std::sin(2 * c[0])); }, "sin 2theta");
}

/// ω[cos²θ D_θ − ½ sin2θ (1 + X∂_X)], D_θ = ∂_θ for tomograms, ∂_θ − P'/P for joints.
inline OperatorExpr optical_drift(const OscillatorParams& pr, const OperatorExpr& dtheta) {
  return product({scalar(pr.omega), sum({product({cos2_theta(), dtheta}),
                                         product({scalar(-0.5), sin2_theta_double(),
                                                  sum({identity(), product({coord("X"), d("X")})})})})});
}

}  // namespace detail

/// Tomographic optical evolution right-hand side, applied to w.
inline RealGrid evolution_rhs_optical_tomogram(const Tomogram& w, const PolynomialPotential& V,
                                               const ApplyOptions& opt = {}) {
  require(w.rep == Representation::optical, "optical tomogram expected");
  auto rep = OpRepresentation::optical(w.params);
  auto op = sum({detail::optical_drift(w.params, d("theta")),
                 product({scalar(cplx(0, -2 / w.params.hbar)), potential_operator(V, rep)})});
  // (2/ħ) Im V w = Re(−(2i/ħ) V w) for real w; drift is real
  return real_part(apply_operator(op, w.grid, opt));
}

struct OpticalEvolutionTerms {
  RealGrid drift;
  RealGrid potential;
  RealGrid total() const { return drift + potential; }
};

/// ∂_t w̃ with the drift ω[cos²θ(2P⁻¹ΣQ_k(θ−f_k)/φ_k² 𝒫_k + ∂_θ) − ½ sin2θ(1+X∂_X)]
/// and (2/ħ) Im V([q̂]_w̃).
inline OpticalEvolutionTerms evolution_terms_optical(const JointDistribution& j, const PolynomialPotential& V,
                                                     const ApplyOptions& opt = {}) {
  detail::require_rep(j, Representation::optical);
  const auto rep = detail::op_rep(j);
  auto dth = sum({neg_log_derivative(*rep.prior, "theta"), d("theta")});
  RealGrid drift = real_part(apply_operator(detail::optical_drift(j.params, dth), j.grid, opt));
  RealGrid pot = imag_part(apply_operator(potential_operator(V, rep), j.grid, opt));
  pot *= 2 / j.params.hbar;
  return {std::move(drift), std::move(pot)};
}

inline RealGrid evolution_rhs_optical(const JointDistribution& j, const PolynomialPotential& V,
                                      const ApplyOptions& opt = {}) {
  return evolution_terms_optical(j, V, opt).total();
}

/// Kinetic operator of the optical stationary equation in the joint
/// representation, as displayed; `single_peak` uses the one-component
/// closed-form coefficients.
inline OperatorExpr optical_stationary_kinetic(const OpRepresentation& rep, bool single_peak) {
  require(rep.kind == RepKind::optical_joint, "optical joint representation expected");
  const auto& pr = rep.params;
  const auto& prior = rep.p2();
  const double mw2 = pr.mass * pr.omega * pr.omega;
  OperatorExpr block, shifted;
  if (single_peak) {
    if (prior.components().size() != 1)
      fail(ErrorKind::invalid_argument, "single-peak form needs a one-component prior");
    const double f = prior.components()[0].centre, phi = prior.components()[0].width;
    const double p2 = phi * phi;
    auto lin = func({"theta"}, [=](std::span<const double> c) { return cplx(4 * (c[0] - f) / p2); }, "4(theta-f)/phi^2");
    auto quad = func({"theta"},
                     [=](std::span<const double> c) { return cplx(4 * (c[0] - f) * (c[0] - f) / (p2 * p2) + 2 / p2); },
                     "4(theta-f)^2/phi^4+2/phi^2");
    auto half = func({"theta"}, [=](std::span<const double> c) { return cplx(2 * (c[0] - f) / p2); }, "2(theta-f)/phi^2");
    block = sum({d("theta", 2), product({lin, d("theta")}), quad, identity()});
    shifted = sum({d("theta"), half});
  } else {
    const Prior P{prior};
    // −2(P'/P)∂ + 2(P'/P)² − P''/P with −P'/P from the shared closed form
    block = sum({d("theta", 2), product({scalar(2.0), neg_log_derivative(P, "theta"), d("theta")}),
                 second_conjugation_term(P, "theta"), identity()});
    shifted = sum({d("theta"), neg_log_derivative(P, "theta")});
  }
  auto bracket = sum({
      product({scalar(0.5), detail::cos2_theta(), dinv("X", 2), block}),
      product({scalar(-0.5), coord("X"), dinv("X"), sum({detail::cos2_theta(), product({detail::sin2_theta_double(), shifted})})}),
      product({scalar(0.5), coord("X", 2),
               func({"theta"}, [](std::span<const double> c) { return cplx(std::pow(std::sin(c[0]), 2)); }, "sin^2 theta")}),
      product({scalar(-pr.hbar * pr.hbar / (8 * pr.mass * pr.mass * pr.omega * pr.omega)), detail::cos2_theta(), d("X", 2)}),
  });
  return product({scalar(mw2), bracket});
}

/// Re Ĥ w̃ with the displayed kinetic operator plus Re V([q̂]_w̃).
inline RealGrid stationary_rhs_optical(const JointDistribution& j, const PolynomialPotential& V, bool single_peak,
                                       const ApplyOptions& opt = {}) {
  detail::require_rep(j, Representation::optical);
  const auto rep = detail::op_rep(j);
  auto op = sum({optical_stationary_kinetic(rep, single_peak), potential_operator(V, rep)});
  return real_part(apply_operator(op, j.grid, opt));
}

inline ResidualReport stationary_residual_optical(const JointDistribution& j, const PolynomialPotential& V, double E,
                                                  bool single_peak = false, const ResidualOptions& opt = {}) {
  auto rhs = stationary_rhs_optical(j, V, single_peak, {opt.accuracy});
  RealGrid lhs = j.grid;
  lhs *= E;
  auto r = residual_report(single_peak ? "stationary-optical-single-peak" : "stationary-optical", lhs, rhs, {}, opt);
  r.notes.push_back("E=" + fmt(E));
  return r;
}

// ---------------------------------------------------------------------------
// Analytic trajectory and time stepping

/// Harmonic-oscillator coherent state α(t) = α₀ e^{−iωt} as a joint distribution.
inline JointDistribution coherent_joint_trajectory(cplx alpha0, double t, const Prior& prior,
                                                   const std::vector<Axis>& axes, const OscillatorParams& pr = {}) {
  const cplx a = alpha0 * std::exp(cplx(0, -pr.omega * t));
  auto T = tomogram_analytic(Coherent{a}, pr, representation_of(prior), axes);
  return make_joint(T, prior);
}

/// Centered difference (J(t+δ) − J(t−δ)) / 2δ of the analytic trajectory.
inline RealGrid coherent_time_derivative(cplx alpha0, double t, const Prior& prior, const std::vector<Axis>& axes,
                                         const OscillatorParams& pr = {}, double delta = 1e-4) {
  auto a = coherent_joint_trajectory(alpha0, t + delta, prior, axes, pr);
  auto b = coherent_joint_trajectory(alpha0, t - delta, prior, axes, pr);
  RealGrid d = a.grid - b.grid;
  d *= 1 / (2 * delta);
  return d;
}

inline RealGrid evolution_rhs(const JointDistribution& j, const PolynomialPotential& V, const ApplyOptions& opt = {}) {
  return j.rep == Representation::symplectic ? evolution_rhs_symplectic(j, V, opt) : evolution_rhs_optical(j, V, opt);
}


/// Growth of the largest value beyond this factor counts as a blow-up.
inline constexpr double kBlowUpFactor = 1e3;

struct EvolutionResult {
  JointDistribution joint;
  double time = 0;
  double mass_drift = 0;
  std::size_t steps = 0;
};

namespace detail {

inline bool optical_full_period(const JointDistribution& j) {
  if (j.rep != Representation::optical) return false;
  const Axis& xa = j.grid.axis(j.grid.axis_index("X"));
  const Axis& ta = j.grid.axis(j.grid.axis_index("theta"));
  return j.grid.rank() == 2 && j.grid.axis_index("X") == 0 && symmetric_axis(xa) && std::abs(ta.min()) < 1e-12 &&
         std::abs(ta.max() - std::numbers::pi) < 1e-12;
}

}  // namespace detail

/// Optical joint right-hand side with θ derivatives taken across the edges:
/// the tomogram w = w̃/P is continued past [0, π] by w(X, θ ± π) = w(−X, θ),
/// evolved by the tomographic equation and multiplied back by P. Equal to
/// evolution_rhs_optical in the interior; needed for stable time stepping
/// because θ = π is an inflow edge.
inline RealGrid evolution_rhs_optical_continued(const JointDistribution& j, const PolynomialPotential& V,
                                                std::size_t ghosts = 12, const ApplyOptions& opt = {}) {
  require(detail::optical_full_period(j), "continued optical RHS needs axes (X symmetric, theta over [0, pi])");
  const Axis& xa = j.grid.axis(0);
  const Axis& ta = j.grid.axis(1);
  const std::size_t nx = xa.count(), nt = ta.count();
  require(ghosts < nt, "too many ghost columns");
  const double h = ta.spacing();
  const auto& prior = std::get<GaussianSumPrior>(j.prior);
  std::vector<double> P(nt);
  for (std::size_t t = 0; t < nt; ++t) P[t] = prior_value(prior, ta[t]);
  const Axis te("theta", -static_cast<double>(ghosts) * h, ta.max() + static_cast<double>(ghosts) * h,
                nt + 2 * ghosts);
  RealGrid w({xa, te});
  const std::size_t ne = te.count();
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t e = 0; e < ne; ++e) {
      std::size_t xs = x, t;
      if (e < ghosts) {
        t = nt - 1 - (ghosts - e);
        xs = nx - 1 - x;
      } else if (e >= ghosts + nt) {
        t = e - ghosts - nt + 1;
        xs = nx - 1 - x;
      } else {
        t = e - ghosts;
      }
      w[x * ne + e] = j.grid[xs * nt + t] / P[t];
    }
  auto rhs_e = evolution_rhs_optical_tomogram(Tomogram{Representation::optical, std::move(w), j.params}, V, opt);
  RealGrid out(j.grid.axes());
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t t = 0; t < nt; ++t) out[x * nt + t] = P[t] * rhs_e[x * ne + t + ghosts];
  return out;
}

namespace detail {

/// Symplectic slices are fixed by the scaling law M(X, μ, ν) = λ M(λX, λμ, λν)
/// in two bands the stencils cannot resolve: the square of half-width
/// `origin_cells` around μ = ν = 0 (origin excluded), sampled from the ring
/// just outside it, and the outer `edge_cells` of the (μ, ν) box, sampled
/// from the largest circle clear of that band.
inline void impose_scaling_bands(JointDistribution& j, std::size_t origin_cells, std::size_t edge_cells) {
  if (j.rep != Representation::symplectic || j.grid.rank() != 3 || j.grid.axis_index("X") != 0 ||
      j.grid.axis_index("mu") != 1)
    return;
  const Axis& xa = j.grid.axis(0);
  const Axis& ma = j.grid.axis(1);
  const Axis& na = j.grid.axis(2);
  const std::size_t nx = xa.count(), nm = ma.count(), nn = na.count();
  const double h = std::max(ma.spacing(), na.spacing());
  const double half = std::min({-ma.min(), ma.max(), -na.min(), na.max()});
  const std::size_t i0 = ma.nearest(0.0), k0 = na.nearest(0.0);
  const bool centred = std::abs(ma[i0]) < 1e-9 * h && std::abs(na[k0]) < 1e-9 * h;
  const double r_origin = static_cast<double>(origin_cells + 1) * std::numbers::sqrt2 * h;
  const double r_edge = half - static_cast<double>(edge_cells + 1) * h;
  if (!centred || r_edge <= r_origin) return;
  const auto& g = std::get<GaussianPrior>(j.prior);
  RealGrid M(j.grid.axes());
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t i = 0; i < nm; ++i)
      for (std::size_t k = 0; k < nn; ++k) {
        const std::size_t f = (x * nm + i) * nn + k;
        M[f] = j.grid[f] / prior_value(g, ma[i], na[k]);
      }
  const auto dist = [](std::size_t a, std::size_t b) { return a > b ? a - b : b - a; };
  for (std::size_t i = 0; i < nm; ++i)
    for (std::size_t k = 0; k < nn; ++k) {
      const bool near_origin = std::max(dist(i, i0), dist(k, k0)) <= origin_cells && !(i == i0 && k == k0);
      const bool near_edge = i < edge_cells || k < edge_cells || i + edge_cells >= nm || k + edge_cells >= nn;
      if (!near_origin && !near_edge) continue;
      const double mu = ma[i], nu = na[k];
      const double lambda = (near_origin ? r_origin : r_edge) / std::hypot(mu, nu);
      const double P = prior_value(g, mu, nu);
      for (std::size_t x = 0; x < nx; ++x) {
        const double xs = lambda * xa[x];
        const double v = xa.contains(xs) ? lambda * interpolate(M, {xs, lambda * mu, lambda * nu}) : 0.0;
        j.grid[(x * nm + i) * nn + k] = P * v;
      }
    }
}

/// P · [(μ/m)∂_ν + (2/ħ) Im V([q̂])](M̃/P): the symplectic joint right-hand
/// side evaluated on the conditional tomogram, where the drift has no
/// reaction term.
inline RealGrid symplectic_rhs_via_tomogram(const JointDistribution& j, const PolynomialPotential& V,
                                            const ApplyOptions& opt = {}) {
  auto M = recover_conditional(j);
  const std::size_t imu = j.grid.axis_index("mu"), inu = j.grid.axis_index("nu");
  auto dnu = derivative(M.grid, inu, 1, opt.accuracy);
  RealGrid pot = imag_part(apply_operator(potential_operator(V, OpRepresentation::symplectic(j.params)), M.grid, opt));
  const auto& g = std::get<GaussianPrior>(j.prior);
  RealGrid out(j.grid.axes());
  for (std::size_t f = 0; f < out.size(); ++f) {
    auto idx = j.grid.unflatten(f);
    const double mu = j.grid.axis(imu)[idx[imu]], nu = j.grid.axis(inu)[idx[inu]];
    out[f] = prior_value(g, mu, nu) * (mu / j.params.mass * dnu[f] + 2 / j.params.hbar * pot[f]);
  }
  return out;
}

/// Right-hand side used by the time stepper.
inline RealGrid stepping_rhs(const JointDistribution& j, const PolynomialPotential& V) {
  if (j.rep == Representation::symplectic) return symplectic_rhs_via_tomogram(j, V);
  if (!optical_full_period(j)) return evolution_rhs(j, V);
  // each power of [q̂] applies one θ stencil
  const std::size_t ghosts = stencil_half_width() * (V.coefficients.size() + 1);
  return evolution_rhs_optical_continued(j, V, ghosts);
}

}  // namespace detail

/// Largest RK4-stable step from a power-iteration estimate of the spectral
/// radius of the right-hand side (imaginary-axis stability limit 2√2).
inline double stability_bound(const JointDistribution& j, const PolynomialPotential& V, int iterations = 12) {
  std::mt19937 rng(12345);
  std::normal_distribution<double> n01;
  JointDistribution v = j;
  for (auto& x : v.grid.values()) x = n01(rng);
  auto mask = interior_mask(j.grid.axes(), 0.0);
  double lambda = 0;
  for (int it = 0; it < iterations; ++it) {
    const double norm = std::sqrt(std::inner_product(v.grid.values().begin(), v.grid.values().end(),
                                                     v.grid.values().begin(), 0.0));
    v.grid *= 1 / norm;
    auto w = detail::stepping_rhs(v, V);
    lambda = std::sqrt(std::inner_product(w.values().begin(), w.values().end(), w.values().begin(), 0.0));
    v.grid = std::move(w);
  }
  return 2 * std::numbers::sqrt2 / std::max(lambda, kResidualEps);
}

/// Classic four-stage explicit integration of ∂_t J = RHS(J). Optical joints
/// over a full θ period use the continued right-hand side.
inline EvolutionResult step_evolution(const JointDistribution& j0, const PolynomialPotential& V, double dt,
                                      std::size_t steps,
                                      const std::function<void(const EvolutionResult&)>& snapshot = {}) {
  require(dt > 0 && std::isfinite(dt), "time step must be positive");
  require(static_cast<double>(steps) * dt <= 2 * std::numbers::pi / j0.params.omega + 1e-12,
          "integration horizon beyond one oscillator period");
  const double m0 = integrate_all(j0.grid);
  const std::size_t origin_cells = ResidualOptions{}.origin_cells;
  const double peak0 = max_abs(j0.grid);
  EvolutionResult res{j0, 0.0, 0.0, 0};
  auto with = [&](const RealGrid& base, const RealGrid& k, double h) {
    JointDistribution s = res.joint;
    s.grid = base;
    if (h != 0.0) {
      RealGrid dk = k;
      dk *= h;
      s.grid += dk;
    }
    detail::impose_scaling_bands(s, origin_cells, stencil_half_width());
    return s;
  };
  for (std::size_t n = 0; n < steps; ++n) {
    const RealGrid& y = res.joint.grid;
    auto k1 = detail::stepping_rhs(res.joint, V);
    auto k2 = detail::stepping_rhs(with(y, k1, dt / 2), V);
    auto k3 = detail::stepping_rhs(with(y, k2, dt / 2), V);
    auto k4 = detail::stepping_rhs(with(y, k3, dt), V);
    RealGrid inc = k1 + k4;
    RealGrid mid = k2 + k3;
    mid *= 2.0;
    inc += mid;
    inc *= dt / 6;
    res.joint.grid += inc;
    detail::impose_scaling_bands(res.joint, origin_cells, stencil_half_width());
    if (!all_finite(res.joint.grid) || max_abs(res.joint.grid) > kBlowUpFactor * peak0)
      fail(ErrorKind::numeric, "evolution blew up at step " + std::to_string(n + 1) + " (t=" + fmt(res.time + dt) +
                                   "); reduce dt below the stability bound " + fmt_g(stability_bound(j0, V), 3));
    res.time += dt;
    res.steps = n + 1;
    res.mass_drift = std::abs(integrate_all(res.joint.grid) - m0);
    if (snapshot) snapshot(res);
  }
  return res;
}

}  // namespace jpr
