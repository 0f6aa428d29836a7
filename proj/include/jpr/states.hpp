#pragma once
// One-dimensional oscillator states: wavefunctions, density matrices and
// Wigner functions.

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "jpr/error.hpp"
#include "jpr/gridcalc.hpp"
#include "jpr/parse.hpp"

namespace jpr {

struct OscillatorParams {
  double mass = 1.0;
  double omega = 1.0;
  double hbar = 1.0;

  void validate() const {
    require(mass > 0 && std::isfinite(mass), "mass must be positive");
    require(omega > 0 && std::isfinite(omega), "omega must be positive");
    require(hbar > 0 && std::isfinite(hbar), "hbar must be positive");
  }
  /// Ground-state position variance ħ/(2mω).
  double sigma_q2() const { return hbar / (2 * mass * omega); }
  /// Ground-state momentum variance ħmω/2.
  double sigma_p2() const { return hbar * mass * omega / 2; }
};

inline constexpr int kMaxFock = 12;

struct Fock {
  int n = 0;
};
struct Coherent {
  cplx alpha{};
};
struct SqueezedGaussian {
  double q = 0.0;
  double p = 0.0;
  double s = 1.0;
};

using StateSpec = std::variant<Fock, Coherent, SqueezedGaussian>;

inline void validate(const StateSpec& spec) {
  if (auto* f = std::get_if<Fock>(&spec)) {
    require(f->n >= 0, "Fock n must be non-negative");
    require(f->n <= kMaxFock, "Fock n above " + std::to_string(kMaxFock) + " is not supported");
  } else if (auto* c = std::get_if<Coherent>(&spec)) {
    require(std::isfinite(c->alpha.real()) && std::isfinite(c->alpha.imag()), "coherent alpha must be finite");
  } else {
    const auto& g = std::get<SqueezedGaussian>(spec);
    require(g.s > 0 && std::isfinite(g.s), "squeezing s must be positive");
    require(std::isfinite(g.q) && std::isfinite(g.p), "gaussian centre must be finite");
  }
}

/// Parses `fock:n=2`, `coherent:re=0.5,im=0`, `gauss:q=1,p=0,s=2`.
inline StateSpec parse_state(std::string_view text) {
  auto [kind, kv] = parse_kind_kv(text);
  auto get = [&](const std::string& k, double dflt) {
    auto it = kv.find(k);
    return it == kv.end() ? dflt : parse_double(it->second, k);
  };
  auto only = [&](std::initializer_list<const char*> keys) {
    for (const auto& [k, v] : kv) {
      bool ok = false;
      for (auto* a : keys) ok = ok || k == a;
      require(ok, "unknown key '" + k + "' for state '" + kind + "'");
    }
  };
  StateSpec spec;
  if (kind == "fock") {
    only({"n"});
    auto it = kv.find("n");
    spec = Fock{it == kv.end() ? 0 : static_cast<int>(parse_long(it->second, "n"))};
  } else if (kind == "coherent") {
    only({"re", "im"});
    spec = Coherent{cplx(get("re", 0.0), get("im", 0.0))};
  } else if (kind == "gauss" || kind == "squeezed") {
    only({"q", "p", "s"});
    spec = SqueezedGaussian{get("q", 0.0), get("p", 0.0), get("s", 1.0)};
  } else {
    fail(ErrorKind::invalid_argument, "unknown state kind '" + kind + "' (expected fock, coherent or gauss)");
  }
  validate(spec);
  return spec;
}

inline std::string to_string(const StateSpec& spec) {
  if (auto* f = std::get_if<Fock>(&spec)) return "fock:n=" + std::to_string(f->n);
  if (auto* c = std::get_if<Coherent>(&spec))
    return "coherent:re=" + fmt(c->alpha.real()) + ",im=" + fmt(c->alpha.imag());
  const auto& g = std::get<SqueezedGaussian>(spec);
  return "gauss:q=" + fmt(g.q) + ",p=" + fmt(g.p) + ",s=" + fmt(g.s);
}

/// First and second moments of a state; qp is the symmetrized ⟨(q̂p̂ + p̂q̂)/2⟩.
struct Moments {
  double q = 0, p = 0, q2 = 0, p2 = 0, qp = 0;

  /// ⟨â†â⟩ from the second moments.
  double number(const OscillatorParams& pr) const {
    const double mw = pr.mass * pr.omega;
    return 0.5 * (mw * q2 / pr.hbar + p2 / (pr.hbar * mw)) - 0.5;
  }
};

/// Gaussian description: centre and (uncorrelated) variances.
struct GaussianShape {
  double q = 0, p = 0, var_q = 0, var_p = 0;
};

inline bool is_gaussian(const StateSpec& spec) {
  if (auto* f = std::get_if<Fock>(&spec)) return f->n == 0;
  return true;
}

inline GaussianShape gaussian_shape(const StateSpec& spec, const OscillatorParams& pr) {
  require(is_gaussian(spec), "state is not Gaussian: " + to_string(spec));
  if (std::holds_alternative<Fock>(spec)) return {0, 0, pr.sigma_q2(), pr.sigma_p2()};
  if (auto* c = std::get_if<Coherent>(&spec))
    return {std::sqrt(2 * pr.hbar / (pr.mass * pr.omega)) * c->alpha.real(),
            std::sqrt(2 * pr.hbar * pr.mass * pr.omega) * c->alpha.imag(), pr.sigma_q2(), pr.sigma_p2()};
  const auto& g = std::get<SqueezedGaussian>(spec);
  return {g.q, g.p, g.s * pr.sigma_q2(), pr.sigma_p2() / g.s};
}

inline Moments exact_moments(const StateSpec& spec, const OscillatorParams& pr) {
  validate(spec);
  if (auto* f = std::get_if<Fock>(&spec)) {
    double k = f->n + 0.5;
    return {0, 0, 2 * k * pr.sigma_q2(), 2 * k * pr.sigma_p2(), 0};
  }
  auto g = gaussian_shape(spec, pr);
  return {g.q, g.p, g.q * g.q + g.var_q, g.p * g.p + g.var_p, g.q * g.p};
}

/// Test states: Fock 0-3, three coherent amplitudes, two squeezed vacua.
inline std::vector<StateSpec> state_catalog() {
  const double r = 1 / std::numbers::sqrt2;
  return {Fock{0},         Fock{1},          Fock{2},
          Fock{3},         Coherent{{0, 0}}, Coherent{{r, 0}},
          Coherent{{r, r}}, SqueezedGaussian{0, 0, 0.5}, SqueezedGaussian{0, 0, 2}};
}

/// Normalised Hermite functions φ_0..φ_nmax at dimensionless ξ (unit-weight
/// oscillator eigenfunctions).
inline std::vector<double> hermite_functions(int nmax, double xi) {
  std::vector<double> phi(nmax + 1);
  phi[0] = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * xi * xi);
  if (nmax >= 1) phi[1] = std::sqrt(2.0) * xi * phi[0];
  for (int k = 1; k < nmax; ++k)
    phi[k + 1] = std::sqrt(2.0 / (k + 1)) * xi * phi[k] - std::sqrt(static_cast<double>(k) / (k + 1)) * phi[k - 1];
  return phi;
}

namespace detail {

inline cplx wavefunction_value(const StateSpec& spec, const OscillatorParams& pr, double q) {
  if (auto* f = std::get_if<Fock>(&spec)) {
    const double scale = std::sqrt(pr.mass * pr.omega / pr.hbar);
    return hermite_functions(f->n, q * scale)[f->n] * std::sqrt(scale);
  }
  auto g = gaussian_shape(spec, pr);
  const double d = q - g.q;
  const double amp = std::pow(2 * std::numbers::pi * g.var_q, -0.25) * std::exp(-d * d / (4 * g.var_q));
  return std::polar(amp, g.p * q / pr.hbar);
}

inline void check_support(const StateSpec& spec, const OscillatorParams& pr, const Axis& ax, std::vector<std::string>& warn) {
  auto m = exact_moments(spec, pr);
  const double sd = std::sqrt(std::max(m.q2 - m.q * m.q, 0.0));
  if (m.q - 3 * sd < ax.min() || m.q + 3 * sd > ax.max())
    warn.push_back("axis '" + ax.name() + "' spans fewer than 6 standard deviations of " + to_string(spec));
}

}  // namespace detail

/// ψ(q) tabulated on q_axis and renormalised on the grid.
inline ComplexGrid wavefunction(const StateSpec& spec, const OscillatorParams& pr, const Axis& q_axis) {
  validate(spec);
  pr.validate();
  auto psi = ComplexGrid::tabulate({q_axis}, [&](auto c) { return detail::wavefunction_value(spec, pr, c[0]); });
  RealGrid dens(psi.axes());
  for (std::size_t i = 0; i < psi.size(); ++i) dens[i] = std::norm(psi[i]);
  const double norm = integrate_all(dens);
  if (!(norm > 1e-300)) fail(ErrorKind::numeric, "wavefunction vanishes on the grid");
  psi *= cplx(1.0 / std::sqrt(norm));
  std::vector<std::string> warn;
  detail::check_support(spec, pr, q_axis, warn);
  psi.merge_warnings(warn);
  return psi;
}

/// ρ(q,q′) = ψ(q)ψ*(q′) over axes (q, q′).
inline ComplexGrid density_matrix(const StateSpec& spec, const OscillatorParams& pr, const Axis& q_axis) {
  auto psi = wavefunction(spec, pr, q_axis);
  const std::size_t n = q_axis.count();
  ComplexGrid rho({q_axis, q_axis.renamed(q_axis.name() + "'")});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) rho[i * n + j] = psi[i] * std::conj(psi[j]);
  rho.merge_warnings(psi.warnings());
  return rho;
}

struct WignerFn {
  RealGrid grid;  // axes (q, p)
  OscillatorParams params;
};

inline constexpr double kImagResidueTol = 1e-8;

/// W(q,p) = (1/2πħ) ∫ ρ(q+u/2, q−u/2) e^{−ipu/ħ} du, with u sampled at the
/// q spacing and ρ evaluated off-grid by cubic B-splines.
inline WignerFn wigner_from_density(const ComplexGrid& rho, const OscillatorParams& pr, const Axis& p_axis) {
  pr.validate();
  require(rho.rank() == 2, "wigner_from_density: density matrix must be rank 2");
  const Axis& qa = rho.axis(0);
  require(qa.count() == rho.axis(1).count() && qa.min() == rho.axis(1).min() && qa.max() == rho.axis(1).max(),
          "wigner_from_density: density matrix axes must coincide");
  const std::size_t nq = qa.count();
  const std::size_t np = p_axis.count();
  const double h = qa.spacing();

  std::vector<double> re(rho.size()), im(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) {
    re[i] = rho[i].real();
    im[i] = rho[i].imag();
  }
  BSpline2D sre(qa, rho.axis(1), re), sim(qa, rho.axis(1), im);

  const long K = static_cast<long>(nq - 1);  // |u| ≤ full axis width
  const std::size_t nu = static_cast<std::size_t>(2 * K + 1);
  std::vector<cplx> phase(np * nu);
  for (std::size_t j = 0; j < np; ++j)
    for (std::size_t k = 0; k < nu; ++k) {
      const double u = static_cast<double>(static_cast<long>(k) - K) * h;
      phase[j * nu + k] = std::polar(1.0, -p_axis[j] * u / pr.hbar);
    }

  RealGrid W({qa.renamed("q"), p_axis.renamed("p")});
  W.merge_warnings(rho.warnings());
  std::vector<cplx> integrand(nu);
  double max_imag = 0.0, max_real = 0.0;
  const double pref = h / (2 * std::numbers::pi * pr.hbar);
  for (std::size_t i = 0; i < nq; ++i) {
    const double q = qa[i];
    for (std::size_t k = 0; k < nu; ++k) {
      const double u = static_cast<double>(static_cast<long>(k) - K) * h;
      const double a = q + 0.5 * u, b = q - 0.5 * u;
      integrand[k] = qa.contains(a) && qa.contains(b) ? cplx(sre(a, b), sim(a, b)) : cplx{};
    }
    for (std::size_t j = 0; j < np; ++j) {
      cplx acc{};
      const cplx* ph = phase.data() + j * nu;
      for (std::size_t k = 0; k < nu; ++k) acc += integrand[k] * ph[k];
      acc *= pref;
      W[i * np + j] = acc.real();
      max_imag = std::max(max_imag, std::abs(acc.imag()));
      max_real = std::max(max_real, std::abs(acc.real()));
    }
  }
  if (max_imag > kImagResidueTol * std::max(1.0, max_real))
    fail(ErrorKind::numeric, "wigner_from_density: imaginary residue " + fmt_g(max_imag) +
                                 " exceeds tolerance (non-Hermitian input or inadequate grid)");
  return {std::move(W), pr};
}

/// Closed-form Wigner function of a Gaussian state.
inline WignerFn wigner_analytic(const StateSpec& spec, const OscillatorParams& pr, const Axis& q_axis, const Axis& p_axis) {
  validate(spec);
  pr.validate();
  if (!is_gaussian(spec))
    fail(ErrorKind::unsupported, "wigner_analytic: only Gaussian states have a closed form here (" + to_string(spec) + ")");
  auto g = gaussian_shape(spec, pr);
  const double norm = 1.0 / (2 * std::numbers::pi * std::sqrt(g.var_q * g.var_p));
  auto W = RealGrid::tabulate({q_axis.renamed("q"), p_axis.renamed("p")}, [&](auto c) {
    const double dq = c[0] - g.q, dp = c[1] - g.p;
    return norm * std::exp(-dq * dq / (2 * g.var_q) - dp * dp / (2 * g.var_p));
  });
  return {std::move(W), pr};
}

/// Closed-form Wigner function of a Fock state (Laguerre form); test oracle.
inline WignerFn wigner_fock(int n, const OscillatorParams& pr, const Axis& q_axis, const Axis& p_axis) {
  validate(StateSpec{Fock{n}});
  auto W = RealGrid::tabulate({q_axis.renamed("q"), p_axis.renamed("p")}, [&](auto c) {
    const double x = c[0] * c[0] / (2 * pr.sigma_q2()) + c[1] * c[1] / (2 * pr.sigma_p2());
    // L_n(2x) by recurrence
    double l0 = 1.0, l1 = 1.0 - 2 * x;
    double ln = n == 0 ? l0 : l1;
    for (int k = 1; k < n; ++k) {
      ln = ((2 * k + 1 - 2 * x) * l1 - k * l0) / (k + 1);
      l0 = l1;
      l1 = ln;
    }
    return (n % 2 ? -1.0 : 1.0) / (std::numbers::pi * pr.hbar) * ln * std::exp(-x);
  });
  return {std::move(W), pr};
}

/// Phase-space moments by quadrature of W.
inline Moments moments(const WignerFn& w) {
  const auto& g = w.grid;
  auto weighted = [&](auto fn) {
    auto t = RealGrid::tabulate(g.axes(), fn);
    return integrate_all(hadamard(t, g));
  };
  return {weighted([](auto c) { return c[0]; }), weighted([](auto c) { return c[1]; }),
          weighted([](auto c) { return c[0] * c[0]; }), weighted([](auto c) { return c[1] * c[1]; }),
          weighted([](auto c) { return c[0] * c[1]; })};
}

}  // namespace jpr
