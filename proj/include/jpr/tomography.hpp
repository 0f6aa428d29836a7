#pragma once
// Symplectic and optical tomograms: line integrals of the Wigner function,
// closed-form oracles, and reconstruction of W from a symplectic tomogram.

#include <algorithm>
#include <limits>
#include <map>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "jpr/error.hpp"
#include "jpr/gridcalc.hpp"
#include "jpr/parse.hpp"
#include "jpr/states.hpp"

namespace jpr {

enum class Representation { symplectic, optical };

inline std::string to_string(Representation r) { return r == Representation::symplectic ? "symplectic" : "optical"; }

/// Tabulated tomogram. Symplectic axes are (X, mu, nu); optical axes (X, theta).
struct Tomogram {
  Representation rep = Representation::symplectic;
  RealGrid grid;
  OscillatorParams params;
};

/// Default grids.
inline Axis default_x_axis() { return Axis("X", -8, 8, 161); }
inline Axis default_mu_axis() { return Axis("mu", -4.5, 4.5, 97); }
inline Axis default_nu_axis() { return Axis("nu", -4.5, 4.5, 97); }
inline Axis default_theta_axis() { return Axis("theta", 0, std::numbers::pi, 181); }
inline Axis default_q_axis() { return Axis("q", -8, 8, 161); }
inline Axis default_p_axis() { return Axis("p", -8, 8, 161); }

/// What to store at the (mu, nu) = (0, 0) grid point, where the tomogram
/// degenerates to δ(X).
enum class OriginPolicy { nascent, reject };

inline constexpr double kDegenerateDirection = 1e-6;
inline constexpr double kSliceRenormTol = 1e-3;

/// Tomogram parameters (mu, nu) of an optical angle.
inline std::pair<double, double> optical_direction(double theta, const OscillatorParams& pr) {
  return {std::cos(theta), std::sin(theta) / (pr.mass * pr.omega)};
}

namespace detail {

inline bool is_origin(double mu, double nu) { return std::abs(mu) + std::abs(nu) < kDegenerateDirection; }

/// Nascent δ(X) of standard deviation h_X, normalised on the axis.
inline std::vector<double> nascent_delta(const Axis& x) {
  std::vector<double> v(x.count());
  const double h = x.spacing();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::exp(-0.5 * x[i] * x[i] / (h * h));
  auto w = trapezoid_weights(x);
  double s = 0;
  for (std::size_t i = 0; i < v.size(); ++i) s += w[i] * v[i];
  for (auto& e : v) e /= s;
  return v;
}

/// Renormalises each X-line of a tomogram whose discrete mass drifts by more
/// than tol; returns the number of lines touched and the largest drift seen.
inline std::pair<std::size_t, double> renormalize_slices(RealGrid& g, double tol) {
  const auto w = trapezoid_weights(g.axis(0));
  std::size_t touched = 0;
  double worst = 0.0;
  g.for_each_line(0, [&](std::size_t start, std::size_t stride, std::size_t n) {
    double mass = 0;
    for (std::size_t k = 0; k < n; ++k) mass += w[k] * g[start + k * stride];
    const double drift = std::abs(mass - 1.0);
    worst = std::max(worst, drift);
    if (drift > tol && mass > 0) {
      for (std::size_t k = 0; k < n; ++k) g[start + k * stride] /= mass;
      ++touched;
    }
  });
  return {touched, worst};
}

/// (1/r) ∫ W ds along the line X = mu q + nu p, trapezoid in arclength.
class LineIntegrator {
 public:
  LineIntegrator(const WignerFn& w, double ds)
      : spline_(w.grid.axis(0), w.grid.axis(1), w.grid.values()), qa_(w.grid.axis(0)), pa_(w.grid.axis(1)), ds_(ds) {
    // Disk around the origin outside which W is negligible; lines are clipped to it.
    const auto& g = w.grid;
    const double peak = max_abs(g);
    const double pad = 3 * std::max(qa_.spacing(), pa_.spacing());
    double r2 = 0;
    for (std::size_t i = 0; i < qa_.count(); ++i)
      for (std::size_t j = 0; j < pa_.count(); ++j)
        if (std::abs(g[i * pa_.count() + j]) > kSupportTol * peak)
          r2 = std::max(r2, qa_[i] * qa_[i] + pa_[j] * pa_[j]);
    support_ = std::sqrt(r2) + pad;
  }

  double operator()(double X, double mu, double nu) const {
    const double r = std::hypot(mu, nu);
    const double eq = mu / r, ep = nu / r;    // unit normal
    const double tq = -ep, tp = eq;           // unit tangent
    const double cq = X / r * eq, cp = X / r * ep;  // foot point
    double lo = -1e300, hi = 1e300;
    clip(cq, tq, qa_.min(), qa_.max(), lo, hi);
    clip(cp, tp, pa_.min(), pa_.max(), lo, hi);
    const double d2 = support_ * support_ - (cq * cq + cp * cp);
    if (d2 <= 0) return 0.0;
    const double sm = std::sqrt(d2);
    lo = std::max(lo, -sm);
    hi = std::min(hi, sm);
    if (!(hi > lo)) return 0.0;
    const long k0 = static_cast<long>(std::ceil(lo / ds_));
    const long k1 = static_cast<long>(std::floor(hi / ds_));
    double acc = 0.0;
    for (long k = k0; k <= k1; ++k) {
      const double s = static_cast<double>(k) * ds_;
      acc += spline_(cq + s * tq, cp + s * tp);
    }
    return acc * ds_ / r;
  }

 private:
  static void clip(double c, double t, double a, double b, double& lo, double& hi) {
    if (std::abs(t) < 1e-14) {
      if (c < a || c > b) hi = lo - 1;
      return;
    }
    double s1 = (a - c) / t, s2 = (b - c) / t;
    if (s1 > s2) std::swap(s1, s2);
    lo = std::max(lo, s1);
    hi = std::min(hi, s2);
  }

  static constexpr double kSupportTol = 1e-16;

  BSpline2D spline_;
  Axis qa_, pa_;
  double ds_;
  double support_ = 0;
};

inline bool symmetric_axis(const Axis& a) { return std::abs(a.min() + a.max()) < 1e-12 * (a.max() - a.min()); }

inline void finish_tomogram(RealGrid& g, std::size_t origin_lines, bool renormalize_all) {
  auto [touched, worst] = renormalize_slices(g, renormalize_all ? 0.0 : kSliceRenormTol);
  if (!renormalize_all && touched > origin_lines)
    g.add_warning("renormalized " + std::to_string(touched - origin_lines) + " X-slices (largest mass drift " +
                  fmt_g(worst, 3) + ")");
  if (origin_lines > 0) g.add_warning("origin (mu,nu)=(0,0) slice stored as nascent delta of width h_X");
}

}  // namespace detail

/// M(X, mu, nu) from a Wigner function by explicit line integration. `ds`
/// defaults to the finer of the q and p spacings.
inline Tomogram symplectic_tomogram(const WignerFn& W, const Axis& x_axis, const Axis& mu_axis, const Axis& nu_axis,
                                    OriginPolicy origin = OriginPolicy::nascent, std::optional<double> ds = {}) {
  W.params.validate();
  const double step = ds.value_or(std::min(W.grid.axis(0).spacing(), W.grid.axis(1).spacing()));
  require(step > 0, "symplectic_tomogram: ds must be positive");
  detail::LineIntegrator line(W, step);
  const Axis xa = x_axis.renamed("X"), ma = mu_axis.renamed("mu"), na = nu_axis.renamed("nu");
  const std::size_t nx = xa.count(), nm = ma.count(), nn = na.count();
  RealGrid g({xa, ma, na});
  g.merge_warnings(W.grid.warnings());

  // M(X,−mu,−nu) = M(−X,mu,nu) halves the work on symmetric grids.
  const bool mirror = detail::symmetric_axis(xa) && detail::symmetric_axis(ma) && detail::symmetric_axis(na);
  const auto nascent = detail::nascent_delta(xa);
  std::size_t origin_lines = 0;
  for (std::size_t i = 0; i < nm; ++i)
    for (std::size_t j = 0; j < nn; ++j) {
      const double mu = ma[i], nu = na[j];
      if (detail::is_origin(mu, nu)) {
        if (origin == OriginPolicy::reject)
          fail(ErrorKind::invalid_argument, "tomogram undefined at mu=nu=0 grid point");
        for (std::size_t x = 0; x < nx; ++x) g[(x * nm + i) * nn + j] = nascent[x];
        ++origin_lines;
        continue;
      }
      const std::size_t ri = nm - 1 - i, rj = nn - 1 - j;
      if (mirror && (ri * nn + rj) < (i * nn + j)) {
        for (std::size_t x = 0; x < nx; ++x) g[(x * nm + i) * nn + j] = g[((nx - 1 - x) * nm + ri) * nn + rj];
        continue;
      }
      for (std::size_t x = 0; x < nx; ++x) g[(x * nm + i) * nn + j] = line(xa[x], mu, nu);
    }
  detail::finish_tomogram(g, origin_lines, false);
  return {Representation::symplectic, std::move(g), W.params};
}

/// w(X, theta): line integral along X = q cos θ + p sin θ / (mω).
inline Tomogram optical_tomogram(const WignerFn& W, const Axis& x_axis, const Axis& theta_axis,
                                 std::optional<double> ds = {}) {
  W.params.validate();
  require(theta_axis.min() >= -1e-12 && theta_axis.max() <= std::numbers::pi + 1e-12,
          "optical_tomogram: theta must lie in [0, pi]");
  const double step = ds.value_or(std::min(W.grid.axis(0).spacing(), W.grid.axis(1).spacing()));
  detail::LineIntegrator line(W, step);
  const Axis xa = x_axis.renamed("X"), ta = theta_axis.renamed("theta");
  const std::size_t nx = xa.count(), nt = ta.count();
  RealGrid g({xa, ta});
  g.merge_warnings(W.grid.warnings());
  for (std::size_t t = 0; t < nt; ++t) {
    auto [mu, nu] = optical_direction(ta[t], W.params);
    for (std::size_t x = 0; x < nx; ++x) g[x * nt + t] = line(xa[x], mu, nu);
  }
  detail::finish_tomogram(g, 0, false);
  return {Representation::optical, std::move(g), W.params};
}

namespace detail {

/// Exact slice density of a state at (X, mu, nu); mu = nu = 0 excluded.
inline double exact_slice_density(const StateSpec& spec, const OscillatorParams& pr, double X, double mu, double nu) {
  if (auto* f = std::get_if<Fock>(&spec)) {
    const double sigma = std::sqrt(pr.hbar * (mu * mu / (pr.mass * pr.omega) + nu * nu * pr.mass * pr.omega));
    const double phi = hermite_functions(f->n, X / sigma)[f->n];
    return phi * phi / sigma;
  }
  auto g = gaussian_shape(spec, pr);
  const double mean = mu * g.q + nu * g.p;
  const double var = mu * mu * g.var_q + nu * nu * g.var_p;
  const double d = X - mean;
  return std::exp(-d * d / (2 * var)) / std::sqrt(2 * std::numbers::pi * var);
}

inline Tomogram exact_tomogram(const StateSpec& spec, const OscillatorParams& pr, Representation rep,
                               const std::vector<Axis>& axes) {
  validate(spec);
  pr.validate();
  RealGrid g;
  std::size_t origin_lines = 0;
  if (rep == Representation::symplectic) {
    require(axes.size() == 3, "symplectic tomogram needs (X, mu, nu) axes");
    const Axis xa = axes[0].renamed("X"), ma = axes[1].renamed("mu"), na = axes[2].renamed("nu");
    g = RealGrid({xa, ma, na});
    const auto nascent = nascent_delta(xa);
    const std::size_t nx = xa.count(), nm = ma.count(), nn = na.count();
    for (std::size_t i = 0; i < nm; ++i)
      for (std::size_t j = 0; j < nn; ++j) {
        const bool o = is_origin(ma[i], na[j]);
        origin_lines += o;
        for (std::size_t x = 0; x < nx; ++x)
          g[(x * nm + i) * nn + j] = o ? nascent[x] : exact_slice_density(spec, pr, xa[x], ma[i], na[j]);
      }
  } else {
    require(axes.size() == 2, "optical tomogram needs (X, theta) axes");
    const Axis xa = axes[0].renamed("X"), ta = axes[1].renamed("theta");
    require(ta.min() >= -1e-12 && ta.max() <= std::numbers::pi + 1e-12, "theta must lie in [0, pi]");
    g = RealGrid::tabulate({xa, ta}, [&](auto c) {
      auto [mu, nu] = optical_direction(c[1], pr);
      return exact_slice_density(spec, pr, c[0], mu, nu);
    });
  }
  finish_tomogram(g, origin_lines, true);
  return {rep, std::move(g), pr};
}

}  // namespace detail

/// Closed-form tomogram of a Gaussian state; each slice is renormalised on
/// the X grid.
inline Tomogram tomogram_analytic(const StateSpec& spec, const OscillatorParams& pr, Representation rep,
                                  const std::vector<Axis>& axes) {
  validate(spec);
  if (!is_gaussian(spec))
    fail(ErrorKind::unsupported, "tomogram_analytic: state is not Gaussian (" + to_string(spec) + ")");
  return detail::exact_tomogram(spec, pr, rep, axes);
}

/// Closed-form tomogram of any catalog state (Fock states via Hermite
/// functions of the scaled quadrature).
inline Tomogram tomogram_exact(const StateSpec& spec, const OscillatorParams& pr, Representation rep,
                               const std::vector<Axis>& axes) {
  return detail::exact_tomogram(spec, pr, rep, axes);
}

/// Largest |∫ M dX − 1| over all parameter slices, optionally skipping slices
/// within `exclude_cells` grid cells (Chebyshev) of (mu, nu) = (0, 0).
inline double max_slice_drift(const Tomogram& t, std::size_t exclude_cells = 0) {
  const auto& g = t.grid;
  const auto w = trapezoid_weights(g.axis(0));
  double worst = 0;
  const std::size_t per = g.size() / g.axis(0).count();
  for (std::size_t s = 0; s < per; ++s) {
    if (t.rep == Representation::symplectic && exclude_cells > 0) {
      const std::size_t nn = g.axis(2).count();
      const std::size_t i = s / nn, j = s % nn;
      const auto i0 = g.axis(1).nearest(0.0), j0 = g.axis(2).nearest(0.0);
      const std::size_t di = i > i0 ? i - i0 : i0 - i, dj = j > j0 ? j - j0 : j0 - j;
      if (std::max(di, dj) <= exclude_cells && g.axis(1).contains(0) && g.axis(2).contains(0)) continue;
    }
    double mass = 0;
    for (std::size_t x = 0; x < g.axis(0).count(); ++x) mass += w[x] * g[x * per + s];
    worst = std::max(worst, std::abs(mass - 1.0));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Reconstruction

struct ReconstructionInfo {
  double normalization_drift = 0.0;  // |∫W − 1| before renormalisation
  double imag_residue = 0.0;         // max |Im W| / max |Re W|
  double complete_radius = 0.0;      // slices inside this radius were used directly
  double extent = 0.0;               // radius of the extended (mu, nu) quadrature domain
};

inline constexpr double kCompleteSliceTol = 1e-6;
inline constexpr double kReconImagTol = 1e-6;
inline constexpr double kReconNormTol = 5e-2;

/// W(q,p) = (mω/2π)(1/2πħ) ∫ M(X,mu,nu) e^{ik(X − mu q − nu p)} dX dmu dnu,
/// k = √(mω/ħ).
///
/// Slices truncated by the X window are replaced through the scaling law
/// M(λX, λmu, λnu) = M(X, mu, nu)/|λ| from the largest radius at which every
/// slice is complete, and the (mu, nu) quadrature is continued on the same
/// spacing past the tabulated box until the characteristic function is
/// negligible.
inline WignerFn wigner_from_symplectic(const Tomogram& M, const Axis& q_axis, const Axis& p_axis,
                                       ReconstructionInfo* info = nullptr) {
  require(M.rep == Representation::symplectic, "wigner_from_symplectic: symplectic tomogram required");
  const auto& pr = M.params;
  pr.validate();
  const auto& g = M.grid;
  const Axis& xa = g.axis(0);
  const Axis& ma = g.axis(1);
  const Axis& na = g.axis(2);
  const std::size_t nx = xa.count(), nm = ma.count(), nn = na.count();
  const double k = std::sqrt(pr.mass * pr.omega / pr.hbar);
  const auto wx = trapezoid_weights(xa);

  // Completeness of each slice: both X ends negligible against the peak.
  double r_c = std::numeric_limits<double>::infinity();
  bool any_complete = false;
  for (std::size_t i = 0; i < nm; ++i)
    for (std::size_t j = 0; j < nn; ++j) {
      if (detail::is_origin(ma[i], na[j])) continue;
      double peak = 0;
      for (std::size_t x = 0; x < nx; ++x) peak = std::max(peak, std::abs(g[(x * nm + i) * nn + j]));
      const double edge = std::max(std::abs(g[i * nn + j]), std::abs(g[((nx - 1) * nm + i) * nn + j]));
      if (peak > 0 && edge <= kCompleteSliceTol * peak)
        any_complete = true;
      else
        r_c = std::min(r_c, std::hypot(ma[i], na[j]));
    }
  if (!any_complete)
    fail(ErrorKind::invalid_argument,
         "wigner_from_symplectic: no tomogram slice decays inside the X window (non-normalizable input)");
  const double box = std::min({-ma.min(), ma.max(), -na.min(), na.max()});
  const double hm = ma.spacing(), hn = na.spacing();
  // Stay clear of incomplete slices and of the box edge for the spline stencil.
  const double r_use = std::min(r_c, box) - 2.5 * std::max(hm, hn);
  if (!(r_use > 2 * std::max(hm, hn)))
    fail(ErrorKind::numeric, "wigner_from_symplectic: complete-slice radius too small for reconstruction");

  std::vector<BSpline2D> slice_splines;
  slice_splines.reserve(nx);
  std::vector<double> buf(nm * nn);
  for (std::size_t x = 0; x < nx; ++x) {
    std::copy(g.values().begin() + static_cast<std::ptrdiff_t>(x * nm * nn),
              g.values().begin() + static_cast<std::ptrdiff_t>((x + 1) * nm * nn), buf.begin());
    slice_splines.emplace_back(ma, na, buf);
  }
  std::vector<cplx> phase_x(nx);

  auto chi = [&](double mu, double nu, long gi, long gj) -> cplx {
    const double r = std::hypot(mu, nu);
    if (r <= r_use && gi >= 0 && gj >= 0) {
      cplx acc{};
      for (std::size_t x = 0; x < nx; ++x)
        acc += wx[x] * g[(x * nm + static_cast<std::size_t>(gi)) * nn + static_cast<std::size_t>(gj)] *
               std::polar(1.0, k * xa[x]);
      return acc;
    }
    // χ(mu,nu) = ∫ M(Y, s mu, s nu) e^{ikY/s} dY with s = r_use / r
    const double s = r_use / r;
    cplx acc{};
    for (std::size_t x = 0; x < nx; ++x)
      acc += wx[x] * slice_splines[x](s * mu, s * nu) * std::polar(1.0, k * xa[x] / s);
    return acc;
  };

  // Extended symmetric lattice on the tabulated spacing, grown ring by ring.
  const long i0 = static_cast<long>(std::llround(-ma.min() / hm));
  const long j0 = static_cast<long>(std::llround(-na.min() / hn));
  const bool on_lattice = std::abs(ma.min() + static_cast<double>(i0) * hm) < 1e-9 * hm &&
                          std::abs(na.min() + static_cast<double>(j0) * hn) < 1e-9 * hn;
  require(on_lattice, "wigner_from_symplectic: mu and nu axes must contain 0 as a grid point");
  const double chi_tol = 1e-7;  // above the slice-truncation noise floor
  const long max_ring = static_cast<long>(8 * std::max(nm, nn));
  std::map<std::pair<long, long>, cplx> values;
  auto grid_index = [&](long a, long b) -> std::pair<long, long> {
    const long ii = a + i0, jj = b + j0;
    if (ii >= 0 && jj >= 0 && ii < static_cast<long>(nm) && jj < static_cast<long>(nn)) return {ii, jj};
    return {-1, -1};
  };
  long ring = 0;
  long quiet = 0;
  for (; ring <= max_ring; ++ring) {
    double ring_max = 0;
    for (long a = -ring; a <= ring; ++a)
      for (long b = -ring; b <= ring; ++b) {
        if (std::max(std::labs(a), std::labs(b)) != ring) continue;
        const double mu = static_cast<double>(a) * hm, nu = static_cast<double>(b) * hn;
        cplx v;
        if (a == 0 && b == 0) {
          auto [gi, gj] = grid_index(0, 0);
          double mass = 0;
          for (std::size_t x = 0; x < nx; ++x)
            mass += wx[x] * g[(x * nm + static_cast<std::size_t>(gi)) * nn + static_cast<std::size_t>(gj)];
          v = mass;
        } else {
          auto [gi, gj] = grid_index(a, b);
          v = chi(mu, nu, gi, gj);
        }
        values[{a, b}] = v;
        ring_max = std::max(ring_max, std::abs(v));
      }
    if (ring * std::max(hm, hn) > r_use && ring_max < chi_tol) {
      if (++quiet >= 2) break;
    } else {
      quiet = 0;
    }
  }
  if (ring > max_ring) fail(ErrorKind::numeric, "wigner_from_symplectic: characteristic function does not decay");
  const long R = ring;
  const std::size_t L = static_cast<std::size_t>(2 * R + 1);
  std::vector<cplx> C(L * L, cplx{});
  for (const auto& [ab, v] : values) C[static_cast<std::size_t>(ab.first + R) * L + static_cast<std::size_t>(ab.second + R)] = v;

  const Axis qa = q_axis.renamed("q"), pa = p_axis.renamed("p");
  const std::size_t nq = qa.count(), np = pa.count();
  // W = Eq · C · Ep^T with Eq[a][i] = e^{−ik mu_i q_a}
  std::vector<cplx> Eq(nq * L), Ep(np * L);
  for (std::size_t a = 0; a < nq; ++a)
    for (std::size_t i = 0; i < L; ++i)
      Eq[a * L + i] = std::polar(1.0, -k * static_cast<double>(static_cast<long>(i) - R) * hm * qa[a]);
  for (std::size_t b = 0; b < np; ++b)
    for (std::size_t j = 0; j < L; ++j)
      Ep[b * L + j] = std::polar(1.0, -k * static_cast<double>(static_cast<long>(j) - R) * hn * pa[b]);
  std::vector<cplx> T(nq * L, cplx{});  // T = Eq · C
  for (std::size_t a = 0; a < nq; ++a)
    for (std::size_t i = 0; i < L; ++i) {
      const cplx e = Eq[a * L + i];
      const cplx* crow = C.data() + i * L;
      cplx* trow = T.data() + a * L;
      for (std::size_t j = 0; j < L; ++j) trow[j] += e * crow[j];
    }
  const double pref = k * k / (4 * std::numbers::pi * std::numbers::pi) * hm * hn;
  RealGrid W({qa, pa});
  W.merge_warnings(g.warnings());
  double max_re = 0, max_im = 0;
  for (std::size_t a = 0; a < nq; ++a)
    for (std::size_t b = 0; b < np; ++b) {
      cplx acc{};
      const cplx* trow = T.data() + a * L;
      const cplx* erow = Ep.data() + b * L;
      for (std::size_t j = 0; j < L; ++j) acc += trow[j] * erow[j];
      acc *= pref;
      W[a * np + b] = acc.real();
      max_re = std::max(max_re, std::abs(acc.real()));
      max_im = std::max(max_im, std::abs(acc.imag()));
    }
  const double residue = max_re > 0 ? max_im / max_re : max_im;
  if (residue > kReconImagTol)
    fail(ErrorKind::numeric, "wigner_from_symplectic: imaginary residue " + fmt_g(residue, 3) + " exceeds tolerance");
  const double norm = integrate_all(W);
  const double drift = std::abs(norm - 1.0);
  if (!(drift <= kReconNormTol))
    fail(ErrorKind::numeric, "wigner_from_symplectic: normalization drift " + fmt_g(drift, 3) + " exceeds " +
                                 fmt_g(kReconNormTol, 3));
  W *= 1.0 / norm;
  if (info) *info = {drift, residue, r_use, static_cast<double>(R) * std::max(hm, hn)};
  return {std::move(W), pr};
}

}  // namespace jpr
