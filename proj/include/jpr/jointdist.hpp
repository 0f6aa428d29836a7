#pragma once
// Parameter priors and joint probability distributions M̃ = M·P, w̃ = w·P.

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "jpr/error.hpp"
#include "jpr/gridcalc.hpp"
#include "jpr/parse.hpp"
#include "jpr/tomography.hpp"

namespace jpr {

inline constexpr double kPriorFloor = 1e-280;

/// P₁(mu,nu) = exp(−(mu−mu0)²/xi² − (nu−nu0)²/zeta²) / (π xi zeta).
struct GaussianPrior {
  double mu0 = 0.0;
  double nu0 = 0.0;
  double xi = 1.0;
  double zeta = 1.0;

  void validate() const {
    require(xi > 0 && zeta > 0 && std::isfinite(xi) && std::isfinite(zeta), "prior widths must be positive");
    require(std::isfinite(mu0) && std::isfinite(nu0), "prior centre must be finite");
  }
};

/// One truncated Gaussian on [0, π]; `norm` makes it integrate to one there.
struct GaussianComponent {
  double weight = 1.0;
  double centre = std::numbers::pi / 2;
  double width = 1.0;
  double norm = 0.0;
};

/// P₂(theta) = Σ Q_k N_k exp(−(theta − f_k)²/phi_k²) on [0, π].
class GaussianSumPrior {
 public:
  GaussianSumPrior() : GaussianSumPrior(default_components()) {}

  /// (weight, centre, width) triples; weights must sum to one.
  explicit GaussianSumPrior(const std::vector<std::array<double, 3>>& comps) {
    require(!comps.empty(), "P2 needs at least one component");
    double total = 0;
    for (const auto& [q, f, phi] : comps) {
      require(q > 0 && std::isfinite(q), "P2 weights must be positive");
      require(phi > 0 && std::isfinite(phi), "P2 widths must be positive");
      require(f >= 0 && f <= std::numbers::pi, "P2 centres must lie in [0, pi]");
      total += q;
      comps_.push_back({q, f, phi, truncated_norm(f, phi)});
    }
    require(std::abs(total - 1.0) <= 1e-12, "P2 weights must sum to 1 (got " + fmt(total) + ")");
  }

  const std::vector<GaussianComponent>& components() const { return comps_; }

  static std::vector<std::array<double, 3>> default_components() {
    return {{0.6, std::numbers::pi / 3, 0.7}, {0.4, 2 * std::numbers::pi / 3, 0.9}};
  }

  /// 1 / ∫₀^π exp(−(θ−f)²/φ²) dθ.
  static double truncated_norm(double f, double phi) {
    const double mass = 0.5 * phi * std::sqrt(std::numbers::pi) * (std::erf((std::numbers::pi - f) / phi) + std::erf(f / phi));
    return 1.0 / mass;
  }

 private:
  std::vector<GaussianComponent> comps_;
};

using Prior = std::variant<GaussianPrior, GaussianSumPrior>;

inline Representation representation_of(const Prior& p) {
  return std::holds_alternative<GaussianPrior>(p) ? Representation::symplectic : Representation::optical;
}

/// Physicists' Hermite polynomial H_n(x).
inline double hermite_h(int n, double x) {
  double h0 = 1.0, h1 = 2 * x;
  if (n == 0) return h0;
  for (int k = 1; k < n; ++k) {
    const double h2 = 2 * x * h1 - 2 * k * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

/// dⁿ/dx ⁿ exp(−(x−c)²/w²) divided by exp(−(x−c)²/w²).
inline double gaussian_derivative_ratio(int n, double x, double c, double w) {
  return std::pow(-1.0 / w, n) * hermite_h(n, (x - c) / w);
}

inline double prior_value(const GaussianPrior& p, double mu, double nu) {
  const double a = (mu - p.mu0) / p.xi, b = (nu - p.nu0) / p.zeta;
  return std::exp(-a * a - b * b) / (std::numbers::pi * p.xi * p.zeta);
}

/// ∂ᵏ_mu ∂ˡ_nu P₁ / P₁ in closed form.
inline double prior_derivative_ratio(const GaussianPrior& p, int k, int l, double mu, double nu) {
  return gaussian_derivative_ratio(k, mu, p.mu0, p.xi) * gaussian_derivative_ratio(l, nu, p.nu0, p.zeta);
}

/// dⁿP₂/dθⁿ.
inline double prior_derivative(const GaussianSumPrior& p, int n, double theta) {
  double acc = 0;
  for (const auto& c : p.components()) {
    const double u = (theta - c.centre) / c.width;
    acc += c.weight * c.norm * std::exp(-u * u) * gaussian_derivative_ratio(n, theta, c.centre, c.width);
  }
  return acc;
}

inline double prior_value(const GaussianSumPrior& p, double theta) { return prior_derivative(p, 0, theta); }

inline void check_optical_point(double theta) {
  require(theta >= -1e-12 && theta <= std::numbers::pi + 1e-12, "optical point theta=" + fmt(theta) + " outside [0, pi]");
}

/// P tabulated on (mu, nu) axes for P₁ or on a theta axis for P₂.
inline RealGrid prior_eval(const Prior& prior, const std::vector<Axis>& axes) {
  if (auto* g = std::get_if<GaussianPrior>(&prior)) {
    g->validate();
    require(axes.size() == 2, "P1 is evaluated on (mu, nu) axes");
    return RealGrid::tabulate(axes, [&](auto c) { return prior_value(*g, c[0], c[1]); });
  }
  const auto& s = std::get<GaussianSumPrior>(prior);
  require(axes.size() == 1, "P2 is evaluated on a theta axis");
  check_optical_point(axes[0].min());
  check_optical_point(axes[0].max());
  return RealGrid::tabulate(axes, [&](auto c) { return prior_value(s, c[0]); });
}

inline void check_floor(const RealGrid& p) {
  for (double v : p.values())
    if (!(v >= kPriorFloor)) fail(ErrorKind::numeric, "prior underflow on grid");
}

/// (∂P/∂var)/P in closed form; var is "mu" or "nu" for P₁ and "theta" for P₂.
inline RealGrid prior_log_derivative(const Prior& prior, const std::vector<Axis>& axes, std::string_view var) {
  check_floor(prior_eval(prior, axes));
  if (auto* g = std::get_if<GaussianPrior>(&prior)) {
    require(var == "mu" || var == "nu", "P1 log-derivative variable must be mu or nu");
    const bool is_mu = var == "mu";
    return RealGrid::tabulate(axes, [&](auto c) {
      return is_mu ? -2 * (c[0] - g->mu0) / (g->xi * g->xi) : -2 * (c[1] - g->nu0) / (g->zeta * g->zeta);
    });
  }
  require(var == "theta", "P2 log-derivative variable must be theta");
  const auto& s = std::get<GaussianSumPrior>(prior);
  return RealGrid::tabulate(axes, [&](auto c) { return prior_derivative(s, 1, c[0]) / prior_value(s, c[0]); });
}

// ---------------------------------------------------------------------------

struct JointDistribution {
  Representation rep = Representation::symplectic;
  RealGrid grid;
  Prior prior;
  OscillatorParams params;
};

inline constexpr double kJointNormTol = 1e-2;

namespace detail {

inline RealGrid prior_on_tomogram_grid(const Prior& prior, const RealGrid& g) {
  RealGrid out(g.axes());
  const std::size_t nx = g.axis(0).count();
  const std::size_t per = g.size() / nx;
  std::vector<Axis> param_axes(g.axes().begin() + 1, g.axes().end());
  auto p = prior_eval(prior, param_axes);
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t s = 0; s < per; ++s) out[x * per + s] = p[s];
  return out;
}

}  // namespace detail

/// Joint distribution by Bayes' formula, M̃ = M · P.
inline JointDistribution make_joint(const Tomogram& t, const Prior& prior) {
  if (representation_of(prior) != t.rep)
    fail(ErrorKind::invalid_argument, "prior representation does not match the " + to_string(t.rep) + " tomogram");
  auto P = detail::prior_on_tomogram_grid(prior, t.grid);
  auto g = hadamard(t.grid, P);
  const double total = integrate_all(g);
  if (!(std::abs(total - 1.0) <= kJointNormTol))
    fail(ErrorKind::numeric, "joint distribution normalization drift " + fmt_g(std::abs(total - 1.0), 3));
  return {t.rep, std::move(g), prior, t.params};
}

/// Tomogram recovered by dividing out the prior.
inline Tomogram recover_conditional(const JointDistribution& j) {
  auto P = detail::prior_on_tomogram_grid(j.prior, j.grid);
  check_floor(P);
  RealGrid g(j.grid.axes());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = j.grid[i] / P[i];
  g.merge_warnings(j.grid.warnings());
  return {j.rep, std::move(g), j.params};
}

/// ∫ mu^a nu^b ∂ᵏ_mu ∂ˡ_nu P₁ dmu dnu by trapezoid quadrature on a grid
/// centred on the prior and wide enough (±12 widths) for its tails.
inline double prior_moment_integral(const GaussianPrior& p, int k, int l, int a, int b, std::size_t points = 241) {
  p.validate();
  require(k >= 0 && l >= 0 && a >= 0 && b >= 0, "prior_moment_integral: orders must be non-negative");
  require(k <= 4 && l <= 4, "prior_moment_integral: derivative orders above 4 not supported");
  const double span = 12.0;
  Axis ma("mu", p.mu0 - span * p.xi, p.mu0 + span * p.xi, points);
  Axis na("nu", p.nu0 - span * p.zeta, p.nu0 + span * p.zeta, points);
  auto f = RealGrid::tabulate({ma, na}, [&](auto c) {
    return std::pow(c[0], a) * std::pow(c[1], b) * prior_derivative_ratio(p, k, l, c[0], c[1]) *
           prior_value(p, c[0], c[1]);
  });
  return integrate_all(f);
}

/// Matching-order case ∫ muᵏ nuˡ ∂ᵏ_mu ∂ˡ_nu P₁; equals (−1)^{k+l} k! l!.
inline double prior_moment_integral(const GaussianPrior& p, int k, int l) { return prior_moment_integral(p, k, l, k, l); }

// ---------------------------------------------------------------------------
// Spec strings

/// `p1:mu0=0,nu0=0,xi=1,zeta=1` or `p2:[{0.6,1.0472,0.7},{q=0.4,f=2.0944,phi=0.9}]`;
/// `p1-default` and `p2-default` name the defaults.
inline Prior parse_prior(std::string_view text) {
  text = trim(text);
  if (text == "p1-default") return GaussianPrior{};
  if (text == "p2-default") return GaussianSumPrior{};
  auto colon = text.find(':');
  const std::string kind(trim(text.substr(0, colon)));
  if (kind == "p1") {
    auto [k, kv] = parse_kind_kv(text, {"mu0", "nu0", "xi", "zeta"});
    GaussianPrior p;
    auto get = [&](const char* key, double& dst) {
      if (auto it = kv.find(key); it != kv.end()) dst = parse_double(it->second, key);
    };
    get("mu0", p.mu0);
    get("nu0", p.nu0);
    get("xi", p.xi);
    get("zeta", p.zeta);
    p.validate();
    return p;
  }
  if (kind == "p2") {
    if (colon == std::string_view::npos || trim(text.substr(colon + 1)).empty()) return GaussianSumPrior();
    std::string_view body = trim(text.substr(colon + 1));
    require(body.size() >= 2 && body.front() == '[' && body.back() == ']', "P2 spec must be a [ ... ] list");
    body = body.substr(1, body.size() - 2);
    std::vector<std::array<double, 3>> comps;
    std::size_t pos = 0;
    while (true) {
      auto open = body.find('{', pos);
      if (open == std::string_view::npos) break;
      auto close = body.find('}', open);
      require(close != std::string_view::npos, "unterminated P2 component");
      auto fields = split(body.substr(open + 1, close - open - 1), ',');
      require(fields.size() == 3, "P2 component needs q, f, phi");
      std::array<double, 3> c{};
      const char* names[3] = {"q", "f", "phi"};
      for (std::size_t i = 0; i < 3; ++i) {
        auto fv = fields[i];
        if (auto eq = fv.find('='); eq != std::string_view::npos) {
          require(trim(fv.substr(0, eq)) == names[i], "P2 component fields must be in order q, f, phi");
          fv = fv.substr(eq + 1);
        }
        c[i] = parse_double(fv, names[i]);
      }
      comps.push_back(c);
      pos = close + 1;
    }
    require(!comps.empty(), "P2 spec has no components");
    return GaussianSumPrior(comps);
  }
  fail(ErrorKind::invalid_argument, "unknown prior kind '" + kind + "' (expected p1 or p2)");
}

inline std::string to_string(const Prior& prior) {
  if (auto* g = std::get_if<GaussianPrior>(&prior))
    return "p1:mu0=" + fmt(g->mu0) + ",nu0=" + fmt(g->nu0) + ",xi=" + fmt(g->xi) + ",zeta=" + fmt(g->zeta);
  std::string s = "p2:[";
  bool first = true;
  for (const auto& c : std::get<GaussianSumPrior>(prior).components()) {
    s += (first ? "{" : ",{") + fmt(c.weight) + "," + fmt(c.centre) + "," + fmt(c.width) + "}";
    first = false;
  }
  return s + "]";
}

}  // namespace jpr
