#pragma once
// Uniform-grid calculus: axes, tabulated functions, finite-difference
// derivatives, inverse derivatives (repeated antiderivatives), trapezoid
// quadrature and interpolation.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <map>
#include <mutex>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

#include "jpr/error.hpp"

namespace jpr {

using cplx = std::complex<double>;

template <class T>
inline constexpr bool is_complex_v = false;
template <class T>
inline constexpr bool is_complex_v<std::complex<T>> = true;

template <class T>
concept GridScalar = std::is_same_v<T, double> || std::is_same_v<T, cplx>;

/// A uniformly sampled coordinate axis. Point i sits at min + i*h.
class Axis {
 public:
  Axis() = default;
  Axis(std::string name, double min, double max, std::size_t count)
      : name_(std::move(name)), min_(min), max_(max), count_(count) {
    require(std::isfinite(min) && std::isfinite(max), "axis '" + name_ + "': non-finite bounds");
    require(max > min, "axis '" + name_ + "': max must exceed min");
    require(count >= 3, "axis '" + name_ + "': need at least 3 points");
  }

  const std::string& name() const { return name_; }
  double min() const { return min_; }
  double max() const { return max_; }
  std::size_t count() const { return count_; }
  double spacing() const { return (max_ - min_) / static_cast<double>(count_ - 1); }
  double operator[](std::size_t i) const { return min_ + static_cast<double>(i) * spacing(); }

  std::vector<double> points() const {
    std::vector<double> p(count_);
    for (std::size_t i = 0; i < count_; ++i) p[i] = (*this)[i];
    return p;
  }

  /// Index of the node closest to x (clamped to the axis).
  std::size_t nearest(double x) const {
    double t = std::round((x - min_) / spacing());
    t = std::clamp(t, 0.0, static_cast<double>(count_ - 1));
    return static_cast<std::size_t>(t);
  }

  bool contains(double x, double slack = 1e-12) const {
    double tol = slack * std::max(1.0, max_ - min_);
    return x >= min_ - tol && x <= max_ + tol;
  }

  Axis renamed(std::string name) const { return Axis(std::move(name), min_, max_, count_); }

  friend bool operator==(const Axis& a, const Axis& b) {
    return a.name_ == b.name_ && a.min_ == b.min_ && a.max_ == b.max_ && a.count_ == b.count_;
  }

 private:
  std::string name_;
  double min_ = 0.0;
  double max_ = 1.0;
  std::size_t count_ = 3;
};

/// Values tabulated on the Cartesian product of axes, row-major (last axis
/// fastest). Rank 0 holds a single scalar.
template <GridScalar T>
class GridFn {
 public:
  using value_type = T;

  GridFn() : values_(1, T{}) {}

  explicit GridFn(std::vector<Axis> axes, T fill = T{}) : axes_(std::move(axes)) {
    init_strides();
    values_.assign(total_size(), fill);
  }

  GridFn(std::vector<Axis> axes, std::vector<T> values) : axes_(std::move(axes)), values_(std::move(values)) {
    init_strides();
    require(values_.size() == total_size(), "GridFn: value count does not match axis sizes");
  }

  /// Tabulates f(coords) where coords holds one coordinate per axis.
  template <class F>
  static GridFn tabulate(std::vector<Axis> axes, F&& f) {
    GridFn g(std::move(axes));
    std::vector<double> coords(g.rank());
    std::vector<std::size_t> idx(g.rank(), 0);
    for (std::size_t a = 0; a < g.rank(); ++a) coords[a] = g.axes_[a].min();
    for (std::size_t flat = 0; flat < g.size(); ++flat) {
      g.values_[flat] = static_cast<T>(f(std::span<const double>(coords)));
      for (std::size_t a = g.rank(); a-- > 0;) {
        if (++idx[a] < g.axes_[a].count()) {
          coords[a] = g.axes_[a][idx[a]];
          break;
        }
        idx[a] = 0;
        coords[a] = g.axes_[a].min();
      }
    }
    return g;
  }

  const std::vector<Axis>& axes() const { return axes_; }
  const Axis& axis(std::size_t a) const { return axes_.at(a); }
  std::size_t rank() const { return axes_.size(); }
  std::size_t size() const { return values_.size(); }
  std::size_t stride(std::size_t a) const { return strides_.at(a); }

  std::size_t axis_index(std::string_view name) const {
    for (std::size_t a = 0; a < axes_.size(); ++a)
      if (axes_[a].name() == name) return a;
    fail(ErrorKind::invalid_argument, "grid has no axis named '" + std::string(name) + "'");
  }
  bool has_axis(std::string_view name) const {
    return std::any_of(axes_.begin(), axes_.end(), [&](const Axis& a) { return a.name() == name; });
  }

  std::span<T> values() { return values_; }
  std::span<const T> values() const { return values_; }
  T& operator[](std::size_t flat) { return values_[flat]; }
  const T& operator[](std::size_t flat) const { return values_[flat]; }

  std::size_t flat_index(std::span<const std::size_t> idx) const {
    std::size_t f = 0;
    for (std::size_t a = 0; a < idx.size(); ++a) f += idx[a] * strides_[a];
    return f;
  }
  T& at(std::initializer_list<std::size_t> idx) { return values_[flat_index({idx.begin(), idx.size()})]; }
  const T& at(std::initializer_list<std::size_t> idx) const {
    return values_[flat_index({idx.begin(), idx.size()})];
  }

  /// Per-axis indices of a flat position.
  std::vector<std::size_t> unflatten(std::size_t flat) const {
    std::vector<std::size_t> idx(rank());
    for (std::size_t a = 0; a < rank(); ++a) {
      idx[a] = flat / strides_[a];
      flat %= strides_[a];
    }
    return idx;
  }

  /// Calls fn(start, stride, count) once per 1-D line along axis a.
  template <class F>
  void for_each_line(std::size_t a, F&& fn) const {
    const std::size_t n = axes_.at(a).count();
    const std::size_t inner = strides_[a];
    const std::size_t outer = size() / (n * inner);
    for (std::size_t o = 0; o < outer; ++o)
      for (std::size_t i = 0; i < inner; ++i) fn(o * n * inner + i, inner, n);
  }

  const std::vector<std::string>& warnings() const { return warnings_; }
  void add_warning(std::string w) {
    if (std::find(warnings_.begin(), warnings_.end(), w) == warnings_.end()) warnings_.push_back(std::move(w));
  }
  void merge_warnings(const std::vector<std::string>& ws) {
    for (const auto& w : ws) add_warning(w);
  }

  bool same_grid(const GridFn<double>& o) const { return axes_ == o.axes(); }
  bool same_grid(const GridFn<cplx>& o) const { return axes_ == o.axes(); }

  GridFn& operator+=(const GridFn& o) {
    check_same(o);
    for (std::size_t i = 0; i < size(); ++i) values_[i] += o.values_[i];
    merge_warnings(o.warnings_);
    return *this;
  }
  GridFn& operator-=(const GridFn& o) {
    check_same(o);
    for (std::size_t i = 0; i < size(); ++i) values_[i] -= o.values_[i];
    merge_warnings(o.warnings_);
    return *this;
  }
  GridFn& operator*=(T s) {
    for (auto& v : values_) v *= s;
    return *this;
  }
  friend GridFn operator+(GridFn a, const GridFn& b) { return a += b; }
  friend GridFn operator-(GridFn a, const GridFn& b) { return a -= b; }
  friend GridFn operator*(GridFn a, T s) { return a *= s; }
  friend GridFn operator*(T s, GridFn a) { return a *= s; }

  /// Pointwise product.
  friend GridFn hadamard(GridFn a, const GridFn& b) {
    a.check_same(b);
    for (std::size_t i = 0; i < a.size(); ++i) a.values_[i] *= b.values_[i];
    return a;
  }

 private:
  std::size_t total_size() const {
    std::size_t n = 1;
    for (const auto& ax : axes_) n *= ax.count();
    return n;
  }
  void init_strides() {
    strides_.assign(axes_.size(), 1);
    for (std::size_t a = axes_.size(); a-- > 1;) strides_[a - 1] = strides_[a] * axes_[a].count();
  }
  void check_same(const GridFn& o) const { require(axes_ == o.axes_, "grid mismatch in pointwise operation"); }

  std::vector<Axis> axes_;
  std::vector<std::size_t> strides_;
  std::vector<T> values_;
  std::vector<std::string> warnings_;
};

using RealGrid = GridFn<double>;
using ComplexGrid = GridFn<cplx>;

inline ComplexGrid to_complex(const RealGrid& f) {
  ComplexGrid g(f.axes());
  for (std::size_t i = 0; i < f.size(); ++i) g[i] = cplx(f[i], 0.0);
  g.merge_warnings(f.warnings());
  return g;
}

inline RealGrid real_part(const ComplexGrid& f) {
  RealGrid g(f.axes());
  for (std::size_t i = 0; i < f.size(); ++i) g[i] = f[i].real();
  g.merge_warnings(f.warnings());
  return g;
}

inline RealGrid imag_part(const ComplexGrid& f) {
  RealGrid g(f.axes());
  for (std::size_t i = 0; i < f.size(); ++i) g[i] = f[i].imag();
  g.merge_warnings(f.warnings());
  return g;
}

template <GridScalar T>
double max_abs(const GridFn<T>& f) {
  double m = 0.0;
  for (const auto& v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

template <GridScalar T>
bool all_finite(const GridFn<T>& f) {
  for (const auto& v : f.values()) {
    if constexpr (is_complex_v<T>) {
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    } else if (!std::isfinite(v)) {
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Stencils

namespace detail {

/// Fornberg's recursion: weights[k][j] approximates the k-th derivative at z
/// from samples at nodes x[j], for k = 0..max_order.
inline std::vector<std::vector<double>> fornberg(double z, std::span<const double> x, int max_order) {
  const int n = static_cast<int>(x.size()) - 1;
  std::vector<std::vector<double>> c(max_order + 1, std::vector<double>(x.size(), 0.0));
  double c1 = 1.0;
  double c4 = x[0] - z;
  c[0][0] = 1.0;
  for (int i = 1; i <= n; ++i) {
    const int mn = std::min(i, max_order);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - z;
    for (int j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[k][i] = c1 * (k * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
        c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
      }
      for (int k = mn; k >= 1; --k) c[k][j] = (c4 * c[k][j] - k * c[k - 1][j]) / c3;
      c[0][j] = c4 * c[0][j] / c3;
    }
    c1 = c2;
  }
  return c;
}

/// Row i of a banded operator: output[i] = sum_j weights[j] * input[first + j].
struct StencilRow {
  std::size_t first = 0;
  std::vector<double> weights;
};

/// Differentiation matrix rows (unit spacing) for a line of n points.
inline std::vector<StencilRow> derivative_rows(std::size_t n, int order, int accuracy) {
  const std::size_t half = static_cast<std::size_t>(accuracy / 2);
  const std::size_t width_c = 2 * half + 1;
  const std::size_t width_b = static_cast<std::size_t>(accuracy + order);
  std::vector<StencilRow> rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    StencilRow& r = rows[i];
    std::size_t width;
    if (i >= half && i + half < n) {
      r.first = i - half;
      width = width_c;
    } else {
      width = width_b;
      r.first = (i < half) ? 0 : n - width;
    }
    std::vector<double> nodes(width);
    for (std::size_t j = 0; j < width; ++j) nodes[j] = static_cast<double>(r.first + j);
    auto w = fornberg(static_cast<double>(i), nodes, order);
    r.weights = std::move(w[order]);
  }
  return rows;
}

/// Solve a small dense system in long double (Gaussian elimination with pivoting).
inline std::vector<double> solve_small(std::vector<std::vector<long double>> a, std::vector<long double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
    std::swap(a[col], a[piv]);
    std::swap(b[col], b[piv]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const long double f = a[r][col] / a[col][col];
      for (std::size_t k = col; k < n; ++k) a[r][k] -= f * a[col][k];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t r = n; r-- > 0;) {
    long double s = b[r];
    for (std::size_t k = r + 1; k < n; ++k) s -= a[r][k] * x[k];
    x[r] = static_cast<double>(s / a[r][r]);
  }
  return x;
}

/// Rows giving the integral over cell [i, i+1] (unit spacing) of the local
/// interpolant through `accuracy` neighbouring samples.
inline std::vector<StencilRow> cell_integral_rows(std::size_t n, int accuracy) {
  const std::size_t a = static_cast<std::size_t>(accuracy);
  std::vector<StencilRow> rows(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const long long lo_raw = static_cast<long long>(i) - static_cast<long long>(a / 2) + 1;
    const std::size_t lo =
        static_cast<std::size_t>(std::clamp<long long>(lo_raw, 0, static_cast<long long>(n - a)));
    std::vector<std::vector<long double>> vand(a, std::vector<long double>(a));
    std::vector<long double> rhs(a);
    for (std::size_t k = 0; k < a; ++k) {
      for (std::size_t j = 0; j < a; ++j) {
        const long double t = static_cast<long double>(lo + j) - static_cast<long double>(i);
        vand[k][j] = std::pow(t, static_cast<long double>(k));
      }
      rhs[k] = 1.0L / static_cast<long double>(k + 1);
    }
    rows[i].first = lo;
    rows[i].weights = solve_small(std::move(vand), std::move(rhs));
  }
  return rows;
}

struct StencilCache {
  std::mutex mu;
  std::map<std::tuple<std::size_t, int, int>, std::vector<StencilRow>> rows;

  const std::vector<StencilRow>& get(std::size_t n, int order, int accuracy) {
    std::lock_guard lock(mu);
    auto key = std::make_tuple(n, order, accuracy);
    auto it = rows.find(key);
    if (it == rows.end())
      it = rows.emplace(key, order > 0 ? derivative_rows(n, order, accuracy) : cell_integral_rows(n, accuracy))
               .first;
    return it->second;
  }
};

inline StencilCache& stencil_cache() {
  static StencilCache cache;
  return cache;
}

}  // namespace detail

/// Accuracy order of derivative stencils and cumulative quadrature.
inline constexpr int kDefaultAccuracy = 8;

/// Relative threshold for the lower-boundary decay check of inverse_derivative.
inline constexpr double kDefaultDecayTol = 1e-8;

/// Number of points a derivative stencil reaches on either side of its centre.
constexpr std::size_t stencil_half_width(int accuracy = kDefaultAccuracy) {
  return static_cast<std::size_t>(accuracy / 2);
}

inline std::size_t min_points_for(int order, int accuracy) { return static_cast<std::size_t>(accuracy + order); }

/// Finite-difference derivative (order 1 or 2) along one axis. Central
/// stencils of the given accuracy in the interior, one-sided stencils of the
/// same accuracy near the ends.
template <GridScalar T>
GridFn<T> derivative(const GridFn<T>& f, std::size_t axis_index, int order = 1, int accuracy = kDefaultAccuracy) {
  require(axis_index < f.rank(), "derivative: axis index out of range");
  require(order == 1 || order == 2, "derivative: order must be 1 or 2");
  require(accuracy >= 2 && accuracy % 2 == 0, "derivative: accuracy must be a positive even number");
  const Axis& ax = f.axis(axis_index);
  require(ax.count() >= std::max<std::size_t>(5, min_points_for(order, accuracy)),
          "derivative: axis '" + ax.name() + "' too short for the stencil");
  const auto& rows = detail::stencil_cache().get(ax.count(), order, accuracy);
  const double scale = 1.0 / std::pow(ax.spacing(), order);
  GridFn<T> out(f.axes());
  out.merge_warnings(f.warnings());
  const auto in = f.values();
  auto dst = out.values();
  f.for_each_line(axis_index, [&](std::size_t start, std::size_t stride, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto& r = rows[i];
      T acc{};
      const std::size_t base = start + r.first * stride;
      for (std::size_t j = 0; j < r.weights.size(); ++j) acc += r.weights[j] * in[base + j * stride];
      dst[start + i * stride] = acc * scale;
    }
  });
  return out;
}

template <GridScalar T>
GridFn<T> derivative(const GridFn<T>& f, std::string_view axis, int order = 1, int accuracy = kDefaultAccuracy) {
  return derivative(f, f.axis_index(axis), order, accuracy);
}

/// n-fold antiderivative from the lower axis boundary, which stands in for
/// -infinity. Each pass integrates the local interpolant cell by cell. If
/// the input does not decay at the lower boundary, a warning is attached.
template <GridScalar T>
GridFn<T> inverse_derivative(const GridFn<T>& f, std::size_t axis_index, int n = 1, int accuracy = kDefaultAccuracy,
                             double decay_tol = kDefaultDecayTol) {
  require(axis_index < f.rank(), "inverse_derivative: axis index out of range");
  require(n >= 1, "inverse_derivative: n must be positive");
  const Axis& ax = f.axis(axis_index);
  require(ax.count() >= static_cast<std::size_t>(accuracy), "inverse_derivative: axis too short");
  const auto& rows = detail::stencil_cache().get(ax.count(), 0, accuracy);
  const double h = ax.spacing();

  GridFn<T> cur = f;
  const double peak = max_abs(f);
  double edge = 0.0;
  f.for_each_line(axis_index, [&](std::size_t start, std::size_t, std::size_t) {
    edge = std::max(edge, std::abs(f[start]));
  });
  if (peak > 0.0 && edge > decay_tol * peak)
    cur.add_warning("inverse_derivative: input does not decay at lower boundary of axis '" + ax.name() + "'");

  for (int pass = 0; pass < n; ++pass) {
    GridFn<T> next(cur.axes());
    next.merge_warnings(cur.warnings());
    const auto in = cur.values();
    auto dst = next.values();
    cur.for_each_line(axis_index, [&](std::size_t start, std::size_t stride, std::size_t count) {
      T acc{};
      dst[start] = T{};
      for (std::size_t i = 0; i + 1 < count; ++i) {
        const auto& r = rows[i];
        T cell{};
        const std::size_t base = start + r.first * stride;
        for (std::size_t j = 0; j < r.weights.size(); ++j) cell += r.weights[j] * in[base + j * stride];
        acc += cell * h;
        dst[start + (i + 1) * stride] = acc;
      }
    });
    cur = std::move(next);
  }
  return cur;
}

template <GridScalar T>
GridFn<T> inverse_derivative(const GridFn<T>& f, std::string_view axis, int n = 1, int accuracy = kDefaultAccuracy) {
  return inverse_derivative(f, f.axis_index(axis), n, accuracy);
}

/// Trapezoid weights for an axis.
inline std::vector<double> trapezoid_weights(const Axis& ax) {
  std::vector<double> w(ax.count(), ax.spacing());
  w.front() *= 0.5;
  w.back() *= 0.5;
  return w;
}

/// Weights of the composite rule that integrates the local degree
/// (accuracy−1) interpolant over every cell; exact for polynomials of that
/// degree on any axis, including non-periodic integrands.
inline std::vector<double> high_order_weights(const Axis& ax, int accuracy = kDefaultAccuracy) {
  require(ax.count() >= static_cast<std::size_t>(accuracy), "high-order quadrature: axis too short");
  const auto& rows = detail::stencil_cache().get(ax.count(), 0, accuracy);
  std::vector<double> w(ax.count(), 0.0);
  for (const auto& r : rows)
    for (std::size_t j = 0; j < r.weights.size(); ++j) w[r.first + j] += r.weights[j] * ax.spacing();
  return w;
}

enum class Quadrature { trapezoid, high_order };

/// Quadrature (trapezoid by default) over the listed axes. The result keeps the remaining
/// axes in their original order; integrating every axis yields rank 0.
template <GridScalar T>
GridFn<T> integrate(const GridFn<T>& f, std::vector<std::size_t> axis_indices,
                    Quadrature rule = Quadrature::trapezoid) {
  std::sort(axis_indices.begin(), axis_indices.end());
  require(std::adjacent_find(axis_indices.begin(), axis_indices.end()) == axis_indices.end(),
          "integrate: repeated axis index");
  for (auto a : axis_indices) require(a < f.rank(), "integrate: axis index out of range");

  GridFn<T> cur = f;
  // Integrate from the highest index down so lower indices stay valid.
  for (auto it = axis_indices.rbegin(); it != axis_indices.rend(); ++it) {
    const std::size_t a = *it;
    std::vector<Axis> rest;
    for (std::size_t k = 0; k < cur.rank(); ++k)
      if (k != a) rest.push_back(cur.axis(k));
    GridFn<T> next = rest.empty() ? GridFn<T>() : GridFn<T>(rest);
    next.merge_warnings(cur.warnings());
    const auto w = rule == Quadrature::trapezoid ? trapezoid_weights(cur.axis(a)) : high_order_weights(cur.axis(a));
    const std::size_t n = cur.axis(a).count();
    const std::size_t inner = cur.stride(a);
    const std::size_t outer = cur.size() / (n * inner);
    for (std::size_t o = 0; o < outer; ++o)
      for (std::size_t i = 0; i < inner; ++i) {
        T acc{};
        const std::size_t base = o * n * inner + i;
        for (std::size_t k = 0; k < n; ++k) acc += w[k] * cur[base + k * inner];
        next[o * inner + i] = acc;
      }
    cur = std::move(next);
  }
  return cur;
}

template <GridScalar T>
T integrate_all(const GridFn<T>& f, Quadrature rule = Quadrature::trapezoid) {
  std::vector<std::size_t> all(f.rank());
  std::iota(all.begin(), all.end(), 0);
  return integrate(f, all, rule)[0];
}

/// Multilinear interpolation; exact at nodes.
template <GridScalar T>
T interpolate(const GridFn<T>& f, std::span<const double> point) {
  require(point.size() == f.rank(), "interpolate: point dimension mismatch");
  const std::size_t r = f.rank();
  std::vector<std::size_t> lo(r);
  std::vector<double> t(r);
  for (std::size_t a = 0; a < r; ++a) {
    const Axis& ax = f.axis(a);
    require(ax.contains(point[a]), "interpolate: point outside grid hull on axis '" + ax.name() + "'");
    double u = std::clamp((point[a] - ax.min()) / ax.spacing(), 0.0, static_cast<double>(ax.count() - 1));
    std::size_t i = std::min(static_cast<std::size_t>(std::floor(u)), ax.count() - 2);
    lo[a] = i;
    t[a] = u - static_cast<double>(i);
  }
  T acc{};
  for (std::size_t corner = 0; corner < (std::size_t{1} << r); ++corner) {
    double w = 1.0;
    std::size_t flat = 0;
    for (std::size_t a = 0; a < r; ++a) {
      const bool up = (corner >> a) & 1U;
      w *= up ? t[a] : 1.0 - t[a];
      flat += (lo[a] + (up ? 1 : 0)) * f.stride(a);
    }
    if (w != 0.0) acc += w * f[flat];
  }
  return acc;
}

template <GridScalar T>
T interpolate(const GridFn<T>& f, std::initializer_list<double> point) {
  return interpolate(f, std::span<const double>(point.begin(), point.size()));
}

/// Cubic B-spline interpolant of a real 2-D table; zero outside the table.
/// Used where bilinear interpolation is too coarse (Radon line integrals,
/// half-node density-matrix samples).
class BSpline2D {
 public:
  BSpline2D() = default;

  BSpline2D(const Axis& ax0, const Axis& ax1, std::span<const double> values)
      : x0_(ax0.min()), y0_(ax1.min()), hx_(ax0.spacing()), hy_(ax1.spacing()), nx_(ax0.count()),
        ny_(ax1.count()), coef_(values.begin(), values.end()) {
    require(values.size() == nx_ * ny_, "BSpline2D: value count mismatch");
    std::vector<double> line;
    for (std::size_t i = 0; i < nx_; ++i) {
      line.assign(coef_.begin() + static_cast<std::ptrdiff_t>(i * ny_),
                  coef_.begin() + static_cast<std::ptrdiff_t>((i + 1) * ny_));
      prefilter(line);
      std::copy(line.begin(), line.end(), coef_.begin() + static_cast<std::ptrdiff_t>(i * ny_));
    }
    line.resize(nx_);
    for (std::size_t j = 0; j < ny_; ++j) {
      for (std::size_t i = 0; i < nx_; ++i) line[i] = coef_[i * ny_ + j];
      prefilter(line);
      for (std::size_t i = 0; i < nx_; ++i) coef_[i * ny_ + j] = line[i];
    }
  }

  double operator()(double x, double y) const {
    const double u = (x - x0_) / hx_;
    const double v = (y - y0_) / hy_;
    if (!(u > -1.0 && v > -1.0 && u < static_cast<double>(nx_) && v < static_cast<double>(ny_))) return 0.0;
    const double fu = std::floor(u);
    const double fv = std::floor(v);
    const long iu = static_cast<long>(fu);
    const long iv = static_cast<long>(fv);
    double wu[4];
    double wv[4];
    weights(u - fu, wu);
    weights(v - fv, wv);
    double acc = 0.0;
    if (iu >= 1 && iv >= 1 && iu + 2 < static_cast<long>(nx_) && iv + 2 < static_cast<long>(ny_)) {
      const double* c = coef_.data() + static_cast<std::size_t>(iu - 1) * ny_ + static_cast<std::size_t>(iv - 1);
      for (int a = 0; a < 4; ++a, c += ny_) acc += wu[a] * (wv[0] * c[0] + wv[1] * c[1] + wv[2] * c[2] + wv[3] * c[3]);
      return acc;
    }
    for (int a = 0; a < 4; ++a) {
      const std::size_t ia = mirror(iu - 1 + a, nx_);
      double row = 0.0;
      const double* c = coef_.data() + ia * ny_;
      for (int b = 0; b < 4; ++b) row += wv[b] * c[mirror(iv - 1 + b, ny_)];
      acc += wu[a] * row;
    }
    return acc;
  }

 private:
  static void weights(double t, double w[4]) {
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double s = 1.0 - t;
    w[0] = s * s * s / 6.0;
    w[1] = (3.0 * t3 - 6.0 * t2 + 4.0) / 6.0;
    w[2] = (-3.0 * t3 + 3.0 * t2 + 3.0 * t + 1.0) / 6.0;
    w[3] = t3 / 6.0;
  }

  static std::size_t mirror(long i, std::size_t n) {
    const long m = static_cast<long>(n);
    if (m == 1) return 0;
    const long period = 2 * (m - 1);
    i %= period;
    if (i < 0) i += period;
    if (i >= m) i = period - i;
    return static_cast<std::size_t>(i);
  }

  // In-place conversion of samples to cubic B-spline coefficients with
  // mirror-symmetric boundaries.
  static void prefilter(std::vector<double>& c) {
    const std::size_t n = c.size();
    if (n < 2) return;
    const double z = std::sqrt(3.0) - 2.0;
    const double lambda = (1.0 - z) * (1.0 - 1.0 / z);
    for (auto& v : c) v *= lambda;
    // causal initialisation, truncated geometric sum
    const std::size_t horizon = std::min<std::size_t>(n, 40);
    double zn = z;
    double sum = c[0];
    for (std::size_t k = 1; k < horizon; ++k) {
      sum += zn * c[k];
      zn *= z;
    }
    c[0] = sum;
    for (std::size_t k = 1; k < n; ++k) c[k] += z * c[k - 1];
    c[n - 1] = (z / (z * z - 1.0)) * (z * c[n - 2] + c[n - 1]);
    for (std::size_t k = n - 1; k-- > 0;) c[k] = z * (c[k + 1] - c[k]);
  }

  double x0_ = 0.0, y0_ = 0.0, hx_ = 1.0, hy_ = 1.0;
  std::size_t nx_ = 0, ny_ = 0;
  std::vector<double> coef_;
};

}  // namespace jpr
