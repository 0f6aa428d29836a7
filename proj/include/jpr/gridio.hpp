#pragma once
// Text serialization of grid functions: CSV with a one-line JSON header, and
// SVG heatmaps of 2-D slices.

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "jpr/gridcalc.hpp"
#include "jpr/parse.hpp"

namespace jpr {

using json = nlohmann::ordered_json;

inline json axis_json(const Axis& a) {
  return {{"name", a.name()}, {"min", a.min()}, {"max", a.max()}, {"count", a.count()}};
}

inline Axis axis_from_json(const json& j) {
  return Axis(j.at("name").get<std::string>(), j.at("min").get<double>(), j.at("max").get<double>(),
              j.at("count").get<std::size_t>());
}

/// Header object: {"axes": [...], "value": "real"|"complex", "warnings": [...]}
/// merged with `extra`.
template <GridScalar T>
json grid_header(const GridFn<T>& g, const json& extra = json::object()) {
  json h = json::object();
  h["axes"] = json::array();
  for (const auto& a : g.axes()) h["axes"].push_back(axis_json(a));
  h["value"] = is_complex_v<T> ? "complex" : "real";
  h["warnings"] = g.warnings();
  for (auto it = extra.begin(); it != extra.end(); ++it) h[it.key()] = it.value();
  return h;
}

/// "# {header}\n" then a column line, then one row per grid point in flat
/// (row-major) order: coordinates, then value or re,im. `leading` prefixes
/// every row (used for frame series).
template <GridScalar T>
void write_csv_rows(std::ostream& os, const GridFn<T>& g, const std::string& leading = {}) {
  const std::size_t r = g.rank();
  std::vector<std::size_t> idx(r, 0);
  std::string line;
  for (std::size_t f = 0; f < g.size(); ++f) {
    line = leading;
    for (std::size_t a = 0; a < r; ++a) {
      line += fmt(g.axis(a)[idx[a]]);
      line += ',';
    }
    if constexpr (is_complex_v<T>) {
      line += fmt(g[f].real());
      line += ',';
      line += fmt(g[f].imag());
    } else {
      line += fmt(g[f]);
    }
    line += '\n';
    os << line;
    for (std::size_t a = r; a-- > 0;) {
      if (++idx[a] < g.axis(a).count()) break;
      idx[a] = 0;
    }
  }
}

template <GridScalar T>
std::string csv_columns(const GridFn<T>& g) {
  std::string s;
  for (const auto& a : g.axes()) s += a.name() + ",";
  return s + (is_complex_v<T> ? "re,im" : "value");
}

template <GridScalar T>
void write_csv(std::ostream& os, const GridFn<T>& g, const json& extra = json::object()) {
  os << "# " << grid_header(g, extra).dump() << '\n' << csv_columns(g) << '\n';
  write_csv_rows(os, g);
}

struct CsvGrid {
  json header;
  RealGrid real;
  ComplexGrid complex;
  bool is_complex = false;
};

/// Reads back what write_csv produced. Rows must be complete and in order.
inline CsvGrid read_csv(std::istream& is) {
  std::string line;
  require(static_cast<bool>(std::getline(is, line)) && line.rfind("# ", 0) == 0, "CSV grid: missing '# {json}' header line");
  CsvGrid out;
  try {
    out.header = json::parse(line.substr(2));
  } catch (const json::exception& e) {
    fail(ErrorKind::invalid_argument, std::string("CSV grid: bad JSON header: ") + e.what());
  }
  std::vector<Axis> axes;
  for (const auto& a : out.header.at("axes")) axes.push_back(axis_from_json(a));
  out.is_complex = out.header.value("value", "real") == "complex";
  require(static_cast<bool>(std::getline(is, line)), "CSV grid: missing column line");
  std::size_t total = 1;
  for (const auto& a : axes) total *= a.count();
  const std::size_t ncols = axes.size() + (out.is_complex ? 2 : 1);
  std::vector<double> re(total), im(out.is_complex ? total : 0);
  std::size_t row = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    require(row < total, "CSV grid: more rows than the header axes allow");
    auto cells = split(line, ',');
    require(cells.size() == ncols, "CSV grid: row " + std::to_string(row) + " has the wrong number of columns");
    re[row] = parse_double(cells[axes.size()], "value");
    if (out.is_complex) im[row] = parse_double(cells[axes.size() + 1], "value");
    ++row;
  }
  require(row == total, "CSV grid: expected " + std::to_string(total) + " rows, read " + std::to_string(row));
  if (out.is_complex) {
    std::vector<cplx> v(total);
    for (std::size_t i = 0; i < total; ++i) v[i] = {re[i], im[i]};
    out.complex = ComplexGrid(axes, std::move(v));
  } else {
    out.real = RealGrid(axes, std::move(re));
  }
  return out;
}

/// 2-D slice of `g` keeping axes `keep0`, `keep1`; every other axis is fixed at
/// the grid node nearest to the requested value.
inline RealGrid slice2d(const RealGrid& g, std::size_t keep0, std::size_t keep1, const std::vector<double>& fixed) {
  require(keep0 < g.rank() && keep1 < g.rank() && keep0 != keep1, "slice2d: bad axes");
  require(fixed.size() == g.rank(), "slice2d: one fixed value per axis expected");
  std::vector<std::size_t> idx(g.rank());
  for (std::size_t a = 0; a < g.rank(); ++a) idx[a] = g.axis(a).nearest(fixed[a]);
  RealGrid out({g.axis(keep0), g.axis(keep1)});
  for (std::size_t i = 0; i < g.axis(keep0).count(); ++i)
    for (std::size_t j = 0; j < g.axis(keep1).count(); ++j) {
      idx[keep0] = i;
      idx[keep1] = j;
      out.at({i, j}) = g[g.flat_index(idx)];
    }
  return out;
}

namespace detail {

// viridis, 5 anchors
inline std::string colour(double t) {
  static constexpr std::array<std::array<double, 3>, 5> c{
      {{68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}}};
  t = std::clamp(std::isfinite(t) ? t : 0.0, 0.0, 1.0) * 4;
  const auto k = std::min<std::size_t>(static_cast<std::size_t>(t), 3);
  const double f = t - static_cast<double>(k);
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(std::lround(c[k][0] + f * (c[k + 1][0] - c[k][0]))),
                static_cast<int>(std::lround(c[k][1] + f * (c[k + 1][1] - c[k][1]))),
                static_cast<int>(std::lround(c[k][2] + f * (c[k + 1][2] - c[k][2]))));
  return buf;
}

}  // namespace detail

/// Heatmap of a 2-D grid: axis 0 horizontal, axis 1 vertical (increasing up).
inline void write_svg_heatmap(std::ostream& os, const RealGrid& g, const std::string& title) {
  require(g.rank() == 2, "write_svg_heatmap: 2-D grid required");
  const auto& ax = g.axis(0);
  const auto& ay = g.axis(1);
  const std::size_t nx = ax.count(), ny = ay.count();
  const double lo = *std::min_element(g.values().begin(), g.values().end());
  const double hi = *std::max_element(g.values().begin(), g.values().end());
  const double span = hi > lo ? hi - lo : 1.0;
  const int W = 480, H = 400, L = 60, T = 30;
  const double cw = static_cast<double>(W) / static_cast<double>(nx), ch = static_cast<double>(H) / static_cast<double>(ny);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W + L + 90 << "\" height=\"" << H + T + 50
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<text x=\"" << L << "\" y=\"18\">" << title << "</text>\n";
  os << "<g shape-rendering=\"crispEdges\">\n";
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j < ny; ++j)
      os << "<rect x=\"" << fmt_g(L + static_cast<double>(i) * cw, 6) << "\" y=\""
         << fmt_g(T + static_cast<double>(ny - 1 - j) * ch, 6) << "\" width=\"" << fmt_g(cw + 0.05, 4)
         << "\" height=\"" << fmt_g(ch + 0.05, 4) << "\" fill=\"" << detail::colour((g.at({i, j}) - lo) / span)
         << "\"/>\n";
  os << "</g>\n";
  os << "<text x=\"" << L + W / 2 << "\" y=\"" << T + H + 35 << "\" text-anchor=\"middle\">" << ax.name() << " ["
     << fmt_g(ax.min(), 4) << ", " << fmt_g(ax.max(), 4) << "]</text>\n";
  os << "<text x=\"15\" y=\"" << T + H / 2 << "\" transform=\"rotate(-90 15 " << T + H / 2
     << ")\" text-anchor=\"middle\">" << ay.name() << " [" << fmt_g(ay.min(), 4) << ", " << fmt_g(ay.max(), 4)
     << "]</text>\n";
  for (int k = 0; k <= 10; ++k) {
    const double t = k / 10.0;
    os << "<rect x=\"" << L + W + 20 << "\" y=\"" << T + static_cast<int>((1 - t) * (H - 20)) << "\" width=\"20\" height=\"20\" fill=\""
       << detail::colour(t) << "\"/>\n";
  }
  os << "<text x=\"" << L + W + 45 << "\" y=\"" << T + 14 << "\">" << fmt_g(hi, 3) << "</text>\n";
  os << "<text x=\"" << L + W + 45 << "\" y=\"" << T + H - 6 << "\">" << fmt_g(lo, 3) << "</text>\n";
  os << "</svg>\n";
}

}  // namespace jpr
