#pragma once
// Small parsing helpers for "kind:key=value,key=value" spec strings.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "jpr/error.hpp"

namespace jpr {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    auto next = s.find(sep, pos);
    out.push_back(trim(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

inline double parse_double(std::string_view s, std::string_view what) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    fail(ErrorKind::invalid_argument, "cannot parse " + std::string(what) + " from '" + std::string(s) + "'");
  return v;
}

inline long parse_long(std::string_view s, std::string_view what) {
  s = trim(s);
  long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    fail(ErrorKind::invalid_argument, "cannot parse integer " + std::string(what) + " from '" + std::string(s) + "'");
  return v;
}

/// "kind:k1=v1,k2=v2" -> (kind, {k1:v1, k2:v2}); keys outside `allowed` are rejected.
inline std::pair<std::string, std::map<std::string, std::string>> parse_kind_kv(
    std::string_view text, const std::set<std::string>& allowed = {}) {
  text = trim(text);
  auto colon = text.find(':');
  std::string kind(trim(text.substr(0, colon)));
  std::map<std::string, std::string> kv;
  if (colon != std::string_view::npos && !trim(text.substr(colon + 1)).empty()) {
    for (auto item : split(text.substr(colon + 1), ',')) {
      auto eq = item.find('=');
      if (eq == std::string_view::npos)
        fail(ErrorKind::invalid_argument, "expected key=value in '" + std::string(item) + "'");
      std::string key(trim(item.substr(0, eq)));
      if (!allowed.empty() && !allowed.count(key))
        fail(ErrorKind::invalid_argument, "unknown key '" + key + "' for '" + kind + "'");
      if (!kv.emplace(key, std::string(trim(item.substr(eq + 1)))).second)
        fail(ErrorKind::invalid_argument, "duplicate key '" + key + "'");
    }
  }
  return {kind, kv};
}

/// Shortest round-trip text for a double.
inline std::string fmt(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

/// Fixed "%.*g" formatting.
inline std::string fmt_g(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

}  // namespace jpr
