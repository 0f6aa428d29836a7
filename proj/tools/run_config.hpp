#pragma once
// Effective configuration of one CLI run; round-trips through JSON.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "jpr/dynamics.hpp"
#include "jpr/gridio.hpp"
#include "jpr/jointdist.hpp"
#include "jpr/states.hpp"
#include "jpr/tomography.hpp"

namespace jpr::cli {

struct GridOverride {
  double min = 0;
  double max = 0;
  std::size_t count = 0;
  bool operator==(const GridOverride&) const = default;
};

struct RunConfig {
  std::string command;
  std::string state;
  std::string prior;  // empty: default prior of the representation
  std::string rep = "symplectic";
  OscillatorParams params;
  std::map<std::string, GridOverride> grids;
  std::vector<double> potential;  // empty: harmonic potential of `params`
  std::string out = "jpr-out";
  std::map<std::string, double> tolerances{
      {"expect", 2e-2}, {"stationary", 3e-2}, {"evolution", 3e-2}, {"condition", 2e-2}, {"reconstruct", 5e-3}};
  std::string method = "exact";
  bool svg = false;
  std::string op = "n";
  std::string symbol = "regular";
  std::string check = "stationary";
  std::optional<double> energy;
  bool printed_form = false;
  bool single_peak = false;
  double time = 0;
  double dt = 0.01;
  std::size_t steps = 50;
  std::size_t snapshot_every = 10;
  std::vector<int> criteria;
  std::optional<double> fock0_energy;
  unsigned seed = 1;
  bool json_output = false;

  bool operator==(const RunConfig& o) const { return to_json() == o.to_json(); }

  Representation representation() const {
    if (rep == "symplectic") return Representation::symplectic;
    if (rep == "optical") return Representation::optical;
    fail(ErrorKind::invalid_argument, "unknown representation '" + rep + "' (expected symplectic or optical)");
  }

  StateSpec state_spec() const {
    require(!state.empty(), "missing --state");
    return parse_state(state);
  }

  Prior prior_spec() const {
    if (prior.empty()) return representation() == Representation::symplectic ? Prior{GaussianPrior{}} : Prior{GaussianSumPrior{}};
    auto p = parse_prior(prior);
    require(representation_of(p) == representation(),
            "prior '" + prior + "' does not belong to the " + rep + " representation");
    return p;
  }

  PolynomialPotential potential_spec() const {
    if (potential.empty()) return PolynomialPotential::harmonic(params);
    PolynomialPotential v{potential};
    v.validate();
    return v;
  }

  double tolerance(const std::string& key) const {
    auto it = tolerances.find(key);
    require(it != tolerances.end(), "no tolerance named '" + key + "'");
    return it->second;
  }

  Axis axis(const std::string& name) const {
    if (auto it = grids.find(name); it != grids.end()) return Axis(name, it->second.min, it->second.max, it->second.count);
    if (name == "X") return default_x_axis();
    if (name == "mu") return default_mu_axis();
    if (name == "nu") return default_nu_axis();
    if (name == "theta") return default_theta_axis();
    if (name == "q") return default_q_axis();
    if (name == "p") return default_p_axis();
    fail(ErrorKind::invalid_argument, "unknown axis '" + name + "'");
  }

  std::vector<Axis> tomogram_axes() const {
    if (representation() == Representation::symplectic) return {axis("X"), axis("mu"), axis("nu")};
    return {axis("X"), axis("theta")};
  }

  /// Canonical spec strings and an explicit potential.
  void resolve() {
    params.validate();
    representation();
    if (!state.empty()) state = to_string(parse_state(state));
    if (!prior.empty()) prior = to_string(prior_spec());
    potential = potential_spec().coefficients;
    for (const auto& [name, g] : grids) axis(name);
  }

  json to_json() const {
    json j;
    j["command"] = command;
    j["state"] = state;
    j["prior"] = prior;
    j["rep"] = rep;
    j["params"] = {{"hbar", params.hbar}, {"mass", params.mass}, {"omega", params.omega}};
    j["grids"] = json::object();
    for (const auto& [name, g] : grids) j["grids"][name] = {g.min, g.max, g.count};
    j["potential"] = potential;
    j["out"] = out;
    j["tolerances"] = json::object();
    for (const auto& [k, v] : tolerances) j["tolerances"][k] = v;
    j["method"] = method;
    j["svg"] = svg;
    j["op"] = op;
    j["symbol"] = symbol;
    j["check"] = check;
    j["energy"] = energy ? json(*energy) : json(nullptr);
    j["printed_form"] = printed_form;
    j["single_peak"] = single_peak;
    j["time"] = time;
    j["dt"] = dt;
    j["steps"] = steps;
    j["snapshot_every"] = snapshot_every;
    j["criteria"] = criteria;
    j["fock0_energy"] = fock0_energy ? json(*fock0_energy) : json(nullptr);
    j["seed"] = seed;
    j["json"] = json_output;
    return j;
  }

  /// Overwrites the fields present in `j`; unknown keys are rejected.
  void merge(const nlohmann::ordered_json& j) {
    require(j.is_object(), "config must be a JSON object");
    try {
      for (auto it = j.begin(); it != j.end(); ++it) {
        const auto& k = it.key();
        const auto& v = it.value();
        if (k == "command") command = v.get<std::string>();
        else if (k == "state") state = v.get<std::string>();
        else if (k == "prior") prior = v.get<std::string>();
        else if (k == "rep") rep = v.get<std::string>();
        else if (k == "params") {
          for (auto p = v.begin(); p != v.end(); ++p) {
            if (p.key() == "hbar") params.hbar = p.value().get<double>();
            else if (p.key() == "mass") params.mass = p.value().get<double>();
            else if (p.key() == "omega") params.omega = p.value().get<double>();
            else fail(ErrorKind::invalid_argument, "unknown config key 'params." + p.key() + "'");
          }
        } else if (k == "grids") {
          for (auto g = v.begin(); g != v.end(); ++g) {
            require(g.value().is_array() && g.value().size() == 3, "grid '" + g.key() + "' must be [min, max, count]");
            grids[g.key()] = {g.value()[0].get<double>(), g.value()[1].get<double>(), g.value()[2].get<std::size_t>()};
          }
        } else if (k == "potential") potential = v.get<std::vector<double>>();
        else if (k == "out") out = v.get<std::string>();
        else if (k == "tolerances") {
          for (auto t = v.begin(); t != v.end(); ++t) {
            require(tolerances.count(t.key()), "unknown tolerance '" + t.key() + "'");
            tolerances[t.key()] = t.value().get<double>();
          }
        } else if (k == "method") method = v.get<std::string>();
        else if (k == "svg") svg = v.get<bool>();
        else if (k == "op") op = v.get<std::string>();
        else if (k == "symbol") symbol = v.get<std::string>();
        else if (k == "check") check = v.get<std::string>();
        else if (k == "energy") energy = v.is_null() ? std::nullopt : std::optional<double>(v.get<double>());
        else if (k == "printed_form") printed_form = v.get<bool>();
        else if (k == "single_peak") single_peak = v.get<bool>();
        else if (k == "time") time = v.get<double>();
        else if (k == "dt") dt = v.get<double>();
        else if (k == "steps") steps = v.get<std::size_t>();
        else if (k == "snapshot_every") snapshot_every = v.get<std::size_t>();
        else if (k == "criteria") criteria = v.get<std::vector<int>>();
        else if (k == "fock0_energy")
          fock0_energy = v.is_null() ? std::nullopt : std::optional<double>(v.get<double>());
        else if (k == "seed") seed = v.get<unsigned>();
        else if (k == "json") json_output = v.get<bool>();
        else fail(ErrorKind::invalid_argument, "unknown config key '" + k + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::invalid_argument, std::string("config: ") + e.what());
    }
  }

  static RunConfig from_json(const nlohmann::ordered_json& j) {
    RunConfig c;
    c.merge(j);
    return c;
  }
};

/// "x:-8,8,161" -> ("X", {-8, 8, 161}).
inline std::pair<std::string, GridOverride> parse_grid_flag(std::string_view text) {
  auto colon = text.find(':');
  require(colon != std::string_view::npos, "--grid expects axis:min,max,count, got '" + std::string(text) + "'");
  std::string name(trim(text.substr(0, colon)));
  if (name == "x") name = "X";
  auto parts = split(text.substr(colon + 1), ',');
  require(parts.size() == 3, "--grid expects axis:min,max,count, got '" + std::string(text) + "'");
  const long n = parse_long(parts[2], "grid count");
  require(n >= 3, "grid count must be at least 3");
  GridOverride g{parse_double(parts[0], "grid min"), parse_double(parts[1], "grid max"), static_cast<std::size_t>(n)};
  return {name, g};
}

}  // namespace jpr::cli
