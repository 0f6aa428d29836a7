// jpr: command-line front end for the joint-probability tomography library.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "jpr/jpr.hpp"
#include "run_config.hpp"

namespace fs = std::filesystem;
using namespace jpr;
using jpr::cli::RunConfig;

namespace {

enum Exit : int { ok = 0, verification_failure = 1, usage_error = 2, numeric_failure = 3, io_failure = 4 };

const char* kExitCodes =
    "Exit codes:\n"
    "  0  success\n"
    "  1  verification failure (a residual, oracle or acceptance check exceeded its tolerance)\n"
    "  2  usage error (bad flag, spec string, config file or unsupported combination)\n"
    "  3  numeric failure (NaN, blow-up, normalization drift)\n"
    "  4  I/O failure (unreadable config, unwritable output path)\n";

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

fs::path out_dir(const RunConfig& c) {
  fs::path p(c.out);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec || !fs::is_directory(p)) throw IoError("cannot create output directory '" + c.out + "'");
  return p;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw IoError("cannot write '" + p.string() + "'");
  return os;
}

void close_out(std::ofstream& os, const fs::path& p) {
  os.close();
  if (!os) throw IoError("error writing '" + p.string() + "'");
}

void emit(const json& j) { std::cout << j.dump(2) << '\n'; }

json report_json(const ResidualReport& r, double tol) {
  json axes = json::array();
  for (const auto& a : r.axes) axes.push_back(axis_json(a));
  return {{"equation", r.equation}, {"state", r.state},       {"relative", r.relative},
          {"max_abs", r.max_abs},   {"lhs_norm", r.lhs_norm}, {"rhs_norm", r.rhs_norm},
          {"axes", axes},           {"points", r.points},     {"notes", r.notes},
          {"tolerance", tol},       {"pass", r.relative <= tol}};
}

JointDistribution exact_joint(const RunConfig& c, const StateSpec& s) {
  return make_joint(tomogram_exact(s, c.params, c.representation(), c.tomogram_axes()), c.prior_spec());
}

WignerFn oracle_wigner(const RunConfig& c, const StateSpec& s) {
  return wigner_from_density(density_matrix(s, c.params, c.axis("q")), c.params, c.axis("p"));
}

bool is_harmonic(const RunConfig& c) {
  auto h = PolynomialPotential::harmonic(c.params).coefficients;
  auto v = c.potential_spec().coefficients;
  v.resize(std::max(v.size(), h.size()), 0.0);
  h.resize(v.size(), 0.0);
  for (std::size_t i = 0; i < v.size(); ++i)
    if (std::abs(v[i] - h[i]) > 1e-12 * (1 + std::abs(h[i]))) return false;
  return true;
}

// -- tomogram ---------------------------------------------------------------

int cmd_tomogram(const RunConfig& c) {
  const auto s = c.state_spec();
  const auto rep = c.representation();
  Tomogram T;
  if (c.method == "exact") {
    T = tomogram_exact(s, c.params, rep, c.tomogram_axes());
  } else if (c.method == "radon") {
    auto W = oracle_wigner(c, s);
    T = rep == Representation::symplectic ? symplectic_tomogram(W, c.axis("X"), c.axis("mu"), c.axis("nu"))
                                          : optical_tomogram(W, c.axis("X"), c.axis("theta"));
  } else {
    fail(ErrorKind::invalid_argument, "unknown --method '" + c.method + "' (expected exact or radon)");
  }
  const auto dir = out_dir(c);
  json summary{{"command", "tomogram"}, {"representation", to_string(rep)}, {"state", to_string(s)}};
  json meta{{"kind", "tomogram"}, {"config", c.to_json()}, {"max_slice_drift", max_slice_drift(T)}};
  summary["max_slice_drift"] = meta["max_slice_drift"];
  json files = json::array();
  auto write = [&](const std::string& name, const RealGrid& g, const json& m) {
    const auto p = dir / name;
    auto os = open_out(p);
    write_csv(os, g, m);
    close_out(os, p);
    files.push_back(p.string());
  };
  auto write_svg = [&](const std::string& name, const RealGrid& g, const std::string& title) {
    RealGrid plane = rep == Representation::optical ? g : slice2d(g, 0, 1, {0.0, 0.0, 0.0});
    const auto p = dir / name;
    auto os = open_out(p);
    write_svg_heatmap(os, plane, title + (rep == Representation::optical ? "" : " at nu=0"));
    close_out(os, p);
    files.push_back(p.string());
  };
  write("tomogram.csv", T.grid, meta);
  if (c.svg) write_svg("tomogram.svg", T.grid, to_string(s) + " " + to_string(rep) + " tomogram");
  if (!c.prior.empty()) {
    auto J = make_joint(T, c.prior_spec());
    const double total = integrate_all(J.grid);
    json jm{{"kind", "joint"}, {"config", c.to_json()}, {"prior", to_string(J.prior)}, {"integral", total}};
    summary["joint_integral"] = total;
    write("joint.csv", J.grid, jm);
    if (c.svg) write_svg("joint.svg", J.grid, to_string(s) + " joint distribution");
  }
  summary["files"] = files;
  summary["config"] = c.to_json();
  emit(summary);
  return ok;
}

// -- expect -----------------------------------------------------------------

cplx oracle_value(const RunConfig& c, const WignerFn& W, const std::string& op) {
  auto m = moments(W);
  if (op == "one") return 1.0;
  if (op == "q") return m.q;
  if (op == "p") return m.p;
  if (op == "q2") return m.q2;
  if (op == "p2") return m.p2;
  if (op == "qp") return {m.qp, 0.5 * c.params.hbar};
  if (op == "pq") return {m.qp, -0.5 * c.params.hbar};
  if (op == "n") return m.number(c.params);
  fail(ErrorKind::invalid_argument, "unknown --op '" + op + "' for expect (expected one|q|p|q2|p2|qp|pq|n)");
}

int cmd_expect(const RunConfig& c) {
  const auto s = c.state_spec();
  const auto rep = c.representation();
  const auto prior = c.prior_spec();
  const auto J = exact_joint(c, s);
  const auto W = oracle_wigner(c, s);
  cplx value, oracle;
  std::string symbol = c.symbol;
  if (symbol.rfind("monomial:", 0) == 0) {
    if (rep != Representation::symplectic)
      fail(ErrorKind::unsupported, "monomial symbols exist only in the symplectic representation");
    auto kl = split(std::string_view(symbol).substr(9), ',');
    require(kl.size() == 2, "--symbol monomial:k,l expects two orders");
    const int k = static_cast<int>(parse_long(kl[0], "k")), l = static_cast<int>(parse_long(kl[1], "l"));
    value = pair(monomial_regular_symbol(k, l, std::get<GaussianPrior>(prior)), J);
    auto f = RealGrid::tabulate(W.grid.axes(), [&](auto x) { return std::pow(x[0], k) * std::pow(x[1], l); });
    oracle = integrate_all(hadamard(f, W.grid));
  } else {
    oracle = oracle_value(c, W, c.op);
    if (symbol == "regular") {
      if (c.op == "one")
        value = rep == Representation::symplectic ? pair(monomial_regular_symbol(0, 0, std::get<GaussianPrior>(prior)), J)
                                                  : integrate_all(J.grid);
      else
        value = pair(regular_symbol(c.op, prior, c.params), J);
    } else if (symbol == "singular") {
      if (rep != Representation::symplectic)
        fail(ErrorKind::unsupported, "singular symbols exist only in the symplectic representation");
      require(c.op != "pq", "no singular symbol for pq");
      value = pair(singular_symbol(c.op, std::get<GaussianPrior>(prior), c.params), J);
    } else if (symbol == "alt") {
      if (rep != Representation::symplectic || (c.op != "q2" && c.op != "p2"))
        fail(ErrorKind::unsupported, "alternative symbols exist for q2 and p2 in the symplectic representation");
      auto alt = alternative_regular_symbols_q2_p2(std::get<GaussianPrior>(prior));
      value = pair(c.op == "q2" ? alt.q2 : alt.p2, J);
    } else {
      fail(ErrorKind::invalid_argument, "unknown --symbol '" + symbol + "' (expected regular|singular|alt|monomial:k,l)");
    }
  }
  if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) fail(ErrorKind::numeric, "non-finite pairing");
  const double err = std::abs(value - oracle);
  const double rel = err / std::max(1.0, std::abs(oracle));
  const double tol = c.tolerance("expect");
  emit({{"op", symbol.rfind("monomial:", 0) == 0 ? symbol : c.op},
        {"symbol", symbol},
        {"state", to_string(s)},
        {"prior", to_string(prior)},
        {"representation", to_string(rep)},
        {"re", value.real()},
        {"im", value.imag()},
        {"oracle", {{"re", oracle.real()}, {"im", oracle.imag()}}},
        {"abs_error", err},
        {"relative_error", rel},
        {"tolerance", tol},
        {"pass", rel <= tol},
        {"config", c.to_json()}});
  return rel <= tol ? ok : verification_failure;
}

// -- residual ---------------------------------------------------------------

int cmd_residual(const RunConfig& c) {
  const auto s = c.state_spec();
  const auto rep = c.representation();
  const auto prior = c.prior_spec();
  const auto V = c.potential_spec();
  ResidualReport r;
  std::string tol_key = c.check;
  if (c.check == "stationary") {
    double E = 0;
    if (c.energy) E = *c.energy;
    else if (auto* f = std::get_if<Fock>(&s)) E = c.params.hbar * c.params.omega * (f->n + 0.5);
    else fail(ErrorKind::invalid_argument, "--energy is required for states other than Fock states");
    const auto J = exact_joint(c, s);
    if (rep == Representation::symplectic) {
      if (c.single_peak) fail(ErrorKind::unsupported, "--single-peak applies to the optical representation");
      r = stationary_residual_symplectic(J, V, E, c.printed_form);
      if (c.printed_form)
        r.notes.push_back("typeset vs composed relative discrepancy " +
                          fmt_g(stationary_typeset_discrepancy(J, V).relative, 4));
    } else {
      r = stationary_residual_optical(J, V, E, c.single_peak);
    }
  } else if (c.check == "condition") {
    if (rep != Representation::symplectic)
      fail(ErrorKind::unsupported, "the stationarity condition is formulated in the symplectic representation");
    r = stationarity_condition_symplectic(exact_joint(c, s), V);
  } else if (c.check == "evolution") {
    JointDistribution J;
    RealGrid oracle;
    std::vector<RealGrid> scale;
    if (auto* coh = std::get_if<Coherent>(&s)) {
      if (!is_harmonic(c)) fail(ErrorKind::unsupported, "the coherent-state oracle needs the harmonic potential");
      J = coherent_joint_trajectory(coh->alpha, c.time, prior, c.tomogram_axes(), c.params);
      oracle = coherent_time_derivative(coh->alpha, c.time, prior, c.tomogram_axes(), c.params);
    } else if (std::holds_alternative<Fock>(s)) {
      if (!is_harmonic(c)) fail(ErrorKind::unsupported, "Fock states are stationary only for the harmonic potential");
      J = exact_joint(c, s);
      oracle = RealGrid(J.grid.axes());
      if (rep == Representation::symplectic) {
        auto t = evolution_terms_symplectic(J, V);
        scale = {t.drift, t.potential};
      } else {
        auto t = evolution_terms_optical(J, V);
        scale = {t.drift, t.potential};
      }
    } else {
      fail(ErrorKind::unsupported, "evolution oracles exist for coherent and Fock states");
    }
    RealGrid rhs = c.printed_form ? evolution_rhs(J, V) : evolution_rhs_general(J, V);
    std::vector<const RealGrid*> sp;
    for (const auto& g : scale) sp.push_back(&g);
    r = residual_report(std::string("evolution-") + to_string(rep) + (c.printed_form ? "-printed" : "-composed"), rhs,
                        oracle, sp);
    r.notes.push_back("t=" + fmt(c.time));
  } else {
    fail(ErrorKind::invalid_argument, "unknown --check '" + c.check + "' (expected evolution|stationary|condition)");
  }
  r.state = to_string(s);
  const double tol = c.tolerance(tol_key);
  auto j = report_json(r, tol);
  j["config"] = c.to_json();
  emit(j);
  return r.relative <= tol ? ok : verification_failure;
}

// -- evolve -----------------------------------------------------------------

int cmd_evolve(const RunConfig& c) {
  const auto s = c.state_spec();
  const auto V = c.potential_spec();
  require(c.steps >= 1, "--steps must be at least 1");
  require(c.snapshot_every >= 1, "--snapshot-every must be at least 1");
  const auto J0 = exact_joint(c, s);
  const auto dir = out_dir(c);
  const auto path = dir / "evolution.csv";
  auto os = open_out(path);
  json meta = grid_header(J0.grid, {{"kind", "evolution"}, {"config", c.to_json()}});
  os << "# " << meta.dump() << "\nt," << csv_columns(J0.grid) << '\n';
  std::size_t frames = 1;
  write_csv_rows(os, J0.grid, "0,");
  auto res = step_evolution(J0, V, c.dt, c.steps, [&](const EvolutionResult& e) {
    if (e.steps % c.snapshot_every == 0 || e.steps == c.steps) {
      write_csv_rows(os, e.joint.grid, fmt(e.time) + ",");
      ++frames;
    }
  });
  close_out(os, path);
  json summary{{"command", "evolve"},   {"state", to_string(s)},        {"representation", to_string(J0.rep)},
               {"steps", res.steps},    {"dt", c.dt},                   {"time", res.time},
               {"frames", frames},      {"mass_drift", res.mass_drift}, {"files", {path.string()}}};
  if (auto* coh = std::get_if<Coherent>(&s); coh && is_harmonic(c)) {
    auto exact = coherent_joint_trajectory(coh->alpha, res.time, J0.prior, c.tomogram_axes(), c.params);
    summary["trajectory_residual"] = residual_report("trajectory", res.joint.grid, exact.grid).relative;
  }
  summary["config"] = c.to_json();
  emit(summary);
  return ok;
}

// -- reconstruct ------------------------------------------------------------

int cmd_reconstruct(const RunConfig& c) {
  const auto s = c.state_spec();
  if (c.representation() != Representation::symplectic)
    fail(ErrorKind::unsupported, "reconstruction is implemented from the symplectic representation");
  const auto W = oracle_wigner(c, s);
  Tomogram T = c.method == "radon" ? symplectic_tomogram(W, c.axis("X"), c.axis("mu"), c.axis("nu"))
                                   : tomogram_exact(s, c.params, Representation::symplectic, c.tomogram_axes());
  require(c.method == "radon" || c.method == "exact", "unknown --method '" + c.method + "'");
  auto J = make_joint(T, c.prior_spec());
  ReconstructionInfo info;
  auto R = wigner_from_symplectic(recover_conditional(J), c.axis("q"), c.axis("p"), &info);
  const auto& qa = R.grid.axis(0);
  const auto& pa = R.grid.axis(1);
  double err = 0;
  for (std::size_t i = qa.count() / 4; i <= 3 * (qa.count() - 1) / 4; ++i)
    for (std::size_t j = pa.count() / 4; j <= 3 * (pa.count() - 1) / 4; ++j)
      err = std::max(err, std::abs(R.grid.at({i, j}) - W.grid.at({i, j})));
  const double tol = c.tolerance("reconstruct");
  const auto dir = out_dir(c);
  const auto path = dir / "wigner.csv";
  auto os = open_out(path);
  write_csv(os, R.grid, {{"kind", "wigner"}, {"config", c.to_json()}});
  close_out(os, path);
  json files{path.string()};
  if (c.svg) {
    const auto sp = dir / "wigner.svg";
    auto ss = open_out(sp);
    write_svg_heatmap(ss, R.grid, to_string(s) + " reconstructed Wigner function");
    close_out(ss, sp);
    files.push_back(sp.string());
  }
  emit({{"command", "reconstruct"},
        {"state", to_string(s)},
        {"prior", to_string(J.prior)},
        {"max_abs_error_central", err},
        {"tolerance", tol},
        {"pass", err <= tol},
        {"normalization_drift", info.normalization_drift},
        {"imag_residue", info.imag_residue},
        {"complete_radius", info.complete_radius},
        {"extent", info.extent},
        {"files", files},
        {"config", c.to_json()}});
  return err <= tol ? ok : verification_failure;
}

// -- verify -----------------------------------------------------------------

json verify_json(const VerifyReport& r) {
  json crit = json::array();
  for (const auto& c : r.criteria) {
    json checks = json::array();
    for (const auto& k : c.checks)
      checks.push_back({{"name", k.name},
                        {"value", k.value},
                        {"tolerance", k.tolerance},
                        {"bound", k.bound == Bound::at_most ? "at_most" : "at_least"},
                        {"pass", k.pass},
                        {"seconds", k.seconds},
                        {"detail", k.detail}});
    crit.push_back({{"id", c.id}, {"title", c.title}, {"pass", c.pass}, {"seconds", c.seconds}, {"checks", checks}});
  }
  json dev = json::array();
  for (const auto& d : r.deviations)
    dev.push_back({{"id", d.id}, {"formula", d.formula}, {"displayed", d.displayed}, {"implemented", d.implemented}});
  return {{"pass", r.pass()}, {"check_count", r.check_count()}, {"seconds", r.seconds}, {"criteria", crit},
          {"deviations", dev}};
}

int cmd_verify(const RunConfig& c) {
  VerifyOptions opt;
  opt.params = c.params;
  opt.seed = c.seed;
  opt.only = c.criteria;
  opt.fock0_energy = c.fock0_energy;
  if (!c.json_output)
    opt.progress = [](const CriterionResult& r) {
      std::fprintf(stderr, "criterion %2d %-38s %s (%.1f s)\n", r.id, r.title.c_str(), r.pass ? "PASS" : "FAIL",
                   r.seconds);
    };
  const auto rep = run_verify(opt);
  json j = verify_json(rep);
  j["config"] = c.to_json();
  if (c.json_output) emit(j);
  else std::cout << format_report(rep);
  if (!c.out.empty() && c.out != RunConfig{}.out) {
    const auto p = out_dir(c) / "verify_report.json";
    auto os = open_out(p);
    os << j.dump(2) << '\n';
    close_out(os, p);
  }
  return rep.pass() ? ok : verification_failure;
}

std::vector<int> parse_criteria(const std::string& text) {
  std::vector<int> out;
  for (auto part : split(text, ',')) {
    if (part.empty()) continue;
    auto dash = part.find('-');
    if (dash != std::string_view::npos && dash > 0) {
      const long a = parse_long(part.substr(0, dash), "criterion"), b = parse_long(part.substr(dash + 1), "criterion");
      require(a <= b, "bad criterion range '" + std::string(part) + "'");
      for (long i = a; i <= b; ++i) out.push_back(static_cast<int>(i));
    } else {
      out.push_back(static_cast<int>(parse_long(part, "criterion")));
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"jpr: joint-probability representation of oscillator states on grids"};
  app.footer(kExitCodes);
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out, state, prior, rep, op, symbol, check, potential, method, criteria;
  double hbar = 1, mass = 1, omega = 1, energy = 0, time = 0, dt = 0, fock0 = 0;
  std::size_t steps = 0, every = 0;
  unsigned seed = 1;
  std::vector<std::string> grids;
  bool json_flag = false, svg = false, printed = false, single = false;

  auto* o_config = app.add_option("--config", config_path, "JSON run configuration; flags override it");
  auto* o_out = app.add_option("--out", out, "output directory (default jpr-out)");
  auto* o_hbar = app.add_option("--hbar", hbar, "reduced Planck constant");
  auto* o_mass = app.add_option("--mass", mass, "oscillator mass");
  auto* o_omega = app.add_option("--omega", omega, "oscillator frequency");
  auto* o_grid = app.add_option("--grid", grids, "axis:min,max,count for X, mu, nu, theta, q or p (repeatable)");
  auto* o_json = app.add_flag("--json", json_flag, "machine-readable verify report");
  auto* o_seed = app.add_option("--seed", seed, "seed for random test functions in verify");

  auto add_state = [&](CLI::App* sub) {
    return std::array{sub->add_option("--state", state, "fock:n=2 | coherent:re=0.5,im=0 | gauss:q=1,p=0,s=2"),
                      sub->add_option("--prior", prior, "p1:mu0=0,nu0=0,xi=1,zeta=1 | p2:[{q,f,phi},...] | p1-default | p2-default"),
                      sub->add_option("--rep", rep, "symplectic | optical")};
  };

  auto* tomo = app.add_subcommand("tomogram", "tabulate a tomogram (and the joint distribution when --prior is given)");
  auto tomo_o = add_state(tomo);
  auto* tomo_m = tomo->add_option("--method", method, "exact | radon");
  auto* tomo_svg = tomo->add_flag("--svg", svg, "also write SVG heatmaps");

  auto* expect = app.add_subcommand("expect", "average of an observable by pairing a dual symbol with the joint distribution");
  auto expect_o = add_state(expect);
  auto* expect_op = expect->add_option("--op", op, "one | q | p | q2 | p2 | qp | pq | n");
  auto* expect_sym = expect->add_option("--symbol", symbol, "regular | singular | alt | monomial:k,l");

  auto* resid = app.add_subcommand("residual", "residual of the evolution or stationary equations on a known solution");
  auto resid_o = add_state(resid);
  auto* resid_check = resid->add_option("--check", check, "evolution | stationary | condition");
  auto* resid_e = resid->add_option("--energy", energy, "energy for the stationary check (Fock default (n+1/2) hbar omega)");
  auto* resid_pf = resid->add_flag("--printed-form", printed, "use the displayed rather than the composed operator");
  auto* resid_sp = resid->add_flag("--single-peak", single, "closed-form optical kinetic term for one-component priors");
  auto* resid_t = resid->add_option("--time", time, "trajectory time for the coherent-state evolution check");
  auto* resid_v = resid->add_option("--potential", potential, "polynomial coefficients, constant first");

  auto* evolve = app.add_subcommand("evolve", "integrate the joint evolution equation in time");
  auto evolve_o = add_state(evolve);
  auto* evolve_dt = evolve->add_option("--dt", dt, "time step");
  auto* evolve_n = evolve->add_option("--steps", steps, "number of steps");
  auto* evolve_k = evolve->add_option("--snapshot-every", every, "write a frame every k steps");
  auto* evolve_v = evolve->add_option("--potential", potential, "polynomial coefficients, constant first");

  auto* recon = app.add_subcommand("reconstruct", "Wigner function from the symplectic joint distribution");
  auto recon_o = add_state(recon);
  auto* recon_m = recon->add_option("--method", method, "exact | radon");
  auto* recon_svg = recon->add_flag("--svg", svg, "also write an SVG heatmap");

  auto* verify = app.add_subcommand("verify", "run the acceptance suite");
  auto* verify_c = verify->add_option("--criteria", criteria, "comma list or ranges of criterion ids, e.g. 1,2,8-9");
  auto* verify_e = verify->add_option("--fock0-energy", fock0, "inject a ground-state energy into the stationary check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return usage_error;
  }

  auto given = [](const CLI::Option* o) { return o && o->count() > 0; };
  auto any = [&](const auto& opts) {
    for (auto* o : opts)
      if (given(o)) return true;
    return false;
  };
  CLI::App* sub = app.get_subcommands().front();
  RunConfig cfg;
  try {
    if (given(o_config)) {
      std::ifstream is(config_path);
      if (!is) throw IoError("cannot read config '" + config_path + "'");
      nlohmann::ordered_json j;
      try {
        j = nlohmann::ordered_json::parse(is);
      } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::invalid_argument, std::string("config is not valid JSON: ") + e.what());
      }
      cfg.merge(j);
    }
    cfg.command = sub->get_name();
    if (given(o_out)) cfg.out = out;
    if (given(o_hbar)) cfg.params.hbar = hbar;
    if (given(o_mass)) cfg.params.mass = mass;
    if (given(o_omega)) cfg.params.omega = omega;
    if (given(o_grid))
      for (const auto& g : grids) {
        auto [name, range] = cli::parse_grid_flag(g);
        cfg.grids[name] = range;
      }
    if (given(o_json)) cfg.json_output = json_flag;
    if (given(o_seed)) cfg.seed = seed;
    for (auto opts : {tomo_o, expect_o, resid_o, evolve_o, recon_o}) {
      if (given(opts[0])) cfg.state = state;
      if (given(opts[1])) cfg.prior = prior;
      if (given(opts[2])) cfg.rep = rep;
    }
    if (given(tomo_m) || given(recon_m)) cfg.method = method;
    if (given(tomo_svg) || given(recon_svg)) cfg.svg = svg;
    if (given(expect_op)) cfg.op = op;
    if (given(expect_sym)) cfg.symbol = symbol;
    if (given(resid_check)) cfg.check = check;
    if (given(resid_e)) cfg.energy = energy;
    if (given(resid_pf)) cfg.printed_form = printed;
    if (given(resid_sp)) cfg.single_peak = single;
    if (given(resid_t)) cfg.time = time;
    if (given(resid_v) || given(evolve_v)) {
      auto v = parse_potential(potential);
      cfg.potential = v.coefficients;
    }
    if (given(evolve_dt)) cfg.dt = dt;
    if (given(evolve_n)) cfg.steps = steps;
    if (given(evolve_k)) cfg.snapshot_every = every;
    if (given(verify_c)) cfg.criteria = parse_criteria(criteria);
    if (given(verify_e)) cfg.fock0_energy = fock0;
    // a prior implies its representation unless --rep says otherwise
    if (!cfg.prior.empty() && !any(std::array{tomo_o[2], expect_o[2], resid_o[2], evolve_o[2], recon_o[2]}))
      cfg.rep = to_string(representation_of(parse_prior(cfg.prior)));
    cfg.resolve();

    if (cfg.command == "tomogram") return cmd_tomogram(cfg);
    if (cfg.command == "expect") return cmd_expect(cfg);
    if (cfg.command == "residual") return cmd_residual(cfg);
    if (cfg.command == "evolve") return cmd_evolve(cfg);
    if (cfg.command == "reconstruct") return cmd_reconstruct(cfg);
    return cmd_verify(cfg);
  } catch (const IoError& e) {
    std::cerr << "jpr: " << e.what() << '\n';
    return io_failure;
  } catch (const Error& e) {
    std::cerr << "jpr: " << e.what() << '\n';
    return e.kind() == ErrorKind::numeric ? numeric_failure : usage_error;
  }
}
