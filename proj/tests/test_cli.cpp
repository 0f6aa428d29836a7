#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "run_config.hpp"

using namespace jpr;
using jpr::cli::RunConfig;

namespace {

struct Run {
  int code = -1;
  std::string out;
  json doc() const { return json::parse(out); }
};

Run run(const std::string& args) {
  const std::string cmd = std::string(JPR_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

CsvGrid read_grid(const std::string& path) {
  std::ifstream is(path);
  return read_csv(is);
}

}  // namespace

TEST(RunConfig, JsonRoundTrip) {
  RunConfig c;
  c.command = "residual";
  c.state = "fock:n=2";
  c.prior = "p1:mu0=0.2,nu0=0,xi=1,zeta=1";
  c.grids["X"] = {-6, 6, 121};
  c.energy = 2.5;
  c.criteria = {1, 8};
  c.tolerances["stationary"] = 1e-2;
  c.resolve();
  auto back = RunConfig::from_json(json::parse(c.to_json().dump()));
  EXPECT_EQ(back, c);
  EXPECT_EQ(back.to_json().dump(), c.to_json().dump());
  EXPECT_EQ(back.axis("X").count(), 121u);
}

TEST(RunConfig, RejectsUnknownKeysAndBadGrids) {
  EXPECT_THROW(RunConfig::from_json(json{{"stat", "fock:n=1"}}), Error);
  EXPECT_THROW(RunConfig::from_json(json{{"tolerances", {{"nope", 1}}}}), Error);
  EXPECT_THROW(RunConfig::from_json(json{{"steps", "many"}}), Error);
  EXPECT_THROW(cli::parse_grid_flag("X:-8,8"), Error);
  EXPECT_EQ(cli::parse_grid_flag("x:-8,8,161").first, "X");
  RunConfig c;
  c.prior = "p2-default";
  EXPECT_THROW(c.prior_spec(), Error);
}

TEST(Cli, HelpDocumentsExitCodes) {
  auto r = run("--help");
  EXPECT_EQ(r.code, 0);
  for (const char* s : {"0  success", "1  verification", "2  usage", "3  numeric", "4  I/O"})
    EXPECT_NE(r.out.find(s), std::string::npos) << s;
}

TEST(Cli, ErrorPathsHaveDistinctCodes) {
  EXPECT_EQ(run("tomogram --out cli-missing").code, 2);
  EXPECT_EQ(run("tomogram --state fock:n=x").code, 2);
  EXPECT_EQ(run("expect --op q --symbol singular --state fock:n=0 --rep optical").code, 2);
  EXPECT_EQ(run("expect --op q --state fock:n=0 --bogus").code, 2);
  EXPECT_EQ(run("tomogram --state fock:n=0 --grid X:-4,4,41 --out /proc/jpr-denied").code, 4);
  EXPECT_EQ(run("tomogram --state fock:n=0 --config does-not-exist.json").code, 4);
  EXPECT_EQ(run("evolve --state coherent:re=0.7,im=0 --rep optical --dt 1.0 --steps 5 --out cli-blowup").code, 3);
  EXPECT_EQ(run("residual --state fock:n=1 --energy 1.7").code, 1);
}

TEST(Cli, ExpectExamples) {
  auto n = run("expect --op n --symbol regular --state coherent:re=1,im=0");
  ASSERT_EQ(n.code, 0);
  EXPECT_NEAR(n.doc()["re"].get<double>(), 1.0, 2e-2);
  EXPECT_NEAR(n.doc()["im"].get<double>(), 0.0, 2e-2);
  auto one = run("expect --op one --symbol singular --state fock:n=2");
  ASSERT_EQ(one.code, 0);
  EXPECT_NEAR(one.doc()["re"].get<double>(), 1.0, 1e-2);
  auto qp = run("expect --op qp --symbol singular --state fock:n=0");
  ASSERT_EQ(qp.code, 0);
  EXPECT_NEAR(qp.doc()["im"].get<double>(), 0.5, 2e-2);
  auto mono = run("expect --symbol monomial:2,0 --state gauss:q=1,p=0,s=2");
  ASSERT_EQ(mono.code, 0);
  EXPECT_LT(mono.doc()["relative_error"].get<double>(), 2e-2);
  auto opt = run("expect --op p2 --state fock:n=1 --prior p2-default");
  ASSERT_EQ(opt.code, 0);
  EXPECT_EQ(opt.doc()["representation"], "optical");
  EXPECT_NEAR(opt.doc()["re"].get<double>(), 1.5, 3e-2);
}

TEST(Cli, OpticalTomogramAndJoint) {
  auto r = run("tomogram --state fock:n=0 --rep optical --prior p2-default --svg --out cli-opt");
  ASSERT_EQ(r.code, 0);
  EXPECT_LE(r.doc()["max_slice_drift"].get<double>(), 1e-3);
  auto T = read_grid("cli-opt/tomogram.csv");
  EXPECT_EQ(T.real.size(), 161u * 181u);
  auto J = read_grid("cli-opt/joint.csv");
  EXPECT_EQ(J.real.size(), 161u * 181u);
  EXPECT_NEAR(J.header["integral"].get<double>(), 1.0, 1e-3);
  EXPECT_EQ(J.header["config"]["state"], "fock:n=0");
  EXPECT_NE(slurp("cli-opt/joint.svg").find("</svg>"), std::string::npos);
}

TEST(Cli, SymplecticCoherentPeak) {
  auto r = run("tomogram --state coherent:re=0.70710678,im=0 --rep symplectic --grid mu:-2,2,9 --grid nu:-2,2,9 "
               "--out cli-sym");
  ASSERT_EQ(r.code, 0);
  const auto g = read_grid("cli-sym/tomogram.csv").real;
  const auto im = g.axis(1).nearest(1.0), in = g.axis(2).nearest(0.0);
  std::size_t best = 0;
  for (std::size_t x = 0; x < g.axis(0).count(); ++x)
    if (g.at({x, im, in}) > g.at({best, im, in})) best = x;
  EXPECT_NEAR(g.axis(0)[best], 1.0, g.axis(0).spacing());
}

TEST(Cli, ResidualChecks) {
  auto s = run("residual --check stationary --state fock:n=2");
  ASSERT_EQ(s.code, 0);
  EXPECT_LT(s.doc()["relative"].get<double>(), 3e-2);
  auto o = run("residual --check stationary --rep optical --state fock:n=1 --prior p2:[{1,1.4,0.7}] --single-peak");
  ASSERT_EQ(o.code, 0);
  auto c = run("residual --check condition --state coherent:re=0.70710678,im=0");
  EXPECT_EQ(c.code, 1);
  EXPECT_GE(c.doc()["relative"].get<double>(), 0.1);
  auto e = run("residual --check evolution --state coherent:re=0.5,im=0.3 --time 0.3 --printed-form");
  ASSERT_EQ(e.code, 0);
  EXPECT_EQ(e.doc()["equation"], "evolution-symplectic-printed");
  EXPECT_EQ(run("residual --check stationary --state coherent:re=1,im=0").code, 2);
}

TEST(Cli, EvolveWritesFrames) {
  auto r = run("evolve --state coherent:re=0.70710678,im=0 --rep optical --dt 0.02 --steps 10 --snapshot-every 5 "
               "--out cli-evolve");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.doc()["frames"].get<int>(), 3);
  EXPECT_LT(r.doc()["trajectory_residual"].get<double>(), 1e-2);
  std::ifstream is("cli-evolve/evolution.csv");
  std::string line;
  std::size_t rows = 0;
  std::getline(is, line);
  std::getline(is, line);
  EXPECT_EQ(line, "t,X,theta,value");
  while (std::getline(is, line)) ++rows;
  EXPECT_EQ(rows, 3u * 161u * 181u);
}

TEST(Cli, Reconstruct) {
  auto r = run("reconstruct --state coherent:re=0.70710678,im=0 --out cli-recon");
  ASSERT_EQ(r.code, 0);
  EXPECT_LE(r.doc()["max_abs_error_central"].get<double>(), 5e-3);
  EXPECT_EQ(read_grid("cli-recon/wigner.csv").real.size(), 161u * 161u);
  EXPECT_EQ(run("reconstruct --state fock:n=0 --rep optical --out cli-recon").code, 2);
}

TEST(Cli, DeterministicOutputAndConfigReplay) {
  const std::string args = "tomogram --state fock:n=1 --rep optical --prior p2-default --grid theta:0,3.141592653589793,61";
  auto a = run(args + " --out cli-det");
  auto b = run(args + " --out cli-det");
  ASSERT_EQ(a.code, 0);
  const auto csv = slurp("cli-det/joint.csv");
  run(args + " --out cli-det");
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(slurp("cli-det/joint.csv"), csv);
  std::ofstream("cli-det.json") << a.doc()["config"].dump();
  auto c = run("tomogram --config cli-det.json");
  ASSERT_EQ(c.code, 0);
  EXPECT_EQ(c.out, a.out);
  EXPECT_EQ(slurp("cli-det/joint.csv"), csv);
}

TEST(Cli, FlagsOverrideConfig) {
  std::ofstream("cli-over.json") << json{{"state", "fock:n=1"}, {"op", "q2"}, {"params", {{"hbar", 2.0}}}, {"grids", {{"X", {-12, 12, 241}}}}}.dump();
  auto r = run("expect --config cli-over.json --state fock:n=2");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.doc()["config"]["state"], "fock:n=2");
  EXPECT_EQ(r.doc()["config"]["params"]["hbar"].get<double>(), 2.0);
  EXPECT_NEAR(r.doc()["re"].get<double>(), 2.5 * 2.0, 2e-2 * 5);
}

TEST(Cli, VerifyJsonReport) {
  auto r = run("verify --criteria 3,11 --json");
  ASSERT_EQ(r.code, 0);
  auto d = r.doc();
  EXPECT_TRUE(d["pass"].get<bool>());
  ASSERT_EQ(d["criteria"].size(), 2u);
  for (const auto& c : d["criteria"]) {
    for (const char* k : {"id", "title", "pass", "seconds", "checks"}) EXPECT_TRUE(c.contains(k)) << k;
    for (const auto& k : c["checks"])
      for (const char* f : {"name", "value", "tolerance", "bound", "pass", "seconds", "detail"}) EXPECT_TRUE(k.contains(f));
  }
  std::vector<std::string> ids;
  for (const auto& v : d["deviations"]) ids.push_back(v["id"]);
  EXPECT_NE(std::find(ids.begin(), ids.end(), "identity-exponent"), ids.end());
  EXPECT_NE(std::find(ids.begin(), ids.end(), "stationary-nu-sign"), ids.end());
  EXPECT_EQ(run("verify --criteria 12").code, 2);
}

TEST(Cli, VerifyDetectsWrongGroundEnergy) {
  auto r = run("verify --criteria 8 --fock0-energy 0.7 --json");
  EXPECT_EQ(r.code, 1);
  const auto d = r.doc();
  bool failed_stationary = false;
  for (const auto& k : d["criteria"][0]["checks"])
    if (k["name"] == "symplectic stationary residual, Fock(0..2), E = n + 1/2" && !k["pass"].get<bool>())
      failed_stationary = true;
  EXPECT_TRUE(failed_stationary);
}
