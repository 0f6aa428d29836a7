// Runs every acceptance criterion and prints one line per criterion.
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>

#include "jpr/verify.hpp"

int main(int argc, char** argv) {
  jpr::VerifyOptions opt;
  for (int i = 1; i < argc; ++i) opt.only.push_back(std::atoi(argv[i]));
  opt.progress = [](const jpr::CriterionResult& c) {
    std::printf("criterion %2d %-38s %s  (%.1f s)\n", c.id, c.title.c_str(), c.pass ? "PASS" : "FAIL", c.seconds);
    std::fflush(stdout);
  };
  auto report = jpr::run_verify(opt);
  std::cout << "\n" << jpr::format_report(report);
  return report.pass() ? 0 : 1;
}
