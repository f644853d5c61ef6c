// One PASS/FAIL line per acceptance criterion; exit status 0 iff all pass.
#include "mixvol/app.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  mixvol::app::AcceptanceOptions opt;
  app.add_option("--seed", opt.seed)->capture_default_str();
  app.add_option("--suite", opt.suite)->capture_default_str();
  app.add_option("--only", opt.only, "criterion ids")->delimiter(',');
  CLI11_PARSE(app, argc, argv);

  auto t0 = std::chrono::steady_clock::now();
  bool all = true;
  const auto results = mixvol::app::run_acceptance(opt, [&](const mixvol::app::CriterionResult& r) {
    const auto t1 = std::chrono::steady_clock::now();
    const double sec = std::chrono::duration<double>(t1 - t0).count();
    t0 = t1;
    std::printf("[%s] %2d %s: %s (%.1fs)\n", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(), r.detail.c_str(), sec);
    std::fflush(stdout);
    all = all && r.pass;
  });
  std::printf("%s: %zu criteria, suite %s, seed %llu\n", all ? "ALL PASS" : "SOME FAILED", results.size(),
              opt.suite.c_str(), (unsigned long long)opt.seed);
  return all ? 0 : 1;
}
