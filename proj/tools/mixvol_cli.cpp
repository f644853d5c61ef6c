#include "mixvol/app.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

using namespace mixvol;
using namespace mixvol::app;

namespace {

void add_bodies(CLI::App* c, RunConfig& cfg) {
  c->add_option("-i,--input", cfg.inputs, "polytope JSON file (repeatable)");
  c->add_option("--gen", cfg.generators,
                "generated body: cube|simplex|diamond|square|segment [AXIS]|\"random-rotation SEED [BASE]\" (repeatable)");
  c->add_option("--dim", cfg.dim, "dimension of generated bodies")->capture_default_str();
}

void add_mc(CLI::App* c, RunConfig& cfg) {
  c->add_option("--seed", cfg.seed, "random seed (required for Monte Carlo routes)");
  c->add_option("--samples", cfg.samples, "Monte Carlo sample count")->capture_default_str();
}

void add_degrees(CLI::App* c, std::string& deg) { c->add_option("--degrees", deg, "comma-separated degrees"); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mixed volumes and translative functionals of polytopes"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand
  RunConfig cfg;
  std::string degrees;
  std::vector<std::string> tols;
  app.add_option("--threads", cfg.threads, "worker threads (0: all cores)");
  app.add_option("-o,--output", cfg.output, "write the report here instead of stdout");
  app.add_option("--tol", tols, "tolerance override NAME=VALUE (z, rel, exact, fit, dmatrix_condition)");

  auto* mv = app.add_subcommand("mixed-volume", "mixed volume by one route, checked against the oracle");
  add_bodies(mv, cfg);
  add_mc(mv, cfg);
  add_degrees(mv, degrees);
  mv->add_option("--method", cfg.method, "oracle|schneider|angle|epsilon|flag")->capture_default_str();
  mv->add_option("--eps", cfg.epsilon, "cutoff for the epsilon and flag routes");

  auto* ke = app.add_subcommand("kernel-eval", "evaluate F_n or G_r; CSV rows (u, value, error)");
  ke->add_option("--u", cfg.tuples, "direction tuple \"x,y;x,y\" (repeatable)");
  ke->add_option("--random", cfg.random_tuples, "also evaluate N random tuples (needs --seed, --degrees)");
  ke->add_option("--dim", cfg.dim, "dimension for --random")->capture_default_str();
  ke->add_option("--mode", cfg.mode, "n (F_n) or r (G_r)")->capture_default_str();
  ke->add_option("--eps", cfg.epsilon, "cutoff");
  ke->add_option("--seed", cfg.seed, "random seed");
  add_degrees(ke, degrees);

  auto* fc = app.add_subcommand("flag-check", "flag-measure route against the oracle, or the multiplier identities");
  add_bodies(fc, cfg);
  add_mc(fc, cfg);
  add_degrees(fc, degrees);
  fc->add_option("--mode", cfg.mode, "n (mixed volume) or r (translative functional)")->capture_default_str();
  fc->add_option("--eps", cfg.epsilon, "cutoff");
  fc->add_option("--lemma", cfg.lemma, "without bodies: verify the multiplier identity 3 (F_n) or 5 (G_r) in --dim");
  fc->add_option("--trials", cfg.trials, "random tuples for --lemma")->capture_default_str();
  fc->add_option("--dmatrix-cache", cfg.dmatrix_cache, "JSON cache of estimated D-matrices");
  fc->add_flag("--estimate-dmatrix", cfg.estimate_dmatrix, "estimate D-matrices even when a closed form exists");
  fc->add_option("--dmatrix-budget", cfg.dmatrix_budget, "samples per D-matrix estimate")->capture_default_str();

  auto* tr = app.add_subcommand("translative", "translative integral or its homogeneous decomposition");
  add_bodies(tr, cfg);
  add_mc(tr, cfg);
  tr->add_option("--j", cfg.j, "intrinsic volume index of the intersection")->capture_default_str();
  tr->add_flag("--decompose", cfg.decompose, "fit the table of V_r");

  auto* ve = app.add_subcommand("verify", "run the acceptance suite");
  ve->add_option("--suite", cfg.suite, "quick|full")->capture_default_str();
  ve->add_option("--seed", cfg.seed, "random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kInputError;
  }

  try {
    cfg.command = app.get_subcommands().front()->get_name();
    if (!degrees.empty()) cfg.degrees = parse_int_list(degrees);
    for (const auto& t : tols) {
      const auto eq = t.find('=');
      if (eq == std::string::npos) throw InputError("--tol expects NAME=VALUE");
      const std::string name = t.substr(0, eq);
      cfg.tol(name);  // rejects unknown names
      try {
        cfg.tolerances[name] = std::stod(t.substr(eq + 1));
      } catch (const std::exception&) {
        throw InputError("bad --tol value '" + t + "'");
      }
    }
    const RunResult r = run(cfg);
    if (cfg.output.empty()) {
      std::cout << r.text;
    } else {
      std::ofstream out(cfg.output);
      if (!out) throw InputError("cannot write " + cfg.output);
      out << r.text;
    }
    return r.pass ? kOk : kCheckFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e);
  }
}
