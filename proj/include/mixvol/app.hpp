#pragma once

#include "mixvol/flag_calculus.hpp"
#include "mixvol/mixed_volume.hpp"
#include "mixvol/translative.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>

namespace mixvol::app {

using json = nlohmann::ordered_json;

inline constexpr int kSchema = 1;

// Exit codes of the command-line tool.
enum Exit : int { kOk = 0, kCheckFailed = 1, kInputError = 2, kDivergence = 3, kEstimation = 4 };

struct RunConfig {
  std::string command;                  // mixed-volume | kernel-eval | flag-check | translative | verify
  std::vector<std::string> inputs;      // polytope JSON files
  std::vector<std::string> generators;  // --gen specs, appended after the files
  int dim = 2;                          // for generators
  std::string method = "oracle";        // mixed-volume route
  std::string mode = "n";               // n: F_n / mixed volumes, r: G_r / translative functionals
  std::vector<int> degrees;
  double epsilon = 0.0;
  std::optional<std::uint64_t> seed;
  std::uint64_t samples = 100000;
  int j = 0;
  bool decompose = false;
  std::string dmatrix_cache;
  bool estimate_dmatrix = false;
  std::uint64_t dmatrix_budget = 200000;
  int lemma = 0;  // flag-check without bodies: 3 or 5
  int trials = 20;
  std::vector<std::string> tuples;  // kernel-eval inputs "x,y;x,y"
  int random_tuples = 0;
  std::map<std::string, double> tolerances;  // z (3), rel (1e-6), exact (1e-10), fit (1e-8), dmatrix_condition (1e6)
  int threads = 0;                           // 0: default
  std::string suite = "quick";
  std::string output;  // file; empty means stdout

  double tol(const std::string& name) const;
};

struct RunResult {
  std::string text;  // JSON report, or CSV for kernel-eval
  bool pass = true;
};

// Dispatches one command. Throws the library errors; see exit_code().
RunResult run(const RunConfig& cfg);
int exit_code(const std::exception& e);

// ---- I/O

Polytope polytope_from_json(const json& j);
json polytope_to_json(const Polytope& p);
// A file holds one polytope object, an array of them, or {"polytopes": [...]}.
std::vector<Polytope> read_polytopes(const std::string& path);
// "cube", "simplex", "diamond", "square", "segment [AXIS]", "random-rotation SEED [BASE]".
Polytope generate(const std::string& spec, int dim);
std::vector<Polytope> load_bodies(const RunConfig& cfg);

std::vector<int> parse_int_list(const std::string& s);
// "1,0;0,1" -> two vectors; each is normalized.
std::vector<Vec> parse_direction_tuple(const std::string& s);

json to_json(const Vec& v);
json to_json(const Mat& m);  // row-major nested arrays
json to_json(const MCEstimate& e);
json to_json(const TranslativeTable& t);
json to_json(const DMatrix& m);

// ---- acceptance

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;  // deterministic for a fixed seed
};

struct AcceptanceOptions {
  std::uint64_t seed = 7;
  std::string suite = "full";  // full: the stated sample sizes; quick: fewer rotation seeds and 3D samples
  std::vector<int> only;       // empty: all criteria
};

// Runs criteria 1–11. `on_result` (if set) is called as each one finishes.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt,
                                            const std::function<void(const CriterionResult&)>& on_result = {});

}  // namespace mixvol::app
