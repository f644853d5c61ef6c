#include "mixvol/app.hpp"

#include <fstream>
#include <sstream>

namespace mixvol::app {

double RunConfig::tol(const std::string& name) const {
  if (auto it = tolerances.find(name); it != tolerances.end()) return it->second;
  static const std::map<std::string, double> defaults{{"z", 3.0}, {"rel", 1e-6}, {"exact", 1e-10}, {"fit", 1e-8}, {"dmatrix_condition", 1e6}};
  if (auto it = defaults.find(name); it != defaults.end()) return it->second;
  throw InputError("unknown tolerance '" + name + "'");
}

Polytope polytope_from_json(const json& j) {
  if (!j.is_object() || !j.contains("vertices") || !j["vertices"].is_array())
    throw InputError("polytope JSON: expected an object with a \"vertices\" array");
  std::vector<Vec> pts;
  int d = -1;
  for (const auto& row : j["vertices"]) {
    if (!row.is_array() || row.empty()) throw InputError("polytope JSON: each vertex must be a nonempty array");
    if (d < 0) d = int(row.size());
    if (int(row.size()) != d) throw InputError("polytope JSON: vertices of different lengths");
    Vec v(d);
    for (int i = 0; i < d; ++i) {
      if (!row[size_t(i)].is_number()) throw InputError("polytope JSON: coordinates must be numbers");
      v[i] = row[size_t(i)].get<double>();
    }
    pts.push_back(v);
  }
  if (pts.empty()) throw InputError("polytope JSON: no vertices");
  if (j.contains("dim") && j["dim"].get<int>() != d) throw InputError("polytope JSON: \"dim\" does not match vertices");
  HullOptions o;
  o.allow_degenerate = true;
  return Polytope::hull(pts, o, j.value("name", std::string()));
}

json polytope_to_json(const Polytope& p) {
  json v = json::array();
  for (const auto& x : p.vertices()) v.push_back(to_json(x));
  return {{"schema", kSchema}, {"name", p.name()}, {"dim", p.ambient_dim()}, {"vertices", v}};
}

std::vector<Polytope> read_polytopes(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw InputError(path + ": malformed JSON: " + e.what());
  }
  std::vector<Polytope> out;
  const json* list = &j;
  if (j.is_object() && j.contains("polytopes")) list = &j["polytopes"];
  try {
    if (list->is_array())
      for (const auto& x : *list) out.push_back(polytope_from_json(x));
    else
      out.push_back(polytope_from_json(*list));
  } catch (const json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
  return out;
}

namespace {

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  for (std::string t; is >> t;) out.push_back(t);
  return out;
}

std::uint64_t parse_u64(const std::string& s, const std::string& what) {
  try {
    size_t pos = 0;
    const auto v = std::stoull(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InputError("expected a nonnegative integer for " + what + ", got '" + s + "'");
  }
}

Polytope base_body(const std::vector<std::string>& t, size_t at, int dim) {
  const std::string name = at < t.size() ? t[at] : "cube";
  Polytope p;
  if (name == "cube" || name == "square")
    p = unit_cube(dim);
  else if (name == "simplex" || name == "triangle")
    p = unit_simplex(dim);
  else if (name == "diamond" || name == "cross")
    p = cross_polytope(dim);
  else if (name == "segment") {
    const int axis = at + 1 < t.size() ? int(parse_u64(t[at + 1], "segment axis")) : 0;
    if (axis >= dim) throw InputError("segment axis out of range");
    p = unit_segment(dim, axis);
  } else
    throw InputError("unknown generator '" + name + "'");
  p.set_name(name);
  return p;
}

}  // namespace

Polytope generate(const std::string& spec, int dim) {
  if (dim < 1) throw InputError("--dim must be positive");
  std::string s = spec;
  for (char& c : s)
    if (c == ':') c = ' ';
  const auto t = split_ws(s);
  if (t.empty()) throw InputError("empty generator");
  if (t[0] == "random-rotation") {
    if (t.size() < 2) throw InputError("random-rotation needs a seed");
    const std::uint64_t seed = parse_u64(t[1], "random-rotation");
    Polytope b = base_body(t, 2, dim);
    Rng rng(seed);
    Polytope p = b.transformed(random_rotation(rng, dim));
    p.set_name("random-rotation " + t[1] + " " + b.name());
    return p;
  }
  return base_body(t, 0, dim);
}

std::vector<Polytope> load_bodies(const RunConfig& cfg) {
  std::vector<Polytope> out;
  for (const auto& f : cfg.inputs)
    for (auto& p : read_polytopes(f)) out.push_back(std::move(p));
  for (const auto& g : cfg.generators) out.push_back(generate(g, cfg.dim));
  for (size_t i = 1; i < out.size(); ++i)
    if (out[i].ambient_dim() != out[0].ambient_dim()) throw InputError("bodies live in different dimensions");
  return out;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  for (std::string t; std::getline(ss, t, ',');) {
    try {
      size_t pos = 0;
      out.push_back(std::stoi(t, &pos));
      if (pos != t.size()) throw std::invalid_argument(t);
    } catch (const std::exception&) {
      throw InputError("bad integer list '" + s + "'");
    }
  }
  if (out.empty()) throw InputError("empty integer list");
  return out;
}

std::vector<Vec> parse_direction_tuple(const std::string& s) {
  std::vector<Vec> out;
  std::stringstream ss(s);
  for (std::string v; std::getline(ss, v, ';');) {
    std::vector<double> xs;
    std::stringstream vs(v);
    for (std::string t; std::getline(vs, t, ',');) {
      try {
        size_t pos = 0;
        xs.push_back(std::stod(t, &pos));
        if (pos != t.size()) throw std::invalid_argument(t);
      } catch (const std::exception&) {
        throw InputError("bad direction '" + v + "'");
      }
    }
    Vec u = Eigen::Map<Vec>(xs.data(), Eigen::Index(xs.size()));
    if (u.size() == 0 || !(u.norm() > 0)) throw InputError("direction must be a nonzero vector");
    if (!out.empty() && u.size() != out[0].size()) throw InputError("directions of different lengths");
    out.push_back(u.normalized());
  }
  if (out.size() < 2) throw InputError("a direction tuple needs at least two vectors");
  return out;
}

json to_json(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json to_json(const Mat& m) {
  json a = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) a.push_back(to_json(Vec(m.row(r).transpose())));
  return a;
}

json to_json(const MCEstimate& e) {
  return {{"value", e.value}, {"std_error", e.std_error}, {"samples", e.samples}, {"seed", e.seed}};
}

json to_json(const TranslativeTable& t) {
  json entries = json::array();
  for (const auto& [r, v] : t.values)
    entries.push_back({{"degrees", r}, {"value", v}, {"std_error", t.errors.at(r)}});
  return {{"d", t.d},         {"k", t.k},         {"j", t.j},
          {"route", t.route}, {"entries", entries}, {"total", t.total},
          {"total_error", t.total_error}, {"condition", t.condition}, {"seed", t.seed},
          {"samples", t.samples}};
}

json to_json(const DMatrix& m) {
  return {{"d", m.d},
          {"j", m.j},
          {"size", m.size()},
          {"entries", to_json(m.entries)},
          {"sigma", to_json(m.sigma)},
          {"a", to_json(m.a)},
          {"a_sigma", to_json(m.a_sigma)},
          {"exact", m.exact},
          {"seed", m.seed},
          {"samples", m.samples}};
}

int exit_code(const std::exception& e) {
  if (dynamic_cast<const InputError*>(&e)) return kInputError;
  if (dynamic_cast<const DivergenceError*>(&e)) return kDivergence;
  if (dynamic_cast<const EstimationError*>(&e)) return kEstimation;
  if (dynamic_cast<const json::exception*>(&e)) return kInputError;
  return kCheckFailed;
}

}  // namespace mixvol::app
