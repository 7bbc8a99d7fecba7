#include "config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace qpcli {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : obj.items())
    if (!allowed.count(key)) throw ConfigError(where + ": unknown field '" + key + "'");
}

const json& require(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) throw ConfigError(where + ": missing field '" + key + "'");
  return obj.at(key);
}

template <class T>
T read(const json& obj, const std::string& key, const std::string& where) {
  const json& v = require(obj, key, where);
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "." + key + ": wrong type");
  }
}

template <class T>
T read_or(const json& obj, const std::string& key, const std::string& where, T fallback) {
  return obj.contains(key) ? read<T>(obj, key, where) : fallback;
}

double positive(double v, const std::string& name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(name + ": must be positive");
  return v;
}

int at_least(int v, int lo, const std::string& name) {
  if (v < lo) throw ConfigError(name + ": must be >= " + std::to_string(lo));
  return v;
}

qps::Index read_index(const json& v, const std::string& name) {
  try {
    if (v.is_number_integer()) return {v.get<int>()};
    return v.get<qps::Index>();
  } catch (const json::exception&) {
    throw ConfigError(name + ": expected an integer or integer array");
  }
}

std::vector<double> read_energies(const json& g, const std::string& where) {
  std::vector<double> out;
  if (g.is_array()) {
    try {
      out = g.get<std::vector<double>>();
    } catch (const json::exception&) {
      throw ConfigError(where + ": expected numbers");
    }
  } else {
    check_keys(g, {"lo", "hi", "points"}, where);
    double lo = read<double>(g, "lo", where), hi = read<double>(g, "hi", where);
    int n = at_least(read<int>(g, "points", where), 1, where + ".points");
    if (n == 1) {
      out.push_back(lo);
    } else {
      if (!(hi > lo)) throw ConfigError(where + ": hi must exceed lo");
      for (int i = 0; i < n; ++i) out.push_back(lo + (hi - lo) * i / (n - 1));
    }
  }
  for (std::size_t i = 1; i < out.size(); ++i)
    if (!(out[i] > out[i - 1])) throw ConfigError(where + ": energies must be strictly increasing");
  return out;
}

std::vector<double> read_positive_list(const json& obj, const std::string& key,
                                       const std::string& where, std::vector<double> fallback) {
  auto v = read_or<std::vector<double>>(obj, key, where, std::move(fallback));
  for (double x : v) positive(x, where + "." + key);
  return v;
}

void parse_potential(const json& p, RunConfig& cfg) {
  const std::string w = "potential";
  auto& spec = cfg.potential;
  spec.family = read<std::string>(p, "family", w);
  if (spec.family == "free") {
    check_keys(p, {"family"}, w);
  } else if (spec.family == "amo") {
    check_keys(p, {"family", "lambda"}, w);
    spec.lambda = read<double>(p, "lambda", w);
  } else if (spec.family == "ck_family") {
    check_keys(p, {"family", "eps", "k", "modes"}, w);
    spec.eps = read<double>(p, "eps", w);
    spec.k = at_least(read<int>(p, "k", w), 0, "potential.k");
    spec.modes = at_least(read_or<int>(p, "modes", w, 8), 1, "potential.modes");
  } else if (spec.family == "explicit") {
    check_keys(p, {"family", "series"}, w);
    try {
      spec.series = qps::scalar_series_from_json(require(p, "series", w).dump());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("potential.series: ") + e.what());
    }
  } else {
    throw ConfigError("potential.family: unknown family '" + spec.family + "'");
  }
}

void parse_frequency(const json& f, RunConfig& cfg) {
  const std::string w = "frequency";
  check_keys(f, {"alpha", "golden", "gamma", "tau", "check_cutoff"}, w);
  auto& spec = cfg.frequency;
  bool golden = read_or<bool>(f, "golden", w, false);
  if (golden == f.contains("alpha"))
    throw ConfigError("frequency: give exactly one of 'alpha' and 'golden': true");
  spec.alpha = golden ? std::vector<double>{(std::sqrt(5.0) - 1.0) / 2.0}
                      : read<std::vector<double>>(f, "alpha", w);
  if (spec.alpha.empty()) throw ConfigError("frequency.alpha: empty");
  spec.gamma = positive(read_or<double>(f, "gamma", w, 0.2), "frequency.gamma");
  spec.tau = read_or<double>(f, "tau", w, 1.5);
  spec.check_cutoff = at_least(read_or<int>(f, "check_cutoff", w, 100), 1, "frequency.check_cutoff");
}

void parse_numerics(const json& n, RunConfig& cfg) {
  const std::string w = "numerics";
  check_keys(n, {"L", "phases", "energy_grid", "resolution", "min_length", "label_M_max",
                 "label_tol", "refine_edges", "edge_tol", "rotation_iters", "homog_eps",
                 "homog_samples", "holder_eps", "k"},
             w);
  auto& num = cfg.numerics;
  num.L = at_least(read_or<int>(n, "L", w, num.L), 1, "numerics.L");
  num.phases = at_least(read_or<int>(n, "phases", w, num.phases), 1, "numerics.phases");
  if (n.contains("energy_grid")) num.energies = read_energies(n.at("energy_grid"), "numerics.energy_grid");
  num.resolution = positive(read_or<double>(n, "resolution", w, num.resolution), "numerics.resolution");
  if (n.contains("min_length"))
    num.min_length = positive(read<double>(n, "min_length", w), "numerics.min_length");
  num.label_M_max = at_least(read_or<int>(n, "label_M_max", w, num.label_M_max), 1, "numerics.label_M_max");
  num.label_tol = positive(read_or<double>(n, "label_tol", w, num.label_tol), "numerics.label_tol");
  num.refine_edges = read_or<bool>(n, "refine_edges", w, num.refine_edges);
  num.edge_tol = positive(read_or<double>(n, "edge_tol", w, num.edge_tol), "numerics.edge_tol");
  num.rotation_iters = read_or<long>(n, "rotation_iters", w, num.rotation_iters);
  if (num.rotation_iters < 1000) throw ConfigError("numerics.rotation_iters: must be >= 1000");
  num.homog_eps = read_positive_list(n, "homog_eps", w, num.homog_eps);
  num.homog_samples = at_least(read_or<int>(n, "homog_samples", w, num.homog_samples), 1, "numerics.homog_samples");
  num.holder_eps = read_positive_list(n, "holder_eps", w, {});
  num.k = at_least(read_or<int>(n, "k", w, num.k), 0, "numerics.k");
}

void parse_kam(const json& k, RunConfig& cfg) {
  const std::string w = "kam";
  check_keys(k, {"E", "constant", "rotation", "perturbation", "start_guard", "step_guard",
                 "stop_tol", "max_steps", "grid_points", "divisor_floor", "schedule_M"},
             w);
  auto& spec = cfg.kam;
  int forms = k.contains("E") + k.contains("constant") + k.contains("rotation");
  if (forms != 1) throw ConfigError("kam: give exactly one of 'E', 'constant', 'rotation'");
  if (k.contains("E")) spec.energy = read<double>(k, "E", w);
  if (k.contains("rotation")) spec.constant = qps::rotation(read<double>(k, "rotation", w));
  if (k.contains("constant")) {
    auto v = read<std::vector<double>>(k, "constant", w);
    if (v.size() != 4) throw ConfigError("kam.constant: expected [a, b, c, d]");
    qps::Mat2 A{v[0], v[1], v[2], v[3]};
    if (std::abs(A.det() - 1.0) > 1e-9) throw ConfigError("kam.constant: det must be 1");
    spec.constant = A;
  }
  if (k.contains("perturbation")) {
    if (spec.energy) throw ConfigError("kam.perturbation: only valid with 'constant' or 'rotation'");
    try {
      spec.perturbation = qps::matrix_series_from_json(k.at("perturbation").dump());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("kam.perturbation: ") + e.what());
    }
    spec.has_perturbation = true;
  }
  auto& o = spec.options;
  o.start_guard = positive(read_or<double>(k, "start_guard", w, o.start_guard), "kam.start_guard");
  o.step_guard = positive(read_or<double>(k, "step_guard", w, o.step_guard), "kam.step_guard");
  o.stop_tol = positive(read_or<double>(k, "stop_tol", w, o.stop_tol), "kam.stop_tol");
  o.max_steps = at_least(read_or<int>(k, "max_steps", w, o.max_steps), 1, "kam.max_steps");
  o.grid_points = at_least(read_or<int>(k, "grid_points", w, o.grid_points), 16, "kam.grid_points");
  o.divisor_floor = positive(read_or<double>(k, "divisor_floor", w, o.divisor_floor), "kam.divisor_floor");
  o.schedule_M = at_least(read_or<int>(k, "schedule_M", w, o.schedule_M), 2, "kam.schedule_M");
}

void parse_edge(const json& e, RunConfig& cfg) {
  const std::string w = "edge";
  check_keys(e, {"gaps_file", "label"}, w);
  EdgeSpec spec;
  spec.gaps_file = read<std::string>(e, "gaps_file", w);
  spec.label = read_index(require(e, "label", w), "edge.label");
  cfg.edge = spec;
}

void parse_output(const json& o, RunConfig& cfg) {
  const std::string w = "output";
  check_keys(o, {"dir", "format"}, w);
  cfg.out_dir = read_or<std::string>(o, "dir", w, cfg.out_dir);
  std::string fmt = read_or<std::string>(o, "format", w, "csv");
  if (fmt == "csv") cfg.format = Format::csv;
  else if (fmt == "json") cfg.format = Format::json;
  else throw ConfigError("output.format: expected 'csv' or 'json'");
}

}  // namespace

RunConfig parse_config(const json& j) {
  check_keys(j, {"potential", "frequency", "numerics", "kam", "edge", "output"}, "config");
  RunConfig cfg;
  cfg.raw = j;
  parse_frequency(require(j, "frequency", "config"), cfg);
  parse_potential(require(j, "potential", "config"), cfg);
  if (j.contains("numerics")) parse_numerics(j.at("numerics"), cfg);
  if (j.contains("kam")) parse_kam(j.at("kam"), cfg);
  if (j.contains("edge")) parse_edge(j.at("edge"), cfg);
  if (j.contains("output")) parse_output(j.at("output"), cfg);

  int d = static_cast<int>(cfg.frequency.alpha.size());
  const auto& p = cfg.potential;
  if ((p.family == "amo" || p.family == "ck_family") && d != 1)
    throw ConfigError("potential.family: '" + p.family + "' needs a one-dimensional frequency");
  if (p.family == "explicit" && p.series.dim() != d)
    throw ConfigError("potential.series: dimension does not match frequency.alpha");
  if (cfg.kam.has_perturbation && cfg.kam.perturbation.dim() != d)
    throw ConfigError("kam.perturbation: dimension does not match frequency.alpha");
  if (cfg.edge && static_cast<int>(cfg.edge->label.size()) != d)
    throw ConfigError("edge.label: dimension does not match frequency.alpha");
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return parse_config(j);
}

qps::ScalarSeries RunConfig::potential_series() const {
  int d = static_cast<int>(frequency.alpha.size());
  const auto& p = potential;
  if (p.family == "free") return qps::constant_series(d, 0.0);
  if (p.family == "amo") return qps::amo_potential(p.lambda);
  if (p.family == "ck_family") return qps::ck_family(p.eps, p.k, p.modes);
  return p.series;
}

qps::Frequency RunConfig::validated_frequency() const {
  try {
    return qps::make_frequency(frequency.alpha, frequency.gamma, frequency.tau,
                               frequency.check_cutoff);
  } catch (const qps::FrequencyRejected&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("frequency: ") + e.what());
  }
}

std::uint64_t digest(const json& j) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : j.dump()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace qpcli
