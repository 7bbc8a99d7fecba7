#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "qpspec/fourier.hpp"
#include "qpspec/frequency.hpp"
#include "qpspec/kam.hpp"

namespace qpcli {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InventoryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Format { csv, json };

struct PotentialSpec {
  std::string family;  // free | amo | ck_family | explicit
  double lambda = 0.0;
  double eps = 0.0;
  int k = 0;
  int modes = 0;
  qps::ScalarSeries series;
};

struct FrequencySpec {
  std::vector<double> alpha;
  double gamma = 0.2;
  double tau = 1.5;
  int check_cutoff = 100;
};

struct Numerics {
  int L = 2000;
  int phases = 8;
  std::vector<double> energies;
  double resolution = 1e-3;
  double min_length = 0.0;  // 0 = 4/L
  int label_M_max = 20;
  double label_tol = 1e-3;
  bool refine_edges = false;
  double edge_tol = 1e-10;
  long rotation_iters = 100000;
  std::vector<double> homog_eps{1e-3, 3e-3, 1e-2, 3e-2, 1e-1};
  int homog_samples = 2000;
  std::vector<double> holder_eps;  // default 2^-12 .. 2^-4
  int k = 6;
};

struct KamSpec {
  std::optional<double> energy;     // Schrodinger cocycle at this E
  std::optional<qps::Mat2> constant;
  qps::MatrixSeries perturbation;   // sl2-valued, for the constant form
  bool has_perturbation = false;
  qps::KamOptions options;
};

struct EdgeSpec {
  std::string gaps_file;
  qps::Index label;
};

struct RunConfig {
  nlohmann::json raw;
  PotentialSpec potential;
  FrequencySpec frequency;
  Numerics numerics;
  KamSpec kam;
  std::optional<EdgeSpec> edge;
  std::string out_dir = "out";
  Format format = Format::csv;

  qps::ScalarSeries potential_series() const;
  qps::Frequency validated_frequency() const;  // throws qps::FrequencyRejected
};

RunConfig load_config(const std::string& path);
RunConfig parse_config(const nlohmann::json& j);

/// FNV-1a 64 over the compact dump (object keys are sorted by the json type).
std::uint64_t digest(const nlohmann::json& j);
std::string hex64(std::uint64_t v);

}  // namespace qpcli
