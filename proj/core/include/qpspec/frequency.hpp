#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qps {

/// Integer frequency vector n in Z^d.
using Index = std::vector<int>;

/// Sup-norm |n| = max_i |n_i|.
int sup_norm(const Index& n);

/// All n with |n| <= R, ordered by shell |n| and then lexicographically.
std::vector<Index> index_ball(int dim, int R);

/// Distance from x to the nearest integer.
double dist_to_Z(double x);

/// Representative of x mod 1 in [0, 1).
double mod1(double x);

struct Frequency {
  std::vector<double> alpha;
  double gamma = 0.0;
  double tau = 0.0;
  int check_cutoff = 0;

  int dim() const { return static_cast<int>(alpha.size()); }
  /// <n, alpha> as a real number (not reduced).
  double dot(const Index& n) const;
};

struct DiophantineReport {
  bool accepted = false;
  std::optional<Frequency> frequency;
  Index violating_n;   ///< first violating n (shell order), empty if accepted
  double defect = 0.0; ///< dist(<n,alpha>, Z) at the violating n
  double required = 0.0;
  std::string message() const;
};

/// Verifies dist(<n,alpha>, Z) >= gamma/|n|^tau for 0 < |n| <= M.
/// Throws std::invalid_argument on violated preconditions.
DiophantineReport diophantine_check(const std::vector<double>& alpha, double gamma,
                                    double tau, int M);

struct FrequencyRejected : std::runtime_error {
  DiophantineReport report;
  explicit FrequencyRejected(DiophantineReport r)
      : std::runtime_error(r.message()), report(std::move(r)) {}
};

/// diophantine_check that throws FrequencyRejected on failure.
Frequency make_frequency(const std::vector<double>& alpha, double gamma, double tau,
                         int M);

/// Deterministic phase samples theta_j = j * omega (mod 1), j = 0..count-1,
/// with omega_i the fractional part of sqrt(2), sqrt(3), sqrt(7), sqrt(11), ...
std::vector<std::vector<double>> phase_samples(int dim, int count);

/// Golden-mean rotation (sqrt 5 - 1)/2 with the given Diophantine data.
Frequency golden_frequency(double gamma = 0.2, double tau = 1.5, int M = 100);

}  // namespace qps
