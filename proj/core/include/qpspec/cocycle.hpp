#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qpspec/fourier.hpp"
#include "qpspec/frequency.hpp"
#include "qpspec/linalg.hpp"

namespace qps {

/// Quasi-periodic SL(2,R) cocycle (alpha, A(.)). Three representations share
/// one evaluation interface: the Schrodinger form [[E - V, -1], [1, 0]], a
/// general SL2-valued series, and the KAM form A * exp(f(theta)).
class Cocycle {
 public:
  enum class Kind { schrodinger, series, kam_form };

  static Cocycle schrodinger(const ScalarSeries& V, double E, const Frequency& freq);
  /// Validates det = 1 within 1e-9 on a (4 N + 1)^d grid.
  static Cocycle from_series(const MatrixSeries& A, const Frequency& freq);
  static Cocycle constant(const SL2& A, const Frequency& freq);
  static Cocycle kam_form(const SL2& A, const MatrixSeries& f, const Frequency& freq);

  SL2 at(const std::vector<double>& theta) const;
  const Frequency& freq() const { return freq_; }
  int dim() const { return freq_.dim(); }
  Kind kind() const { return kind_; }

  double energy() const { return energy_; }
  const ScalarSeries& potential() const { return potential_; }
  const MatrixSeries& series() const { return series_; }
  const SL2& constant_part() const { return A_; }

 private:
  Kind kind_ = Kind::series;
  Frequency freq_;
  ScalarSeries potential_;
  double energy_ = 0.0;
  MatrixSeries series_;
  SL2 A_;
};

Cocycle schrodinger_cocycle(const ScalarSeries& V, double E, const Frequency& freq);

/// theta + n alpha reduced to the fundamental domain.
std::vector<double> translate(const std::vector<double>& theta, const Frequency& freq,
                              long n);

/// A_n(theta) = A(theta + (n-1) alpha) ... A(theta) for n > 0, Id for n = 0 and
/// A(theta + n alpha)^{-1} ... A(theta - alpha)^{-1} for n < 0. The running
/// product is rescaled to det 1 every 64 factors.
SL2 iterate(const Cocycle& c, const std::vector<double>& theta, long n);

enum class Verdict { uniformly_hyperbolic, not_uniform, inconclusive };
std::string to_string(Verdict v);

struct HyperbolicityVerdict {
  Verdict verdict = Verdict::inconclusive;
  int orbit_length = 0;
  double growth_exponent = 0.0;  ///< min over phases of log||A_orbit|| / orbit
  double min_cone_margin = 0.0;  ///< min over phases of 1 - max|slope|/2 (negative = escaped)
  int phases_passed = 0;
};

/// Cone-field criterion. At every sampled phase the splitting is estimated
/// from orbit-length pushes (unstable) and pulls (stable); the cocycle over a
/// quarter orbit, written in those frames, must map the cone |slope| <= 2
/// into |slope| <= 2 (1 - margin). Bounded products (growth below
/// 5 / orbit) give not_uniform.
HyperbolicityVerdict uniform_hyperbolicity_test(const Cocycle& c, int phases, int orbit,
                                                double margin = 0.05);

}  // namespace qps
