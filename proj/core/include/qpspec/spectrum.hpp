#pragma once

#include <vector>

#include "qpspec/fourier.hpp"
#include "qpspec/frequency.hpp"

namespace qps {

/// Restriction of the quasi-periodic Schrodinger operator to [-L, L] with
/// zero boundary conditions. Off-diagonal entries are all one.
struct TruncatedOperator {
  int L = 0;
  std::vector<double> diag;  ///< V(theta + n alpha), n = -L..L

  int size() const { return 2 * L + 1; }
};

TruncatedOperator truncate(const ScalarSeries& V, const Frequency& freq,
                           const std::vector<double>& theta, int L);

/// Number of eigenvalues <= E (Sturm count on the shifted LDL^T pivots).
int eigen_count_below(const TruncatedOperator& H, double E);

/// Ascending eigenvalues (LAPACK dsterf).
std::vector<double> eigenvalues(const TruncatedOperator& H);

/// Finite-L integrated density of states averaged over phase samples.
double ids(const ScalarSeries& V, const Frequency& freq, double E, int L, int phases);

/// All eigenvalues of the truncations at every phase sample, merged and
/// sorted; answers IDS queries by binary search.
struct SpectralSample {
  int L = 0;
  int phases = 0;
  std::vector<double> eigs;
  std::vector<int> phase;  ///< phase sample each entry of eigs came from

  double ids(double E) const;
};

/// threads <= 0 uses the hardware concurrency; the result does not depend on it.
SpectralSample spectral_sample(const ScalarSeries& V, const Frequency& freq, int L,
                               int phases, int threads = 1);

struct IdsCurve {
  std::vector<double> energy;
  std::vector<double> N;
  int L = 0;
  int phases = 0;

  bool monotone() const;
  double at(double E) const;  ///< linear interpolation, clamped at the ends
};

IdsCurve ids_curve(const SpectralSample& s, const std::vector<double>& energies);
IdsCurve ids_curve(const SpectralSample& s, double lo, double hi, int points);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
};

/// Spectrum of the truncations as a union of intervals. A gap is a stretch
/// in which no phase has more than two eigenvalues (its boundary states),
/// longer than `resolution` and than four times the local eigenvalue spacing
/// of a single phase. Band ends are medians over phases of the per-phase
/// extreme eigenvalue. Without phase tags, points closer than `resolution`
/// are joined.
std::vector<Interval> spectrum_scan(const SpectralSample& s, double resolution);
std::vector<Interval> spectrum_scan(const ScalarSeries& V, const Frequency& freq, int L,
                                    int phases, double resolution);

struct DualityReport {
  double N = 0.0;
  double rho = 0.0;
  double defect = 0.0;  ///< dist(N - (1 - 2 rho), Z)
};

DualityReport ids_rotation_consistency(const ScalarSeries& V, const Frequency& freq, double E,
                                       int L, long iters, int phases = 8);

}  // namespace qps
