#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "qpspec/cocycle.hpp"

namespace qps {

struct RotationEstimate {
  double rho = 0.0;       ///< [0, 1/2] for Schrodinger cocycles, [0, 1) otherwise
  long iterations = 0;
  double error = 0.0;     ///< |average over n - average over n/2|
};

/// Orbit average of the lifted angle increment. Schrodinger cocycles use the
/// line-angle lift in which every step turns by less than pi; other
/// cocycles split A = R_phi U (U upper triangular) and lift phi continuously
/// over the torus; rho is reported mod 1.
RotationEstimate rotation_number(const Cocycle& c, const std::vector<double>& theta0,
                                 long n_iters);

struct DegeneracyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using MatrixField = std::function<Mat2(const std::vector<double>&)>;

/// Winding of the first column of B along each coordinate of 2T^d; returns n
/// with B homotopic to R_{<n,theta>/2}.
Index degree(const MatrixField& B, int dim, int samples = 512);
Index degree(const MatrixSeries& B, const Frequency& freq);

/// rho_in - <deg, alpha>/2 reduced mod Z.
double conjugated_rotation(double rho_in, const Index& deg, const Frequency& freq);

struct PerturbationBoundReport {
  double rho = 0.0;
  double lhs = 0.0;    ///< |rho - phi| in R/Z
  double rhs = 0.0;    ///< max over the grid of ||A(theta) - R_phi||
  double slack = 0.0;  ///< rhs - lhs
  bool holds = false;
};

/// Measures both sides of |rho(alpha, A) - phi| < ||A - R_phi||.
PerturbationBoundReport rotation_perturbation_bound_check(const MatrixSeries& A, double phi,
                                                          const Frequency& freq,
                                                          long n_iters = 100000);

}  // namespace qps
