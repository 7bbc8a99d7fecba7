#pragma once

#include <functional>
#include <vector>

#include "qpspec/kam.hpp"

namespace qps::detail {

inline CMat2 cmat(const Sl2& x) { return CMat2(x.mat()); }

std::vector<double> add(const std::vector<double>& a, const std::vector<double>& b);

/// Noise floor for coefficients recovered from grid values.
double prune_level(const Mat2& A);

/// log(A_new^{-1} X(theta)) sampled on the KAM grid and transformed back.
MatrixSeries perturbation_from_values(const SL2& A_new, const std::vector<Mat2>& X,
                                      const Grid& g, const Mat2& A_scale);

/// Values of A exp(f(theta)) on the grid (optionally at theta + shift).
std::vector<Mat2> state_values(const SL2& A, const MatrixSeries& f, const Grid& g,
                               const std::vector<double>& shift = {});

/// exp(Y(theta)) on the grid.
std::vector<Mat2> exp_values(const MatrixSeries& Y, const Grid& g,
                             const std::vector<double>& shift = {});

/// Average over the grid of the sl2 part of log(A^{-1} X).
Sl2 mean_log(const SL2& A, const std::vector<Mat2>& X);

/// detect_resonance on the constant of s, dropping a site whose Fourier mode
/// in f is too small for its divisor to matter (|f(n)| <= 2 pi dist |f|).
std::optional<Index> active_resonance(const KamState& s, int N, double threshold);

LedgerEntry finish_entry(LedgerEntry e, const KamState& s);

}  // namespace qps::detail
