#pragma once

#include <cstddef>
#include <vector>

#include "qpspec/fourier.hpp"

namespace qps {

/// Uniform tensor grid with `points` nodes per coordinate on T^d or 2T^d.
struct Grid {
  int dim = 1;
  int points = 256;
  bool half_period = false;

  std::size_t size() const;
  double period() const { return half_period ? 2.0 : 1.0; }
  std::vector<double> theta(std::size_t idx) const;
};

/// Values of f at theta + shift over the grid (FFT synthesis). The grid must
/// resolve the series: points > 2 * radius.
std::vector<double> sample(const ScalarSeries& f, const Grid& g,
                           const std::vector<double>& shift = {});
std::vector<Mat2> sample(const MatrixSeries& f, const Grid& g,
                         const std::vector<double>& shift = {});

/// Fourier coefficients |n| <= radius of grid data (FFT analysis).
/// Coefficients with norm <= prune are dropped.
ScalarSeries analyze(const std::vector<double>& values, const Grid& g, int radius,
                     double prune = 0.0);
MatrixSeries analyze(const std::vector<Mat2>& values, const Grid& g, int radius,
                     double prune = 0.0);

}  // namespace qps
