#include "qpspec/fourier.hpp"

#include <algorithm>
#include <cmath>

namespace qps {

namespace {

void multi_indices(int dim, int k, Index& cur, int pos, int left,
                   std::vector<Index>& out) {
  if (pos == dim) {
    out.push_back(cur);
    return;
  }
  for (int v = 0; v <= left; ++v) {
    cur[pos] = v;
    multi_indices(dim, k, cur, pos + 1, left - v, out);
  }
  cur[pos] = 0;
}

}  // namespace

template <class T>
CkNorm ck_norm(const FourierSeries<T>& f, int k) {
  using Tr = SeriesTraits<T>;
  if (k < 0) throw std::invalid_argument("ck_norm: k must be >= 0");
  CkNorm out;
  const double w = kTwoPi / f.period();
  for (const auto& [n, c] : f.coeffs()) {
    double base = w * sup_norm(n);
    double factor = 1.0;
    for (int j = 1; j <= k; ++j) factor = std::max(factor, std::pow(base, j));
    out.upper += factor * Tr::norm(c);
  }

  const int d = f.dim();
  const int pts = std::max(4 * f.radius() + 1, d == 1 ? 1024 : (d == 2 ? 64 : 16));
  std::vector<Index> betas;
  Index cur(d, 0);
  multi_indices(d, k, cur, 0, k, betas);

  std::size_t total = 1;
  for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(pts);
  std::vector<double> theta(d);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    for (int i = d - 1; i >= 0; --i) {
      theta[i] = f.period() * static_cast<double>(rem % pts) / pts;
      rem /= pts;
    }
    for (const Index& beta : betas) {
      auto v = Tr::real_part(f.evaluate_complex(theta, beta));
      out.lower = std::max(out.lower, Tr::value_norm(v));
    }
  }
  return out;
}

double taper_weight(int s, int j) {
  if (s > j) return 0.0;
  int width = std::max(1, (j + 7) / 8);
  int start = j - width;  // shells <= start are kept at full weight
  if (s <= start) return 1.0;
  double x = static_cast<double>(s - start) / (width + 1);
  return 0.5 * (1.0 + std::cos(kPi * x));
}

template <class T>
FourierSeries<T> smooth_truncate(const FourierSeries<T>& f, int j) {
  if (j < 1) throw std::invalid_argument("smooth_truncate: j must be >= 1");
  if (f.support_radius() <= j) return f;
  FourierSeries<T> out(f.dim(), std::min(f.radius(), j), f.half_period());
  for (const auto& [n, c] : f.coeffs()) {
    int s = sup_norm(n);
    if (s > j) continue;
    out.set_raw(n, c * cd(taper_weight(s, j)));
  }
  return out;
}

template CkNorm ck_norm(const ScalarSeries&, int);
template CkNorm ck_norm(const MatrixSeries&, int);
template ScalarSeries smooth_truncate(const ScalarSeries&, int);
template MatrixSeries smooth_truncate(const MatrixSeries&, int);

ScalarSeries constant_series(int dim, double c) {
  ScalarSeries s(dim, 0);
  if (c != 0.0) s.set(Index(dim, 0), cd(c));
  return s;
}

ScalarSeries cosine_series(const std::vector<int>& modes, const std::vector<double>& amps,
                           int radius) {
  if (modes.size() != amps.size())
    throw std::invalid_argument("cosine_series: modes/amplitudes length mismatch");
  int r = radius;
  if (r < 0) {
    r = 0;
    for (int m : modes) r = std::max(r, std::abs(m));
  }
  ScalarSeries s(1, r);
  for (std::size_t i = 0; i < modes.size(); ++i) {
    if (modes[i] == 0) {
      s.add({0}, cd(amps[i]));
    } else {
      s.add({std::abs(modes[i])}, cd(0.5 * amps[i]));
    }
  }
  return s;
}

ScalarSeries amo_potential(double lambda) { return cosine_series({1}, {2.0 * lambda}); }

ScalarSeries ck_family(double eps, int k, int nmax, int radius) {
  std::vector<int> modes;
  std::vector<double> amps;
  for (int n = 1; n <= nmax; ++n) {
    modes.push_back(n);
    amps.push_back(eps * std::pow(static_cast<double>(n), -k));
  }
  return cosine_series(modes, amps, radius < 0 ? nmax : radius);
}

MatrixSeries constant_matrix_series(int dim, const Mat2& m, int radius, bool half_period) {
  MatrixSeries s(dim, radius, half_period);
  s.set(Index(dim, 0), CMat2(m));
  return s;
}

MatrixSeries embed(const ScalarSeries& s, int row, int col) {
  MatrixSeries out(s.dim(), s.radius(), s.half_period());
  for (const auto& [n, c] : s.coeffs()) {
    CMat2 m;
    m(row, col) = c;
    out.set_raw(n, m);
  }
  return out;
}

}  // namespace qps
