#include "qpspec/cocycle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qps {

Cocycle Cocycle::schrodinger(const ScalarSeries& V, double E, const Frequency& freq) {
  if (V.dim() != freq.dim()) throw std::invalid_argument("schrodinger: dimension mismatch");
  if (V.half_period()) throw std::invalid_argument("schrodinger: V must live on T^d");
  Cocycle c;
  c.kind_ = Kind::schrodinger;
  c.freq_ = freq;
  c.potential_ = V;
  c.energy_ = E;
  return c;
}

Cocycle Cocycle::from_series(const MatrixSeries& A, const Frequency& freq) {
  if (A.dim() != freq.dim()) throw std::invalid_argument("cocycle: dimension mismatch");
  if (A.half_period()) throw std::invalid_argument("cocycle: map must live on T^d");
  const int d = A.dim();
  const int pts = 4 * std::max(1, A.support_radius()) + 1;
  std::size_t total = 1;
  for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(pts);
  std::vector<double> th(d);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    for (int i = d - 1; i >= 0; --i) {
      th[i] = static_cast<double>(rem % pts) / pts;
      rem /= pts;
    }
    if (std::abs(A.evaluate(th).det() - 1.0) > 1e-9)
      throw std::invalid_argument("cocycle: det(A) deviates from 1 by more than 1e-9");
  }
  Cocycle c;
  c.kind_ = Kind::series;
  c.freq_ = freq;
  c.series_ = A;
  return c;
}

Cocycle Cocycle::constant(const SL2& A, const Frequency& freq) {
  if (std::abs(A.det() - 1.0) > 1e-9)
    throw std::invalid_argument("cocycle: constant matrix is not in SL(2,R)");
  return from_series(constant_matrix_series(freq.dim(), A), freq);
}

Cocycle Cocycle::kam_form(const SL2& A, const MatrixSeries& f, const Frequency& freq) {
  if (f.dim() != freq.dim()) throw std::invalid_argument("cocycle: dimension mismatch");
  Cocycle c;
  c.kind_ = Kind::kam_form;
  c.freq_ = freq;
  c.A_ = A;
  c.series_ = f;
  return c;
}

SL2 Cocycle::at(const std::vector<double>& theta) const {
  switch (kind_) {
    case Kind::schrodinger:
      return {energy_ - potential_.evaluate(theta), -1.0, 1.0, 0.0};
    case Kind::kam_form:
      return A_ * exp_sl2(Sl2::from(series_.evaluate(theta)));
    default:
      return series_.evaluate(theta);
  }
}

Cocycle schrodinger_cocycle(const ScalarSeries& V, double E, const Frequency& freq) {
  return Cocycle::schrodinger(V, E, freq);
}

std::vector<double> translate(const std::vector<double>& theta, const Frequency& freq,
                              long n) {
  std::vector<double> out(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i)
    out[i] = mod1(theta[i] + mod1(static_cast<double>(n) * freq.alpha[i]));
  return out;
}

SL2 iterate(const Cocycle& c, const std::vector<double>& theta, long n) {
  SL2 M = Mat2::identity();
  if (n == 0) return M;
  long steps = std::labs(n);
  std::vector<double> th = n > 0 ? theta : translate(theta, c.freq(), n);
  for (long k = 0; k < steps; ++k) {
    M = c.at(th) * M;
    th = translate(th, c.freq(), 1);
    if ((k + 1) % 64 == 0) M = normalize_det(M);
  }
  M = normalize_det(M);
  return n > 0 ? M : M.inverse();
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::uniformly_hyperbolic: return "uniformly_hyperbolic";
    case Verdict::not_uniform: return "not_uniform";
    default: return "inconclusive";
  }
}

namespace {

struct ScaledProduct {
  Mat2 M;            // unit spectral norm
  double log_scale;  // log of the discarded norm
};

ScaledProduct scaled_product(const Cocycle& c, std::vector<double> th, int steps) {
  ScaledProduct p{Mat2::identity(), 0.0};
  for (int k = 0; k < steps; ++k) {
    p.M = c.at(th) * p.M;
    th = translate(th, c.freq(), 1);
    if ((k + 1) % 16 == 0 || k + 1 == steps) {
      double s = p.M.norm();
      p.M = p.M / s;
      p.log_scale += std::log(s);
    }
  }
  return p;
}

// Major eigenvector of the symmetric matrix [[p, q], [q, r]].
std::pair<double, double> major_axis(double p, double q, double r) {
  double phi = 0.5 * std::atan2(2.0 * q, p - r);
  return {std::cos(phi), std::sin(phi)};
}

std::pair<double, double> left_major(const Mat2& M) {
  Mat2 S = M * M.transpose();
  return major_axis(S.a, S.b, S.d);
}

std::pair<double, double> right_minor(const Mat2& M) {
  Mat2 S = M.transpose() * M;
  auto [x, y] = major_axis(S.a, S.b, S.d);
  return {-y, x};
}

struct Frame {
  Mat2 F;
  bool ok;
};

Frame splitting_frame(const Cocycle& c, const std::vector<double>& th, int K) {
  auto past = scaled_product(c, translate(th, c.freq(), -K), K);
  auto future = scaled_product(c, th, K);
  auto [ux, uy] = left_major(past.M);
  auto [sx, sy] = right_minor(future.M);
  Mat2 F{ux, sx, uy, sy};
  return {F, std::abs(F.det()) > 1e-8};
}

}  // namespace

HyperbolicityVerdict uniform_hyperbolicity_test(const Cocycle& c, int phases, int orbit,
                                                double margin) {
  if (phases < 1) throw std::invalid_argument("uniform_hyperbolicity_test: phases >= 1");
  if (orbit < 10) throw std::invalid_argument("uniform_hyperbolicity_test: orbit >= 10");
  HyperbolicityVerdict out;
  out.orbit_length = orbit;
  out.growth_exponent = std::numeric_limits<double>::infinity();
  out.min_cone_margin = std::numeric_limits<double>::infinity();
  const int m = std::max(1, orbit / 4);

  for (const auto& th : phase_samples(c.dim(), phases)) {
    auto full = scaled_product(c, th, orbit);
    out.growth_exponent = std::min(out.growth_exponent, full.log_scale / orbit);

    double phase_margin = -1.0;
    Frame f0 = splitting_frame(c, th, orbit);
    Frame f1 = splitting_frame(c, translate(th, c.freq(), m), orbit);
    if (f0.ok && f1.ok) {
      Mat2 M = f1.F.inverse() * scaled_product(c, th, m).M * f0.F;
      if (std::abs(M.a) > 2.0 * std::abs(M.b)) {
        double s1 = std::abs((M.c + 2.0 * M.d) / (M.a + 2.0 * M.b));
        double s2 = std::abs((M.c - 2.0 * M.d) / (M.a - 2.0 * M.b));
        phase_margin = 1.0 - 0.5 * std::max(s1, s2);
      }
    }
    out.min_cone_margin = std::min(out.min_cone_margin, phase_margin);
    if (phase_margin >= margin) ++out.phases_passed;
  }

  if (out.phases_passed == phases)
    out.verdict = Verdict::uniformly_hyperbolic;
  else if (out.growth_exponent < 5.0 / orbit)
    out.verdict = Verdict::not_uniform;
  else
    out.verdict = Verdict::inconclusive;
  return out;
}

}  // namespace qps
