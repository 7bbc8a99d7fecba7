#include "qpspec/rotnum.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "qpspec/grid.hpp"

namespace qps {

namespace {

// Schrodinger step on a line representative with x >= 0; the image angle
// lies in [0, pi], so the increment is the canonical lift.
double schrodinger_increment(double a, double& x, double& y) {
  if (x < 0.0 || (x == 0.0 && y < 0.0)) {
    x = -x;
    y = -y;
  }
  double nx = a * x - y, ny = x;
  double delta = std::atan2(ny, nx) - std::atan2(y, x);
  double r = std::hypot(nx, ny);
  x = nx / r;
  y = ny / r;
  return delta;
}

// Column angle phi(theta) of A(theta) = R_phi U (U upper triangular, positive
// diagonal) unwound over a grid on the torus. The lift is continuous in theta
// whenever the column loop has no winding along any axis.
class ColumnLift {
 public:
  explicit ColumnLift(const Cocycle& c) : dim_(c.dim()) {
    int R = std::max(c.series().radius(), 0);
    G_ = dim_ == 1 ? std::max(1024, 64 * (R + 1)) : dim_ == 2 ? std::max(128, 16 * (R + 1)) : 32;
    std::size_t total = 1;
    for (int i = 0; i < dim_; ++i) total *= static_cast<std::size_t>(G_);
    lift_.assign(total, 0.0);
    std::vector<int> k(dim_, 0);
    std::vector<double> th(dim_);
    for (std::size_t idx = 0; idx < total; ++idx) {
      std::size_t rem = idx;
      for (int i = dim_ - 1; i >= 0; --i) {
        k[i] = static_cast<int>(rem % G_);
        rem /= G_;
        th[i] = static_cast<double>(k[i]) / G_;
      }
      double phi = column_angle(c.at(th));
      // predecessor: decrement the last nonzero coordinate
      int axis = dim_ - 1;
      while (axis >= 0 && k[axis] == 0) --axis;
      if (axis < 0) {
        lift_[idx] = phi;
        continue;
      }
      std::size_t stride = 1;
      for (int i = dim_ - 1; i > axis; --i) stride *= static_cast<std::size_t>(G_);
      double prev = lift_[idx - stride];
      lift_[idx] = prev + wrap(phi - prev);
    }
  }

  // lifted phi at theta given phi mod 1
  double at(const std::vector<double>& theta, double phi) const {
    std::size_t idx = 0;
    for (int i = 0; i < dim_; ++i) {
      long k = std::lround(mod1(theta[i]) * G_) % G_;
      idx = idx * static_cast<std::size_t>(G_) + static_cast<std::size_t>(k);
    }
    double ref = lift_[idx];
    return phi + std::nearbyint(ref - phi);
  }

  static double column_angle(const Mat2& A) { return std::atan2(A.c, A.a) / kTwoPi; }
  static double wrap(double x) { return x - std::nearbyint(x); }

 private:
  int dim_;
  int G_ = 0;
  std::vector<double> lift_;
};

double vector_increment(const Mat2& A, double phi_lifted, double& x, double& y) {
  double phi = ColumnLift::column_angle(A);
  Mat2 U = rotation(-phi) * A;
  // U keeps the upper half plane, so its turn lies in (-pi, pi)
  double ux = U.a * x + U.b * y, uy = U.c * x + U.d * y;
  double delta = std::atan2(x * uy - y * ux, x * ux + y * uy);
  double nx = A.a * x + A.b * y, ny = A.c * x + A.d * y;
  double r = std::hypot(nx, ny);
  x = nx / r;
  y = ny / r;
  return kTwoPi * phi_lifted + delta;
}

}  // namespace

RotationEstimate rotation_number(const Cocycle& c, const std::vector<double>& theta0,
                                 long n_iters) {
  if (n_iters < 1000) throw std::invalid_argument("rotation_number: n_iters must be >= 1000");
  if (static_cast<int>(theta0.size()) != c.dim())
    throw std::invalid_argument("rotation_number: theta dimension mismatch");
  const bool schr = c.kind() == Cocycle::Kind::schrodinger;
  double x = 1.0, y = 0.0, sum = 0.0, half_sum = 0.0;
  std::vector<double> th = theta0;
  std::optional<ColumnLift> lift;
  if (!schr) lift.emplace(c);
  const long half = n_iters / 2;
  for (long k = 0; k < n_iters; ++k) {
    if (schr) {
      sum += schrodinger_increment(c.energy() - c.potential().evaluate(th), x, y);
    } else {
      Mat2 A = c.at(th);
      sum += vector_increment(A, lift->at(th, ColumnLift::column_angle(A)), x, y);
    }
    th = translate(th, c.freq(), 1);
    if (k + 1 == half) half_sum = sum;
  }
  RotationEstimate est;
  est.iterations = n_iters;
  double rho_n = sum / (kTwoPi * n_iters);
  double rho_half = half_sum / (kTwoPi * half);
  est.error = std::abs(rho_n - rho_half);
  if (schr) {
    double r = std::clamp(rho_n, 0.0, 1.0);
    est.rho = std::min(r, 1.0 - r);
  } else {
    est.rho = mod1(rho_n);
  }
  return est;
}

Index degree(const MatrixField& B, int dim, int samples) {
  Index out(dim, 0);
  for (int i = 0; i < dim; ++i) {
    std::vector<double> th(dim, 0.0);
    double total = 0.0, px = 0.0, py = 0.0;
    for (int k = 0; k <= samples; ++k) {
      th[i] = 2.0 * static_cast<double>(k) / samples;
      Mat2 M = B(th);
      double x = M.a, y = M.c, r = std::hypot(x, y);
      if (r < 1e-8) throw DegeneracyError("degree: first column vanishes on the grid");
      x /= r;
      y /= r;
      if (k > 0) total += std::atan2(px * y - py * x, px * x + py * y);
      px = x;
      py = y;
    }
    out[i] = static_cast<int>(std::lround(total / kTwoPi));
  }
  return out;
}

Index degree(const MatrixSeries& B, const Frequency& freq) {
  if (B.dim() != freq.dim()) throw std::invalid_argument("degree: dimension mismatch");
  int samples = std::max(512, 16 * (B.support_radius() + 1));
  return degree([&](const std::vector<double>& th) { return B.evaluate(th); }, B.dim(),
                samples);
}

double conjugated_rotation(double rho_in, const Index& deg, const Frequency& freq) {
  return mod1(rho_in - 0.5 * freq.dot(deg));
}

PerturbationBoundReport rotation_perturbation_bound_check(const MatrixSeries& A, double phi,
                                                          const Frequency& freq,
                                                          long n_iters) {
  PerturbationBoundReport rep;
  Cocycle c = Cocycle::from_series(A, freq);
  rep.rho = rotation_number(c, std::vector<double>(freq.dim(), 0.0), n_iters).rho;
  rep.lhs = dist_to_Z(rep.rho - phi);
  Grid g{freq.dim(), std::max(64, 4 * A.support_radius() + 4), false};
  Mat2 R = rotation(phi);
  for (const Mat2& m : sample(A, g)) rep.rhs = std::max(rep.rhs, (m - R).norm());
  rep.slack = rep.rhs - rep.lhs;
  // Both sides vanish for A = R_phi; allow for the Birkhoff error there.
  rep.holds = rep.lhs < rep.rhs || rep.lhs <= 1e-6;
  return rep;
}

}  // namespace qps
