#include "qpspec/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace qps {

namespace {

double spectral_norm(double frob2, double abs_det) {
  double disc = std::max(0.0, frob2 * frob2 - 4.0 * abs_det * abs_det);
  return std::sqrt(0.5 * (frob2 + std::sqrt(disc)));
}

}  // namespace

Mat2 Mat2::inverse() const {
  double D = det();
  if (D == 0.0) throw std::domain_error("singular 2x2 matrix");
  return Mat2{d, -b, -c, a} / D;
}

double Mat2::norm() const {
  return spectral_norm(a * a + b * b + c * c + d * d, std::abs(det()));
}

double Mat2::max_abs() const {
  return std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
}

double CMat2::norm() const {
  double f = 0.0;
  for (const auto& z : v) f += std::norm(z);
  return spectral_norm(f, std::abs(v[0] * v[3] - v[1] * v[2]));
}

Sl2 bracket(const Sl2& x, const Sl2& y) {
  Mat2 X = x.mat(), Y = y.mat();
  return Sl2::from(X * Y - Y * X);
}

Mat2 rotation(double phi) {
  double c = std::cos(kTwoPi * phi), s = std::sin(kTwoPi * phi);
  return {c, -s, s, c};
}

SL2 exp_sl2(const Sl2& x) {
  // x^2 = delta * Id with delta = -det(x).
  double delta = -x.det();
  double C, S;
  if (std::abs(delta) < 1e-6) {
    C = 1.0 + delta / 2.0 + delta * delta / 24.0 + delta * delta * delta / 720.0;
    S = 1.0 + delta / 6.0 + delta * delta / 120.0 + delta * delta * delta / 5040.0;
  } else if (delta > 0.0) {
    double s = std::sqrt(delta);
    C = std::cosh(s);
    S = std::sinh(s) / s;
  } else {
    double s = std::sqrt(-delta);
    C = std::cos(s);
    S = std::sin(s) / s;
  }
  return Mat2{C, 0.0, 0.0, C} + x.mat() * S;
}

Sl2 log_sl2(const SL2& A) {
  double t = 0.5 * A.trace();
  double u = t - 1.0;
  double g;
  if (std::abs(u) <= 1e-4) {
    g = 1.0 - u / 3.0 + 2.0 * u * u / 15.0 - 2.0 * u * u * u / 35.0;
  } else if (t > 1.0) {
    double s = std::acosh(t);
    g = s / std::sinh(s);
  } else if (t > -1.0) {
    double s = std::acos(t);
    g = s / std::sin(s);
  } else {
    if ((A + Mat2::identity()).max_abs() <= 1e-12) return rotation_generator() * kPi;
    throw BranchError("log_sl2: trace <= -2 has no real principal logarithm");
  }
  return Sl2::from((A - Mat2{t, 0.0, 0.0, t}) * g);
}

Mat2 normalize_det(const Mat2& m) {
  double D = m.det();
  if (!(D > 0.0)) throw std::domain_error("normalize_det: non-positive determinant");
  return m / std::sqrt(D);
}

}  // namespace qps
