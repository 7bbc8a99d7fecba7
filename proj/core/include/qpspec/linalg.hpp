#pragma once

#include <array>
#include <complex>
#include <stdexcept>

namespace qps {

using cd = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Real 2x2 matrix [[a, b], [c, d]]. Used for SL(2,R) elements and for
/// general gl(2,R) values (e.g. the Moser-Poschel P(theta)).
struct Mat2 {
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

  static Mat2 identity() { return {}; }
  static Mat2 zero() { return {0.0, 0.0, 0.0, 0.0}; }

  double det() const { return a * d - b * c; }
  double trace() const { return a + d; }
  Mat2 inverse() const;
  Mat2 transpose() const { return {a, c, b, d}; }
  /// Spectral (operator 2-) norm.
  double norm() const;
  double max_abs() const;

  Mat2 operator*(const Mat2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
  Mat2 operator+(const Mat2& o) const { return {a + o.a, b + o.b, c + o.c, d + o.d}; }
  Mat2 operator-(const Mat2& o) const { return {a - o.a, b - o.b, c - o.c, d - o.d}; }
  Mat2 operator-() const { return {-a, -b, -c, -d}; }
  Mat2 operator*(double s) const { return {a * s, b * s, c * s, d * s}; }
  Mat2 operator/(double s) const { return {a / s, b / s, c / s, d / s}; }
  Mat2& operator+=(const Mat2& o) { return *this = *this + o; }
  Mat2& operator*=(const Mat2& o) { return *this = *this * o; }
};

inline Mat2 operator*(double s, const Mat2& m) { return m * s; }

using SL2 = Mat2;

/// Trace-free real 2x2 matrix [[h, e], [f, -h]] stored by its three free
/// parameters.
struct Sl2 {
  double h = 0.0, e = 0.0, f = 0.0;

  static Sl2 from(const Mat2& m) { return {0.5 * (m.a - m.d), m.b, m.c}; }
  Mat2 mat() const { return {h, e, f, -h}; }
  double det() const { return -h * h - e * f; }
  double norm() const { return mat().norm(); }

  Sl2 operator+(const Sl2& o) const { return {h + o.h, e + o.e, f + o.f}; }
  Sl2 operator-(const Sl2& o) const { return {h - o.h, e - o.e, f - o.f}; }
  Sl2 operator-() const { return {-h, -e, -f}; }
  Sl2 operator*(double s) const { return {h * s, e * s, f * s}; }
};

inline Sl2 operator*(double s, const Sl2& x) { return x * s; }

/// Lie bracket [x, y] = xy - yx.
Sl2 bracket(const Sl2& x, const Sl2& y);

/// R_phi = [[cos 2 pi phi, -sin 2 pi phi], [sin 2 pi phi, cos 2 pi phi]].
Mat2 rotation(double phi);

/// Generator J with exp(2 pi phi J) = R_phi.
inline Sl2 rotation_generator() { return {0.0, -1.0, 1.0}; }

/// Closed-form exponential, split on the sign of det(x).
SL2 exp_sl2(const Sl2& x);

struct BranchError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Principal logarithm: rotation angle in (-1/2, 1/2]. Throws BranchError for
/// trace <= -2 other than -Id.
Sl2 log_sl2(const SL2& A);

/// Rescale by 1/sqrt(det) so that det = 1 (det must be positive).
Mat2 normalize_det(const Mat2& m);

/// Complex 2x2 matrix, row-major.
struct CMat2 {
  std::array<cd, 4> v{cd(0), cd(0), cd(0), cd(0)};

  CMat2() = default;
  CMat2(cd a, cd b, cd c, cd d) : v{a, b, c, d} {}
  explicit CMat2(const Mat2& m) : v{cd(m.a), cd(m.b), cd(m.c), cd(m.d)} {}

  cd& operator()(int i, int j) { return v[2 * i + j]; }
  const cd& operator()(int i, int j) const { return v[2 * i + j]; }

  CMat2 operator+(const CMat2& o) const {
    return {v[0] + o.v[0], v[1] + o.v[1], v[2] + o.v[2], v[3] + o.v[3]};
  }
  CMat2 operator-(const CMat2& o) const {
    return {v[0] - o.v[0], v[1] - o.v[1], v[2] - o.v[2], v[3] - o.v[3]};
  }
  CMat2 operator*(const CMat2& o) const {
    return {v[0] * o.v[0] + v[1] * o.v[2], v[0] * o.v[1] + v[1] * o.v[3],
            v[2] * o.v[0] + v[3] * o.v[2], v[2] * o.v[1] + v[3] * o.v[3]};
  }
  CMat2 operator*(cd s) const { return {v[0] * s, v[1] * s, v[2] * s, v[3] * s}; }
  CMat2& operator+=(const CMat2& o) { return *this = *this + o; }

  CMat2 conj() const {
    return {std::conj(v[0]), std::conj(v[1]), std::conj(v[2]), std::conj(v[3])};
  }
  Mat2 real() const { return {v[0].real(), v[1].real(), v[2].real(), v[3].real()}; }
  Mat2 imag() const { return {v[0].imag(), v[1].imag(), v[2].imag(), v[3].imag()}; }
  /// Spectral norm of the complex matrix.
  double norm() const;
};

}  // namespace qps
