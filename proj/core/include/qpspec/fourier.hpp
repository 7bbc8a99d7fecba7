#pragma once

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "qpspec/frequency.hpp"
#include "qpspec/linalg.hpp"

namespace qps {

template <class T>
struct SeriesTraits;

template <>
struct SeriesTraits<cd> {
  using value_type = double;
  static cd zero() { return cd(0.0); }
  static cd conj(const cd& z) { return std::conj(z); }
  static double norm(const cd& z) { return std::abs(z); }
  static double real_part(const cd& z) { return z.real(); }
  static double imag_size(const cd& z) { return std::abs(z.imag()); }
  static double value_norm(double v) { return std::abs(v); }
};

template <>
struct SeriesTraits<CMat2> {
  using value_type = Mat2;
  static CMat2 zero() { return CMat2(); }
  static CMat2 conj(const CMat2& m) { return m.conj(); }
  static double norm(const CMat2& m) { return m.norm(); }
  static Mat2 real_part(const CMat2& m) { return m.real(); }
  static double imag_size(const CMat2& m) { return m.imag().max_abs(); }
  static double value_norm(const Mat2& v) { return v.norm(); }
};

/// Truncated Fourier series of a real function on T^d (period 1) or on the
/// double cover 2T^d (period 2). Mode n carries exp(2 pi i <n,theta>/p)
/// with p the period. Conjugate symmetry c(-n) = conj(c(n)) is maintained by
/// set(), so evaluation is real.
template <class T>
class FourierSeries {
 public:
  using Traits = SeriesTraits<T>;
  using value_type = typename Traits::value_type;

  FourierSeries() = default;
  FourierSeries(int dim, int radius, bool half_period = false)
      : dim_(dim), radius_(radius), half_period_(half_period) {
    if (dim < 1) throw std::invalid_argument("FourierSeries: dim must be >= 1");
    if (radius < 0) throw std::invalid_argument("FourierSeries: radius must be >= 0");
  }

  int dim() const { return dim_; }
  int radius() const { return radius_; }
  bool half_period() const { return half_period_; }
  double period() const { return half_period_ ? 2.0 : 1.0; }
  const std::map<Index, T>& coeffs() const { return coeffs_; }
  bool empty() const { return coeffs_.empty(); }

  /// Sets c(n) and c(-n) = conj(c). At n = 0 only the real part is kept.
  void set(const Index& n, const T& c) {
    check_index(n);
    if (sup_norm(n) == 0) {
      coeffs_[n] = (c + Traits::conj(c)) * cd(0.5);
      return;
    }
    coeffs_[n] = c;
    coeffs_[negate(n)] = Traits::conj(c);
  }

  /// Adds to c(n) and c(-n) consistently.
  void add(const Index& n, const T& c) { set(n, get(n) + c); }

  T get(const Index& n) const {
    auto it = coeffs_.find(n);
    return it == coeffs_.end() ? Traits::zero() : it->second;
  }

  /// Stores a raw coefficient without touching -n; for deserialization and
  /// transforms that produce both halves. Call check_reality afterwards.
  void set_raw(const Index& n, const T& c) {
    check_index(n);
    coeffs_[n] = c;
  }

  void erase(const Index& n) { coeffs_.erase(n); }

  /// Largest |n| with a stored coefficient (0 if empty).
  int support_radius() const {
    int r = 0;
    for (const auto& [n, c] : coeffs_) r = std::max(r, sup_norm(n));
    return r;
  }

  /// Max over n of ||c(-n) - conj(c(n))||.
  double reality_defect() const {
    double worst = 0.0;
    for (const auto& [n, c] : coeffs_)
      worst = std::max(worst, Traits::norm(get(negate(n)) - Traits::conj(c)));
    return worst;
  }

  /// Sum of coefficient norms (sup-norm upper bound).
  double l1_norm() const {
    double s = 0.0;
    for (const auto& [n, c] : coeffs_) s += Traits::norm(c);
    return s;
  }

  /// Value of the derivative d^beta (beta a multi-index, empty = no
  /// derivative) of the complex trigonometric sum at theta.
  T evaluate_complex(const std::vector<double>& theta, const Index& beta = {}) const {
    if (static_cast<int>(theta.size()) != dim_)
      throw std::invalid_argument("FourierSeries::evaluate: dimension mismatch");
    const double w = kTwoPi / period();
    T acc = Traits::zero();
    for (const auto& [n, c] : coeffs_) {
      double ph = 0.0;
      for (int i = 0; i < dim_; ++i) ph += n[i] * theta[i];
      cd factor = std::polar(1.0, w * ph);
      for (std::size_t i = 0; i < beta.size(); ++i)
        for (int r = 0; r < beta[i]; ++r) factor *= cd(0.0, w * n[i]);
      acc = acc + c * factor;
    }
    return acc;
  }

  /// Real value at theta; throws if the imaginary residue exceeds 1e-10
  /// relative to the coefficient mass.
  value_type evaluate(const std::vector<double>& theta) const {
    T z = evaluate_complex(theta);
    if (Traits::imag_size(z) > 1e-10 * std::max(1.0, l1_norm()))
      throw std::domain_error("FourierSeries::evaluate: imaginary residue above 1e-10");
    return Traits::real_part(z);
  }

  FourierSeries operator+(const FourierSeries& o) const {
    check_compatible(o);
    FourierSeries r = *this;
    r.radius_ = std::max(radius_, o.radius_);
    for (const auto& [n, c] : o.coeffs_) r.coeffs_[n] = r.get(n) + c;
    return r;
  }
  FourierSeries operator-(const FourierSeries& o) const { return *this + o * -1.0; }
  FourierSeries operator*(double s) const {
    FourierSeries r = *this;
    for (auto& [n, c] : r.coeffs_) c = c * cd(s);
    return r;
  }

  /// Same series with a different declared radius; coefficients beyond it
  /// are dropped.
  FourierSeries with_radius(int radius) const {
    FourierSeries r(dim_, radius, half_period_);
    for (const auto& [n, c] : coeffs_)
      if (sup_norm(n) <= radius) r.coeffs_[n] = c;
    return r;
  }

  static Index negate(Index n) {
    for (int& v : n) v = -v;
    return n;
  }

 private:
  void check_index(const Index& n) const {
    if (static_cast<int>(n.size()) != dim_)
      throw std::invalid_argument("FourierSeries: index dimension mismatch");
    if (sup_norm(n) > radius_)
      throw std::invalid_argument("FourierSeries: |n| exceeds the truncation radius");
  }
  void check_compatible(const FourierSeries& o) const {
    if (o.dim_ != dim_ || o.half_period_ != half_period_)
      throw std::invalid_argument("FourierSeries: incompatible operands");
  }

  int dim_ = 1;
  int radius_ = 0;
  bool half_period_ = false;
  std::map<Index, T> coeffs_;
};

using ScalarSeries = FourierSeries<cd>;
using MatrixSeries = FourierSeries<CMat2>;

/// Free-function spelling of FourierSeries::evaluate.
template <class T>
typename FourierSeries<T>::value_type evaluate(const FourierSeries<T>& f,
                                               const std::vector<double>& theta) {
  return f.evaluate(theta);
}

/// C^k norm as a pair: a lower bound from a (4 N_max + 1)^d evaluation grid
/// of all partial derivatives of order <= k, and the coefficient bound
/// sum_n max_{j<=k} (2 pi |n| / p)^j ||c(n)||.
struct CkNorm {
  double lower = 0.0;
  double upper = 0.0;
};

template <class T>
CkNorm ck_norm(const FourierSeries<T>& f, int k);

/// Smoothed truncation to |n| <= j. Returns f unchanged when its support
/// already fits in |n| <= j; otherwise keeps |n| <= j with a raised-cosine
/// taper over the outermost ceil(j/8) shells.
template <class T>
FourierSeries<T> smooth_truncate(const FourierSeries<T>& f, int j);

/// Taper weight used by smooth_truncate for shell s <= j.
double taper_weight(int s, int j);

/// Convenience constructors.
ScalarSeries constant_series(int dim, double c);
/// Sum_k amps[k] cos(2 pi modes[k] theta) in d = 1.
ScalarSeries cosine_series(const std::vector<int>& modes, const std::vector<double>& amps,
                           int radius = -1);
/// 2 lambda cos(2 pi theta).
ScalarSeries amo_potential(double lambda);
/// eps * sum_{n=1..nmax} n^{-k} cos(2 pi n theta).
ScalarSeries ck_family(double eps, int k, int nmax, int radius = -1);

MatrixSeries constant_matrix_series(int dim, const Mat2& m, int radius = 0,
                                    bool half_period = false);
/// Entrywise embedding of a scalar series into one matrix slot.
MatrixSeries embed(const ScalarSeries& s, int row, int col);

// JSON interchange {dim, half_period, radius, coeffs:[{n:[..], re, im}]};
// matrix series use re/im as 4-element row-major arrays.
std::string to_json(const ScalarSeries& f, int indent = -1);
std::string to_json(const MatrixSeries& f, int indent = -1);
ScalarSeries scalar_series_from_json(const std::string& text);
MatrixSeries matrix_series_from_json(const std::string& text);

extern template CkNorm ck_norm(const ScalarSeries&, int);
extern template CkNorm ck_norm(const MatrixSeries&, int);
extern template ScalarSeries smooth_truncate(const ScalarSeries&, int);
extern template MatrixSeries smooth_truncate(const MatrixSeries&, int);

}  // namespace qps
