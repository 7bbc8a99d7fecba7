#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "kam_detail.hpp"
#include "qpspec/kam.hpp"

namespace qps {

namespace detail {

std::vector<double> add(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> r(a);
  for (std::size_t i = 0; i < r.size() && i < b.size(); ++i) r[i] += b[i];
  return r;
}

double prune_level(const Mat2& A) {
  double s = std::max(1.0, A.norm());
  return 16.0 * std::numeric_limits<double>::epsilon() * s * s;
}

MatrixSeries perturbation_from_values(const SL2& A_new, const std::vector<Mat2>& X,
                                      const Grid& g, const Mat2& A_scale) {
  Mat2 Ai = A_new.inverse();
  std::vector<Mat2> logs(X.size());
  for (std::size_t i = 0; i < X.size(); ++i) logs[i] = log_sl2(normalize_det(Ai * X[i])).mat();
  return analyze(logs, g, g.points / 2 - 1, prune_level(A_scale));
}

std::vector<Mat2> state_values(const SL2& A, const MatrixSeries& f, const Grid& g,
                               const std::vector<double>& shift) {
  auto vals = sample(f, g, shift);
  for (auto& v : vals) v = A * exp_sl2(Sl2::from(v));
  return vals;
}

std::vector<Mat2> exp_values(const MatrixSeries& Y, const Grid& g,
                             const std::vector<double>& shift) {
  auto vals = sample(Y, g, shift);
  for (auto& v : vals) v = exp_sl2(Sl2::from(v));
  return vals;
}

Sl2 mean_log(const SL2& A, const std::vector<Mat2>& X) {
  Mat2 Ai = A.inverse();
  Sl2 acc;
  for (const auto& x : X) acc = acc + log_sl2(normalize_det(Ai * x));
  return acc * (1.0 / static_cast<double>(X.size()));
}

std::optional<Index> active_resonance(const KamState& s, int N, double threshold) {
  EigenRho er = eigen_rho(s.A);
  if (er.kind != EigenRho::Kind::elliptic) return std::nullopt;
  const Frequency& freq = s.input.freq();
  auto site = detect_resonance(er.rho, freq, N, threshold);
  if (site) {
    double dist = dist_to_Z(2.0 * er.rho - freq.dot(*site));
    if (s.f.get(*site).norm() <= kTwoPi * dist * s.norm()) site.reset();
  }
  return site;
}

LedgerEntry finish_entry(LedgerEntry e, const KamState& s) {
  e.norm_after = s.norm();
  e.residual = conjugacy_residual(s);
  e.residual_tol = residual_tolerance(s);
  return e;
}

}  // namespace detail

using namespace detail;

// ---- constant matrices ----------------------------------------------------

EigenRho eigen_rho(const SL2& A) {
  EigenRho r;
  double t = A.trace();
  if (std::abs(std::abs(t) - 2.0) <= 1e-10) {
    r.kind = EigenRho::Kind::parabolic;
    r.rho = t > 0 ? 0.0 : 0.5;
  } else if (std::abs(t) < 2.0) {
    r.kind = EigenRho::Kind::elliptic;
    r.rho = std::acos(t / 2.0) / kTwoPi;
  } else {
    r.kind = EigenRho::Kind::hyperbolic;
    r.rho = t > 0 ? 0.0 : 0.5;
    r.growth = std::acosh(std::abs(t) / 2.0) / kTwoPi;
  }
  return r;
}

std::string to_string(EigenRho::Kind k) {
  switch (k) {
    case EigenRho::Kind::elliptic: return "elliptic";
    case EigenRho::Kind::parabolic: return "parabolic";
    default: return "hyperbolic";
  }
}

std::optional<Index> detect_resonance(double rho, const Frequency& freq, int N,
                                      double threshold) {
  if (!(threshold > 0.0)) throw std::invalid_argument("detect_resonance: threshold must be > 0");
  if (N < 1) throw std::invalid_argument("detect_resonance: N must be >= 1");
  std::optional<Index> best;
  double best_d = std::numeric_limits<double>::infinity();
  int hits = 0;
  for (const Index& n : index_ball(freq.dim(), N)) {
    if (sup_norm(n) == 0) continue;
    double d = dist_to_Z(2.0 * rho - freq.dot(n));
    if (d < threshold) ++hits;
    if (d < best_d) {
      best_d = d;
      best = n;
    }
  }
  if (hits > 1) {
    std::ostringstream os;
    os << "detect_resonance: " << hits << " sites below threshold " << threshold
       << " within |n| <= " << N;
    throw WindowError(os.str());
  }
  if (best_d < threshold) return best;
  return std::nullopt;
}

Sl2 bch_log_product(const Sl2& S, const Sl2& L, int order) {
  if (order != 2 && order != 3) throw std::invalid_argument("bch_log_product: order must be 2 or 3");
  if (S.norm() + L.norm() > 0.5) throw GuardError("bch_log_product: ||S|| + ||L|| > 0.5");
  Sl2 SL = bracket(S, L);
  Sl2 r = S + L + SL * 0.5;
  if (order == 3) r = r + (bracket(S, SL) + bracket(L, bracket(L, S))) * (1.0 / 12.0);
  return r;
}

// ---- conjugacies ----------------------------------------------------------

void Conjugacy::push_constant(const Mat2& M) {
  Factor f;
  f.kind = Factor::Kind::constant;
  f.M = M;
  factors_.push_back(std::move(f));
}

void Conjugacy::push_exp(const MatrixSeries& Y) {
  if (Y.empty()) return;
  Factor f;
  f.kind = Factor::Kind::exp_series;
  f.Y = Y;
  factors_.push_back(std::move(f));
}

void Conjugacy::push_rotation(const Index& n) {
  if (qps::sup_norm(n) == 0) return;
  Factor f;
  f.kind = Factor::Kind::half_rotation;
  f.n = n;
  factors_.push_back(std::move(f));
}

void Conjugacy::append(const Conjugacy& other) {
  for (const auto& f : other.factors_) factors_.push_back(f);
}

Mat2 Conjugacy::at(const std::vector<double>& theta) const {
  Mat2 M = Mat2::identity();
  for (const auto& f : factors_) {
    switch (f.kind) {
      case Factor::Kind::constant:
        M = M * f.M;
        break;
      case Factor::Kind::exp_series:
        M = M * exp_sl2(Sl2::from(f.Y.evaluate(theta)));
        break;
      case Factor::Kind::half_rotation: {
        double ph = 0.0;
        for (std::size_t i = 0; i < theta.size(); ++i) ph += f.n[i] * theta[i];
        M = M * rotation(0.5 * ph);
        break;
      }
      case Factor::Kind::series:
        M = M * f.Y.evaluate(theta);
        break;
    }
  }
  return M;
}

Index Conjugacy::degree() const {
  Index d = deg_offset_.empty() ? Index(dim_, 0) : deg_offset_;
  for (const auto& f : factors_)
    if (f.kind == Factor::Kind::half_rotation)
      for (int i = 0; i < dim_; ++i) d[i] += f.n[i];
  return d;
}

double Conjugacy::sup_norm(int points_per_dim) const {
  Grid g{dim_, points_per_dim, true};
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) s = std::max(s, at(g.theta(i)).norm());
  return s;
}

MatrixSeries Conjugacy::to_series(int radius) const {
  int pts = 2 * radius + 2;
  if (dim_ == 1) pts = std::max(pts, 256);
  Grid g{dim_, pts, true};
  std::vector<Mat2> vals(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) vals[i] = at(g.theta(i));
  return analyze(vals, g, radius, 1e-15);
}

double Conjugacy::compress(int radius, double tol) {
  if (factors_.size() <= 1) return 0.0;
  MatrixSeries S = to_series(radius);
  Grid g{dim_, dim_ == 1 ? 2 * radius + 2 : std::max(8, radius), true};
  std::vector<double> shift(dim_, g.period() / (2.0 * g.points));
  double err = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto th = g.theta(i);
    for (int j = 0; j < dim_; ++j) th[j] += shift[j];
    err = std::max(err, (S.evaluate(th) - at(th)).norm());
  }
  if (err > tol) return err;
  Index d = degree();
  Factor f;
  f.kind = Factor::Kind::series;
  f.Y = std::move(S);
  factors_.assign(1, std::move(f));
  deg_offset_ = d;
  return err;
}

// ---- state ----------------------------------------------------------------

SL2 KamState::at(const std::vector<double>& theta) const {
  return A * exp_sl2(Sl2::from(f.evaluate(theta)));
}

Grid kam_grid(int dim, const KamOptions& opt) {
  int pts = dim == 1 ? opt.grid_points : dim == 2 ? std::max(32, opt.grid_points / 4) : 16;
  return Grid{dim, pts, false};
}

KamState initial_state(const Cocycle& c, const KamOptions& opt) {
  const int d = c.dim();
  Grid g = kam_grid(d, opt);
  const int R = g.points / 2 - 1;
  KamState s;
  s.input = c;
  s.B = Conjugacy(d);
  s.deg_accum = Index(d, 0);
  const Index zero(d, 0);
  switch (c.kind()) {
    case Cocycle::Kind::schrodinger: {
      const ScalarSeries& V = c.potential();
      if (V.support_radius() > R) throw GuardError("initial_state: potential exceeds grid radius");
      double v0 = V.get(zero).real();
      s.A = {c.energy() - v0, -1.0, 1.0, 0.0};
      ScalarSeries v = V.with_radius(R);
      v.erase(zero);
      // [[E - V, -1], [1, 0]] = A exp([[0, 0], [V - v0, 0]]) exactly
      s.f = embed(v, 1, 0);
      break;
    }
    case Cocycle::Kind::kam_form:
      if (c.series().support_radius() > R)
        throw GuardError("initial_state: perturbation exceeds grid radius");
      s.A = c.constant_part();
      s.f = c.series().with_radius(R);
      break;
    default: {
      std::vector<Mat2> vals(g.size());
      Mat2 mean = Mat2::zero();
      for (std::size_t i = 0; i < g.size(); ++i) {
        vals[i] = c.at(g.theta(i));
        mean += vals[i];
      }
      s.A = normalize_det(mean / static_cast<double>(g.size()));
      s.f = perturbation_from_values(s.A, vals, g, s.A);
    }
  }
  return s;
}

double conjugacy_residual(const KamState& s, int points) {
  const int d = s.input.dim();
  int pts = d == 1 ? points : d == 2 ? 16 : 8;
  double worst = 0.0;
  Grid g{d, pts, false};
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto th = g.theta(i);
    for (double& t : th) t += 0.5 / pts;
    auto tha = add(th, s.input.freq().alpha);
    Mat2 lhs = s.B.at(tha).inverse() * s.input.at(th) * s.B.at(th);
    worst = std::max(worst, (lhs - s.at(th)).norm());
  }
  return worst;
}

double residual_tolerance(const KamState& s) {
  double b = s.B.factors().empty() ? 1.0 : s.B.sup_norm(64);
  return 1e-7 * (1.0 + b * b);
}

// ---- homological equation -------------------------------------------------

namespace {

using Vec3c = Eigen::Vector3cd;
using Mat3c = Eigen::Matrix3cd;

Vec3c coords(const CMat2& m) { return {m(0, 0), m(0, 1), m(1, 0)}; }
CMat2 from_coords(const Vec3c& v) { return {v(0), v(1), v(2), -v(0)}; }

// X -> A^{-1} X A on sl2 in (h, e, f) coordinates
Eigen::Matrix3d ad_inverse(const SL2& A) {
  Mat2 Ai = A.inverse();
  const Sl2 basis[3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  Eigen::Matrix3d M;
  for (int j = 0; j < 3; ++j) {
    Sl2 img = Sl2::from(Ai * basis[j].mat() * A);
    M(0, j) = img.h;
    M(1, j) = img.e;
    M(2, j) = img.f;
  }
  return M;
}

bool canonical(const Index& n) {
  for (int v : n) {
    if (v > 0) return true;
    if (v < 0) return false;
  }
  return false;
}

std::string fmt(const Index& n) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < n.size(); ++i) os << (i ? "," : "") << n[i];
  os << ")";
  return os.str();
}

// Y with A^{-1} Y(theta + alpha) A - Y(theta) = -(f - mean) on 0 < |n| <= N.
MatrixSeries solve_homological(const SL2& A, const MatrixSeries& f, const Frequency& freq,
                               int N, double floor) {
  MatrixSeries Y(f.dim(), f.radius());
  Eigen::Matrix3d Ad = ad_inverse(A);
  cd disc = std::sqrt(cd(A.trace() * A.trace() - 4.0));
  cd mu = 0.5 * (cd(A.trace()) + disc);
  const cd eig[3] = {cd(1.0), mu * mu, 1.0 / (mu * mu)};
  for (const auto& [n, c] : f.coeffs()) {
    if (!canonical(n) || sup_norm(n) > N) continue;
    cd w = std::polar(1.0, kTwoPi * freq.dot(n));
    double smallest = std::numeric_limits<double>::infinity();
    for (const cd& e : eig) smallest = std::min(smallest, std::abs(w * e - 1.0));
    if (smallest < floor)
      throw DivisorError("homological equation: divisor below floor at n=" + fmt(n), n);
    Mat3c M = w * Ad.cast<cd>() - Mat3c::Identity();
    Vec3c y = M.partialPivLu().solve(coords(c));
    Y.set(n, from_coords(y));
  }
  return Y;
}

}  // namespace

KamState nonresonant_step(const KamState& s, int N, double threshold, const KamOptions& opt) {
  const Frequency& freq = s.input.freq();
  EigenRho er = eigen_rho(s.A);
  if (active_resonance(s, N, threshold))
    throw KamError("nonresonant_step: constant is resonant within the window");
  const double before = s.norm();
  if (before > opt.step_guard) throw GuardError("nonresonant_step: perturbation above step guard");

  LedgerEntry e;
  e.kind = "nonresonant";
  e.norm_before = before;
  e.rho = er.rho;
  e.window = N;
  e.threshold = threshold;

  KamState t = s;
  if (before == 0.0) {
    t.ledger.push_back(finish_entry(e, t));
    return t;
  }
  Grid g = kam_grid(freq.dim(), opt);
  const double target = std::max(before * before, opt.stop_tol);
  double last = before;
  for (int it = 0; it < opt.max_inner; ++it) {
    MatrixSeries Y = solve_homological(t.A, t.f, freq, N, opt.divisor_floor);
    auto F = state_values(t.A, t.f, g);
    if (!Y.empty()) {
      auto E0 = exp_values(Y, g);
      auto E1 = exp_values(Y * -1.0, g, freq.alpha);
      for (std::size_t i = 0; i < F.size(); ++i) F[i] = E1[i] * F[i] * E0[i];
    }
    SL2 A_new = normalize_det(t.A * exp_sl2(mean_log(t.A, F)));
    MatrixSeries f_new = perturbation_from_values(A_new, F, g, A_new);
    double now = f_new.l1_norm();
    if (it > 0 && now >= last) break;  // no further gain from this window
    t.B.push_exp(Y);
    t.A = A_new;
    t.f = f_new;
    e.inner_iterations = it + 1;
    last = now;
    if (now <= target) break;
  }
  t.ledger.push_back(finish_entry(e, t));
  return t;
}

KamState resonant_step(const KamState& s, const Index& n_star, int N, const KamOptions& opt) {
  const Frequency& freq = s.input.freq();
  EigenRho er = eigen_rho(s.A);
  if (er.kind != EigenRho::Kind::elliptic)
    throw NotEllipticError("resonant_step: constant is not elliptic");
  const SL2& A = s.A;

  // A P = P R_phi with phi = sign(c) rho
  const double sgn = A.c > 0 ? 1.0 : -1.0;
  const double phi = sgn * er.rho;
  const double cs = std::cos(kTwoPi * phi), sn = std::sin(kTwoPi * phi);
  Mat2 P{cs - A.d, -sn, A.c, 0.0};
  P = P / std::sqrt(std::abs(P.det()));
  double P_guard = 2.0 * std::sqrt(2.0 * A.norm() / er.rho);
  if (P.norm() > P_guard) throw GuardError("resonant_step: diagonalising matrix above guard");
  Index n_eff = n_star;
  if (sgn < 0)
    for (int& v : n_eff) v = -v;

  LedgerEntry e;
  e.kind = "resonant";
  e.norm_before = s.norm();
  e.rho = er.rho;
  e.window = N;
  e.n_star = n_eff;

  // perturbation in the rotation frame
  const Mat2 Pi = P.inverse();
  MatrixSeries f1(s.f.dim(), s.f.radius());
  for (const auto& [n, c] : s.f.coeffs()) f1.set_raw(n, CMat2(Pi) * c * CMat2(P));

  // eigenbasis of X -> R_{-phi} X R_phi: J and W = K1 +- i K2
  const Mat2 R = rotation(phi), Ri = rotation(-phi);
  const CMat2 Wp(cd(1), cd(0, 1), cd(0, 1), cd(-1));
  const CMat2 Wm = Wp.conj();
  const cd mu_p = (CMat2(Ri) * Wp * CMat2(R))(0, 0);
  const cd mu_m = std::conj(mu_p);
  auto split = [](const CMat2& c) {
    // c = aJ J + ap Wp + am Wm with J = [[0,-1],[1,0]]
    cd h = c(0, 0), ee = c(0, 1), ff = c(1, 0);
    cd aJ = 0.5 * (ff - ee);
    cd sym = 0.5 * (ee + ff);  // = i (ap - am)
    cd ap = 0.5 * (h - cd(0, 1) * sym);
    cd am = 0.5 * (h + cd(0, 1) * sym);
    return std::array<cd, 3>{aJ, ap, am};
  };
  const CMat2 Jm(cd(0), cd(-1), cd(1), cd(0));

  MatrixSeries Y(f1.dim(), f1.radius());
  Index neg(n_eff);
  for (int& v : neg) v = -v;
  for (const auto& [n, c] : f1.coeffs()) {
    if (sup_norm(n) > N) continue;
    cd w = std::polar(1.0, kTwoPi * freq.dot(n));
    auto a = split(c);
    cd div[3] = {w - 1.0, w * mu_p - 1.0, w * mu_m - 1.0};
    bool keep[3] = {sup_norm(n) == 0, false, false};
    if (n == n_eff || n == neg) {
      int k = std::abs(div[1]) < std::abs(div[2]) ? 1 : 2;
      keep[k] = true;
    }
    cd y[3] = {0, 0, 0};
    for (int k = 0; k < 3; ++k) {
      if (keep[k] || a[k] == cd(0)) continue;
      if (std::abs(div[k]) < opt.divisor_floor)
        throw DivisorError("resonant_step: divisor below floor at n=" + fmt(n), n);
      y[k] = a[k] / div[k];
    }
    CMat2 yc = Jm * y[0] + Wp * y[1] + Wm * y[2];
    if (yc.norm() > 0.0) Y.set_raw(n, yc);
  }

  // new constant: R_{phi'} with phi' = phi - <n,alpha>/2 = k/2 + nu
  const double phi_new = phi - 0.5 * freq.dot(n_eff);
  const double kk = std::nearbyint(2.0 * phi_new);
  const double nu = phi_new - 0.5 * kk;
  const double sign = std::fmod(std::abs(kk), 2.0) == 1.0 ? -1.0 : 1.0;

  Grid g = kam_grid(freq.dim(), opt);
  auto F = state_values(A, s.f, g);
  auto E0 = exp_values(Y, g);
  auto E1 = exp_values(Y * -1.0, g, freq.alpha);
  std::vector<Mat2> X(F.size());
  for (std::size_t i = 0; i < F.size(); ++i) {
    auto th = g.theta(i);
    double ph0 = 0.0, ph1 = 0.0;
    for (int q = 0; q < freq.dim(); ++q) {
      ph0 += n_eff[q] * th[q];
      ph1 += n_eff[q] * (th[q] + freq.alpha[q]);
    }
    Mat2 C0 = P * E0[i] * rotation(0.5 * ph0);
    Mat2 C1i = rotation(-0.5 * ph1) * E1[i] * Pi;
    X[i] = C1i * F[i] * C0;
  }
  Sl2 S = rotation_generator() * (kTwoPi * nu);
  Sl2 L = mean_log(rotation(nu) * sign, X);
  SL2 A_new;
  if (S.norm() + L.norm() <= 0.5) {
    A_new = exp_sl2(bch_log_product(S, L, 3)) * sign;
    e.bch_defect = (A_new - exp_sl2(S) * exp_sl2(L) * sign).norm();
  } else {
    A_new = exp_sl2(S) * exp_sl2(L) * sign;
  }
  A_new = normalize_det(A_new);

  KamState t = s;
  t.A = A_new;
  t.f = perturbation_from_values(A_new, X, g, A_new);
  t.B.push_constant(P);
  t.B.push_exp(Y);
  t.B.push_rotation(n_eff);
  for (int q = 0; q < freq.dim(); ++q) t.deg_accum[q] += n_eff[q];
  t.resonant_sites.push_back(n_eff);
  e.inner_iterations = 1;
  t.ledger.push_back(finish_entry(e, t));
  return t;
}

}  // namespace qps
