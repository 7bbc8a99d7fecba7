#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "kam_detail.hpp"
#include "qpspec/kam.hpp"

namespace qps {

using namespace detail;

ParabolicReduction parabolic_normal_form(const Mat2& H) {
  ParabolicReduction r;
  r.H = H;
  r.sign = H.trace() >= 0.0 ? 1 : -1;
  r.h = log_sl2(H * static_cast<double>(r.sign));
  Sl2 h = r.h;
  Mat2 G = Mat2::identity();
  double scale = std::max({std::abs(h.h), std::abs(h.e), std::abs(h.f)});
  if (scale == 0.0) {
    r.G = G;
    r.zeta = 0.0;
    return r;
  }
  if (std::abs(h.e) < 1e-3 * scale) {
    // kernel close to (0, 1): quarter turn first
    G = rotation(0.25);
    h = Sl2::from(G.inverse() * h.mat() * G);
  }
  // [[1, 0], [x, 1]] carries the kernel vector (1, x) of h to e_1
  double x = -h.h / h.e;
  G = G * Mat2{1.0, 0.0, x, 1.0};
  r.G = G;
  r.zeta = h.e;
  return r;
}

ParabolicReduction reduce_to_parabolic(const Cocycle& c, const Index& m, int k,
                                       const ParabolicOptions& opt) {
  const Frequency& freq = c.freq();
  if (static_cast<int>(m.size()) != c.dim())
    throw std::invalid_argument("reduce_to_parabolic: label dimension mismatch");
  double rho =
      rotation_number(c, std::vector<double>(c.dim(), 0.0), opt.rotation_iters).rho;
  double defect = dist_to_Z(2.0 * rho - freq.dot(m));
  if (defect > opt.rho_tol) {
    std::ostringstream os;
    os << "reduce_to_parabolic: 2 rho - <m, alpha> = " << defect << " mod Z exceeds " << opt.rho_tol;
    throw NotAtGapEdgeError(os.str());
  }
  if (opt.check_hyperbolicity &&
      uniform_hyperbolicity_test(c, 8, 400).verdict == Verdict::uniformly_hyperbolic)
    throw NotAtGapEdgeError("reduce_to_parabolic: cocycle is uniformly hyperbolic");

  KamState s = opt.continuation ? continuation_run(c, k, opt.kam)
                               : almost_reducibility_run(c, k, opt.kam);
  return parabolic_from_state(s, m, opt);
}

ParabolicReduction parabolic_from_state(const KamState& s, const Index& m,
                                        const ParabolicOptions& opt) {
  const Cocycle& c = s.input;
  const Frequency& freq = c.freq();
  if (s.deg_accum != m) {
    std::ostringstream os;
    os << "reduce_to_parabolic: resonances sum to (";
    for (std::size_t i = 0; i < s.deg_accum.size(); ++i) os << (i ? "," : "") << s.deg_accum[i];
    os << ") instead of the requested label";
    throw DegreeMismatchError(os.str());
  }
  if (s.norm() > std::max(1e-8, opt.kam.stop_tol))
    throw KamError("reduce_to_parabolic: run stopped before the perturbation vanished");
  if (std::abs(std::abs(s.A.trace()) - 2.0) > opt.parabolic_tol) {
    std::ostringstream os;
    os << "reduce_to_parabolic: constant has trace " << s.A.trace() << ", not parabolic";
    throw NotAtGapEdgeError(os.str());
  }

  ParabolicReduction r = parabolic_normal_form(s.A);
  r.state = s;
  r.X = s.B;
  r.X.push_constant(r.G);
  Mat2 target = Mat2{1.0, r.zeta, 0.0, 1.0} * static_cast<double>(r.sign);
  const int pts = c.dim() == 1 ? 256 : 16;
  Grid g{c.dim(), pts, false};
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto th = g.theta(i);
    Mat2 lhs = r.X.at(add(th, freq.alpha)).inverse() * c.at(th) * r.X.at(th);
    r.residual = std::max(r.residual, (lhs - target).norm());
  }
  return r;
}

EdgePolish polish_gap_edge(const ScalarSeries& V, const Frequency& freq, double E0, int k,
                           const KamOptions& opt, int max_iter) {
  EdgePolish r;
  r.state = continuation_run(Cocycle::schrodinger(V, E0, freq), k, opt);
  auto defect = [](const KamState& s) { return std::abs(s.A.trace()) - 2.0; };
  double Ea = E0, ga = defect(r.state);
  r.E = Ea;
  r.trace_defect = ga;
  if (ga == 0.0) return r;
  double Eb = E0 + 1e-8;
  KamState sb = almost_reducibility_run(rebase(r.state, Cocycle::schrodinger(V, Eb, freq), opt), k, opt);
  double gb = defect(sb);
  for (int it = 1; it <= max_iter; ++it) {
    r.iterations = it;
    if (std::abs(gb) < std::abs(ga)) {
      r.E = Eb;
      r.trace_defect = gb;
      r.state = sb;
    }
    if (std::abs(r.trace_defect) < 1e-14 || gb == ga || std::abs(Eb - Ea) < 1e-15) break;
    double Ec = Eb - gb * (Eb - Ea) / (gb - ga);
    KamState sc =
        almost_reducibility_run(rebase(sb, Cocycle::schrodinger(V, Ec, freq), opt), k, opt);
    Ea = Eb;
    ga = gb;
    Eb = Ec;
    gb = defect(sc);
    sb = std::move(sc);
  }
  r.state.input = Cocycle::schrodinger(V, r.E, freq);
  return r;
}

// ---- Moser-Poschel --------------------------------------------------------

double MoserPoschelData::d_direct(double dl) const {
  return (b0 - b1 * dl).det() + 0.25 * dl * dl * zeta * zeta * X11_sq * X11_sq;
}

MoserPoschelData moser_poschel_from_averages(double X11_sq, double X11_X12, double X12_sq,
                                             double zeta, double delta) {
  MoserPoschelData mp;
  mp.zeta = zeta;
  mp.delta = delta;
  mp.X11_sq = X11_sq;
  mp.X11_X12 = X11_X12;
  mp.X12_sq = X12_sq;
  mp.b0 = {0.0, zeta, 0.0};
  mp.b1 = {X11_X12 - 0.5 * zeta * X11_sq, -zeta * X11_X12 + X12_sq, -X11_sq};
  mp.d_linear = -X11_sq * zeta;
  mp.d_quadratic = mp.cauchy_schwarz();
  // 8 sum (2 pi m)^{-2} with the regularity gap fixed at 2
  mp.D_tau = 1.0 / 3.0;
  return mp;
}

namespace {

using Mat4c = Eigen::Matrix4cd;
using Vec4c = Eigen::Vector4cd;

bool canonical(const Index& n) {
  for (int v : n) {
    if (v > 0) return true;
    if (v < 0) return false;
  }
  return false;
}

}  // namespace

MoserPoschelData moser_poschel_step(const Conjugacy& X, double zeta, double delta,
                                    const Frequency& freq, const KamOptions& opt,
                                    bool enforce_guard) {
  if (!(zeta > 0.0 && zeta < 0.5))
    throw std::invalid_argument("moser_poschel_step: zeta must lie in (0, 1/2)");
  if (!(delta > 0.0)) throw std::invalid_argument("moser_poschel_step: delta must be > 0");
  const int d = X.dim();

  // averages over the double cover
  Grid g2{d, d == 1 ? 2 * opt.grid_points : 32, true};
  double s11 = 0, s1112 = 0, s12 = 0, xnorm = 0;
  for (std::size_t i = 0; i < g2.size(); ++i) {
    Mat2 M = X.at(g2.theta(i));
    s11 += M.a * M.a;
    s1112 += M.a * M.b;
    s12 += M.b * M.b;
    xnorm = std::max(xnorm, M.norm());
  }
  const double cnt = static_cast<double>(g2.size());
  MoserPoschelData mp = moser_poschel_from_averages(s11 / cnt, s1112 / cnt, s12 / cnt, zeta, delta);
  mp.X_norm = xnorm;
  mp.delta_guard = std::pow(freq.gamma, 3) / (mp.D_tau * xnorm * xnorm);
  mp.guard_ok = delta < mp.delta_guard;
  if (!mp.guard_ok && enforce_guard) {
    std::ostringstream os;
    os << "moser_poschel_step: delta " << delta << " violates the guard " << mp.delta_guard;
    throw GuardError(os.str());
  }
  mp.P1_norm_bound = 53.0 * mp.D_tau * mp.D_tau * std::pow(freq.gamma, -6) * std::pow(xnorm, 4) +
                     zeta * zeta * xnorm * xnorm / delta;

  // P(theta) and G = -delta B^{-1} P on T^d
  const Mat2 B{1.0, zeta, 0.0, 1.0};
  const Mat2 Bi = B.inverse();
  Grid g = kam_grid(d, opt);
  std::vector<Mat2> P(g.size()), G(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    Mat2 M = X.at(g.theta(i));
    double x11 = M.a, x12 = M.b;
    P[i] = {x11 * x12 - zeta * x11 * x11, -zeta * x11 * x12 + x12 * x12, -x11 * x11,
            -x11 * x12};
    G[i] = Sl2::from(Bi * P[i] * (-delta)).mat();
  }
  MatrixSeries Gs = analyze(G, g, g.points / 2 - 1, prune_level(B));

  // -Y(theta + alpha) B + B Y(theta) = B (G - [G]) mode by mode
  MatrixSeries Y(d, Gs.radius());
  auto vec = [](const CMat2& m) { return Vec4c(m.v[0], m.v[1], m.v[2], m.v[3]); };
  const CMat2 Bc(B);
  for (const auto& [n, c] : Gs.coeffs()) {
    if (!canonical(n)) continue;
    cd w = std::polar(1.0, kTwoPi * freq.dot(n));
    if (std::abs(w - 1.0) < opt.divisor_floor)
      throw DivisorError("moser_poschel_step: divisor below floor", n);
    Mat4c L;
    for (int j = 0; j < 4; ++j) {
      CMat2 E;
      E.v[j] = 1.0;
      L.col(j) = vec(Bc * E - E * Bc * w);
    }
    Vec4c y = L.partialPivLu().solve(vec(Bc * c));
    Y.set(n, CMat2(y(0), y(1), y(2), y(3)));
  }

  // P1 = (Xt(theta+alpha)^{-1} (B - delta P) Xt(theta) - exp(b0 - delta b1)) / delta^2
  auto E0 = exp_values(Y, g);
  auto E1 = exp_values(Y * -1.0, g, freq.alpha);
  const Mat2 base = exp_sl2(mp.b0 - mp.b1 * delta);
  for (std::size_t i = 0; i < g.size(); ++i) {
    Mat2 lhs = E1[i] * (B - P[i] * delta) * E0[i];
    mp.P1_norm = std::max(mp.P1_norm, (lhs - base).norm() / (delta * delta));
  }
  return mp;
}

GapEdgeBound gap_edge_bound(const MoserPoschelData& mp, double zeta) {
  GapEdgeBound r;
  if (zeta < 0.0) throw std::invalid_argument("gap_edge_bound: zeta must be >= 0");
  if (zeta == 0.0) {
    r.collapsed = true;
    r.failed.push_back("zeta = 0: gap collapsed");
    return r;
  }
  r.delta1 = std::exp((17.0 / 18.0) * std::log(zeta));
  r.predicted_gap_upper = r.delta1;
  const double cs = mp.cauchy_schwarz();
  const double ratio = cs > 0.0 ? mp.X11_sq / cs : std::numeric_limits<double>::infinity();
  r.hyp_ratio = cs > 0.0 && ratio > 0.0 && ratio <= 0.5 * std::pow(zeta, -r.kappa);
  r.hyp_cs = cs >= 8.0 * std::pow(zeta, 2.0 * r.kappa);
  if (!r.hyp_ratio) r.failed.push_back("[X11^2] / CS <= zeta^{-kappa} / 2");
  if (!r.hyp_cs) r.failed.push_back("CS >= 8 zeta^{2 kappa}");

  const Sl2 b0{0.0, zeta, 0.0};
  const Sl2 m = b0 - mp.b1 * r.delta1;
  r.det_value = m.det();
  r.det_bound = r.det_value >= 3.0 * zeta * zeta;
  if (!r.det_bound) r.failed.push_back("det(b0 - delta1 b1) >= 3 zeta^2");
  if (r.det_value > 0.0) {
    double sq = std::sqrt(r.det_value);
    double Pnorm_sq = 4.0 * m.norm() / sq;
    r.rotation_lower = sq - r.delta1 * r.delta1 * Pnorm_sq * mp.P1_norm;
    r.rotation_positive = r.rotation_lower > 0.0;
  } else {
    r.rotation_lower = 0.0;
    r.rotation_positive = false;
  }
  if (!r.rotation_positive) r.failed.push_back("rotation lower bound > 0");
  return r;
}

}  // namespace qps
