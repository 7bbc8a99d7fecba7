#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qpspec/cocycle.hpp"
#include "qpspec/grid.hpp"
#include "qpspec/rotnum.hpp"

namespace qps {

// ---- errors ---------------------------------------------------------------

struct KamError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DivisorError : KamError {
  Index n;
  DivisorError(const std::string& msg, Index mode) : KamError(msg), n(std::move(mode)) {}
};
struct WindowError : KamError {  ///< two resonant sites in one window
  using KamError::KamError;
};
struct GuardError : KamError {
  using KamError::KamError;
};
struct NotEllipticError : KamError {
  using KamError::KamError;
};
struct DegreeMismatchError : KamError {
  using KamError::KamError;
};
struct NotAtGapEdgeError : KamError {
  using KamError::KamError;
};

// ---- constant matrices ----------------------------------------------------

struct EigenRho {
  enum class Kind { elliptic, parabolic, hyperbolic };
  Kind kind = Kind::elliptic;
  double rho = 0.0;     ///< (0, 1/2) elliptic; 0 or 1/2 otherwise, by sign of the trace
  double growth = 0.0;  ///< acosh(|tr|/2) / (2 pi) for hyperbolic matrices
};

EigenRho eigen_rho(const SL2& A);
std::string to_string(EigenRho::Kind k);

/// n with 0 < |n| <= N minimising dist(2 rho - <n,alpha>, Z), if below threshold.
std::optional<Index> detect_resonance(double rho, const Frequency& freq, int N,
                                      double threshold);

/// S + L + [S,L]/2 (+ ([S,[S,L]] + [L,[L,S]])/12 for order 3).
Sl2 bch_log_product(const Sl2& S, const Sl2& L, int order = 3);

// ---- conjugacies ----------------------------------------------------------

/// Product of factors F_1(theta) ... F_k(theta) on 2T^d, each a constant
/// matrix, exp(Y(theta)) with Y an sl2 series on T^d, or R_{<n,theta>/2}.
class Conjugacy {
 public:
  struct Factor {
    enum class Kind { constant, exp_series, half_rotation, series };
    Kind kind = Kind::constant;
    Mat2 M = Mat2::identity();
    MatrixSeries Y;  ///< exponent, or the matrix itself (on 2T^d) for series
    Index n;
  };

  Conjugacy() = default;
  explicit Conjugacy(int dim) : dim_(dim) {}

  int dim() const { return dim_; }
  const std::vector<Factor>& factors() const { return factors_; }

  void push_constant(const Mat2& M);
  void push_exp(const MatrixSeries& Y);
  void push_rotation(const Index& n);
  void append(const Conjugacy& other);

  /// theta is taken literally (no reduction), so B(theta + alpha) is at(theta + alpha).
  Mat2 at(const std::vector<double>& theta) const;
  Index degree() const;  ///< sum of the half-rotation indices
  double sup_norm(int points_per_dim = 256) const;  ///< over 2T^d
  MatrixSeries to_series(int radius) const;         ///< DFT on 2T^d

  /// Replaces all factors by to_series(radius) when that reproduces the
  /// product within tol on an offset grid; the degree is kept. Returns the
  /// measured error.
  double compress(int radius, double tol);

 private:
  int dim_ = 1;
  std::vector<Factor> factors_;
  Index deg_offset_;  ///< degree of factors folded away by compress
};

// ---- state ----------------------------------------------------------------

struct LedgerEntry {
  std::string kind;  ///< "nonresonant" | "resonant"
  double norm_before = 0.0;
  double norm_after = 0.0;
  double rho = 0.0;  ///< of the constant before the step
  int window = 0;
  double threshold = 0.0;
  std::optional<Index> n_star;
  int inner_iterations = 0;
  double residual = 0.0;
  double residual_tol = 0.0;
  double bch_defect = 0.0;  ///< resonant steps only
};

struct KamState {
  Cocycle input;  ///< the cocycle being reduced
  SL2 A;
  MatrixSeries f;  ///< sl2-valued, on T^d
  Conjugacy B;
  Index deg_accum;
  std::vector<Index> resonant_sites;
  std::vector<LedgerEntry> ledger;

  double norm() const { return f.l1_norm(); }
  SL2 at(const std::vector<double>& theta) const;  ///< A exp(f(theta))
};

struct KamOptions {
  int grid_points = 256;        ///< per dimension for d = 1; shrinks with d
  double divisor_floor = 1e-12;
  double step_guard = 1e-2;     ///< largest perturbation a step accepts
  double start_guard = 1e-2;    ///< largest perturbation a run accepts
  double stop_tol = 1e-12;
  int max_steps = 20;
  int max_inner = 8;
  int schedule_M = 10;
  double sigma = 0.1;
  std::vector<int> schedule;    ///< explicit l_j; empty = M^{2^{j-1}}
};

/// Splits the cocycle as A exp(f): exact for the Schrodinger and KAM forms,
/// log of A^{-1} M(theta) on the grid otherwise.
KamState initial_state(const Cocycle& c, const KamOptions& opt = {});

/// Grid on which every residual and perturbation is evaluated.
Grid kam_grid(int dim, const KamOptions& opt);

/// max over a 256-point grid (shifted by half a cell) of
/// ||B(theta+alpha)^{-1} M(theta) B(theta) - A exp(f(theta))||.
double conjugacy_residual(const KamState& s, int points = 256);
/// 1e-7 (1 + ||B||^2)
double residual_tolerance(const KamState& s);

KamState nonresonant_step(const KamState& s, int N, double threshold,
                          const KamOptions& opt = {});
KamState resonant_step(const KamState& s, const Index& n_star, int N,
                       const KamOptions& opt = {});

struct DivergenceError : KamError {
  KamState state;
  DivergenceError(const std::string& msg, KamState s) : KamError(msg), state(std::move(s)) {}
};

KamState almost_reducibility_run(const Cocycle& c, int k, const KamOptions& opt = {});
KamState almost_reducibility_run(KamState s, int k, const KamOptions& opt = {});

/// Same result for starting perturbations above start_guard: runs the family
/// A exp(t f), t from 0 to 1, re-basing each stage on the previous conjugacy
/// so that every stage starts below the guard.
KamState continuation_run(const Cocycle& c, int k, const KamOptions& opt = {});

/// s with input c and f recomputed from c and the conjugacy s.B.
KamState rebase(const KamState& s, const Cocycle& c, const KamOptions& opt = {});

// ---- gap edges ------------------------------------------------------------

struct ParabolicReduction {
  KamState state;     ///< KAM run; state.B is the conjugacy before the endgame
  Mat2 H;             ///< constant reached by the run
  int sign = 1;       ///< H = sign * exp(h)
  Sl2 h;
  Mat2 G;             ///< constant with G^{-1} h G = [[0, zeta], [0, 0]]
  Conjugacy X;        ///< state.B followed by G
  double zeta = 0.0;
  double residual = 0.0;  ///< of X against sign * [[1, zeta], [0, 1]]
};

struct ParabolicOptions {
  KamOptions kam;
  double rho_tol = 1e-3;        ///< on dist(2 rho - <m,alpha>, Z)
  double parabolic_tol = 1e-4;  ///< on | |tr H| - 2 |
  long rotation_iters = 100000;
  bool check_hyperbolicity = true;
  bool continuation = true;  ///< continuation_run instead of a single run
};

/// m follows the rotation convention 2 rho = <m, alpha> mod Z.
ParabolicReduction reduce_to_parabolic(const Cocycle& c, const Index& m, int k,
                                       const ParabolicOptions& opt = {});

struct EdgePolish {
  double E = 0.0;
  double trace_defect = 0.0;  ///< |tr A| - 2 of the reduced constant at E
  int iterations = 0;
  KamState state;
};

/// Secant search near E0 for the energy where the reduced constant is
/// exactly parabolic (|tr| = 2). Each evaluation re-bases the previous
/// conjugacy, so only the first one pays for a full run.
EdgePolish polish_gap_edge(const ScalarSeries& V, const Frequency& freq, double E0, int k,
                           const KamOptions& opt = {}, int max_iter = 40);

/// Degree and parabolicity checks plus the endgame on a finished run
/// (state.input is the cocycle being reduced).
ParabolicReduction parabolic_from_state(const KamState& s, const Index& m,
                                        const ParabolicOptions& opt = {});

/// Endgame on a constant near-parabolic H.
ParabolicReduction parabolic_normal_form(const Mat2& H);

struct MoserPoschelData {
  double zeta = 0.0;
  double delta = 0.0;
  Sl2 b0;
  Sl2 b1;
  double X11_sq = 0.0;    ///< [X11^2]
  double X11_X12 = 0.0;   ///< [X11 X12]
  double X12_sq = 0.0;    ///< [X12^2]
  double X_norm = 0.0;    ///< sup over 2T^d
  double d_linear = 0.0;  ///< d(delta) = d_linear delta + d_quadratic delta^2
  double d_quadratic = 0.0;
  double D_tau = 0.0;
  double delta_guard = 0.0;
  double P1_norm = 0.0;        ///< measured on the grid
  double P1_norm_bound = 0.0;  ///< 53 D^2 gamma^-6 |X|^4 + zeta^2 |X|^2 / delta
  bool guard_ok = true;        ///< delta < delta_guard

  double cauchy_schwarz() const { return X11_sq * X12_sq - X11_X12 * X11_X12; }
  double d_of_delta(double dl) const { return d_linear * dl + d_quadratic * dl * dl; }
  /// det(b0 - dl b1) + dl^2 zeta^2 [X11^2]^2 / 4 from the matrices themselves
  double d_direct(double dl) const;
};

/// b1 and d(delta) from the three averages alone (no series needed).
MoserPoschelData moser_poschel_from_averages(double X11_sq, double X11_X12, double X12_sq,
                                             double zeta, double delta);

/// Full step: averages of X on 2T^d, the one-step cohomological solve and
/// the measured remainder P1. With enforce_guard false a violated delta
/// guard is only recorded in guard_ok.
MoserPoschelData moser_poschel_step(const Conjugacy& X, double zeta, double delta,
                                    const Frequency& freq, const KamOptions& opt = {},
                                    bool enforce_guard = true);

struct GapEdgeBound {
  double delta1 = 0.0;
  double kappa = 1.0 / 18.0;
  bool hyp_ratio = false;   ///< 0 < [X11^2]/CS <= zeta^{-kappa}/2
  bool hyp_cs = false;      ///< CS >= 8 zeta^{2 kappa}
  bool det_bound = false;   ///< det(b0 - delta1 b1) >= 3 zeta^2
  double det_value = 0.0;
  double rotation_lower = 0.0;  ///< sqrt(det) - delta1^2 |P|^2 |P1|
  bool rotation_positive = false;
  double predicted_gap_upper = 0.0;
  bool collapsed = false;
  std::vector<std::string> failed;
};

GapEdgeBound gap_edge_bound(const MoserPoschelData& mp, double zeta);

}  // namespace qps
