#include <algorithm>
#include <cmath>
#include <limits>

#include "kam_detail.hpp"
#include "qpspec/kam.hpp"

namespace qps {

namespace {

double schedule_value(const KamOptions& opt, int j, int cap) {
  if (!opt.schedule.empty()) {
    std::size_t i = std::min<std::size_t>(j - 1, opt.schedule.size() - 1);
    return std::min(opt.schedule[i], cap);
  }
  // l_j = M^{2^{j-1}}, saturated at the cap before it overflows
  double l = opt.schedule_M;
  for (int i = 1; i < j && l < cap; ++i) l *= l;
  return std::min<double>(l, cap);
}

}  // namespace

KamState almost_reducibility_run(const Cocycle& c, int k, const KamOptions& opt) {
  return almost_reducibility_run(initial_state(c, opt), k, opt);
}

KamState almost_reducibility_run(KamState s, int k, const KamOptions& opt) {
  if (k < 1) throw std::invalid_argument("almost_reducibility_run: k must be >= 1");
  const Frequency& freq = s.input.freq();
  const double start = s.norm();
  if (start <= opt.stop_tol) return s;
  if (start > opt.start_guard)
    throw GuardError("almost_reducibility_run: starting perturbation above guard");
  const int cap = kam_grid(freq.dim(), opt).points / 2 - 1;

  KamOptions step_opt = opt;
  step_opt.step_guard = std::max(opt.step_guard, opt.start_guard);
  int growth = 0;
  for (int j = 1; j <= opt.max_steps; ++j) {
    const double eps = s.norm();
    if (eps <= opt.stop_tol) break;
    double lj = schedule_value(opt, j, cap);
    double lnext = schedule_value(opt, j + 1, cap);
    double N_formula = lnext > lj ? 2.0 * std::abs(std::log(eps)) / (1.0 / lj - 1.0 / lnext)
                                  : std::numeric_limits<double>::infinity();
    int N = static_cast<int>(std::max(1.0, std::min({N_formula, lj, double(cap)})));
    // eps^sigma alone flags every mode at desk scale
    double eta = std::min(std::pow(eps, opt.sigma), freq.gamma / (2.0 * std::pow(N, freq.tau)));

    std::optional<Index> site = detail::active_resonance(s, N, eta);
    KamState next = site ? resonant_step(s, *site, N, step_opt)
                         : nonresonant_step(s, N, eta, step_opt);
    next.ledger.back().threshold = eta;
    double after = next.norm();
    growth = after >= eps ? growth + 1 : 0;
    s = std::move(next);
    if (growth >= 2)
      throw DivergenceError("almost_reducibility_run: perturbation grew twice in a row", s);
  }
  return s;
}

KamState rebase(const KamState& s, const Cocycle& c, const KamOptions& opt) {
  const Grid g = kam_grid(c.dim(), opt);
  const auto& alpha = c.freq().alpha;
  std::vector<Mat2> X(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto th = g.theta(i);
    X[i] = s.B.at(detail::add(th, alpha)).inverse() * c.at(th) * s.B.at(th);
  }
  KamState r = s;
  r.input = c;
  r.f = detail::perturbation_from_values(s.A, X, g, s.A);
  return r;
}

KamState continuation_run(const Cocycle& c, int k, const KamOptions& opt) {
  const KamState s0 = initial_state(c, opt);
  const double full = s0.norm();
  if (full <= opt.start_guard) return almost_reducibility_run(s0, k, opt);
  const Frequency& freq = c.freq();

  KamState cur = s0;
  cur.f = MatrixSeries(freq.dim(), s0.f.radius());
  double t = 0.0;
  double dt = 0.5 * opt.start_guard / full;
  const double dt_min = 1e-6;
  const int compress_radius = freq.dim() == 1 ? 2 * opt.grid_points - 1 : 15;
  while (t < 1.0) {
    if (dt < dt_min)
      throw KamError("continuation_run: step in the coupling fell below 1e-6 at t = " +
                     std::to_string(t));
    const double tn = std::min(1.0, t + dt);
    KamState trial = rebase(cur, Cocycle::kam_form(s0.A, s0.f * tn, freq), opt);
    if (trial.norm() > opt.start_guard) {
      dt *= 0.5;
      continue;
    }
    try {
      cur = almost_reducibility_run(std::move(trial), k, opt);
    } catch (const KamError&) {
      dt *= 0.5;
      continue;
    }
    cur.B.compress(compress_radius, 1e-12 * std::max(1.0, std::pow(cur.B.sup_norm(64), 2)));
    t = tn;
    dt *= 1.5;
  }
  cur.input = c;
  return cur;
}

}  // namespace qps
