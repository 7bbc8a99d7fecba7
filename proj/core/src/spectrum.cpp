#include "qpspec/spectrum.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "qpspec/cocycle.hpp"
#include "qpspec/rotnum.hpp"

namespace qps {

TruncatedOperator truncate(const ScalarSeries& V, const Frequency& freq,
                           const std::vector<double>& theta, int L) {
  if (L < 0) throw std::invalid_argument("truncate: L must be >= 0");
  TruncatedOperator H;
  H.L = L;
  H.diag.resize(2 * L + 1);
  for (int n = -L; n <= L; ++n) H.diag[n + L] = V.evaluate(translate(theta, freq, n));
  return H;
}

int eigen_count_below(const TruncatedOperator& H, double E) {
  double scale = 2.0;
  for (double v : H.diag) scale = std::max(scale, std::abs(v));
  const double tiny = 1e-300 * scale;
  // closed inequality: nudge E up by a relative 2^-50
  const double shift = E + std::abs(E) * std::ldexp(1.0, -50);
  int count = 0;
  double q = 1.0;
  for (std::size_t i = 0; i < H.diag.size(); ++i) {
    q = (H.diag[i] - shift) - (i == 0 ? 0.0 : 1.0 / q);
    if (q == 0.0) q = -tiny;
    if (q < 0.0) ++count;
  }
  return count;
}

std::vector<double> eigenvalues(const TruncatedOperator& H) {
  std::vector<double> d = H.diag;
  std::vector<double> e(d.size() > 1 ? d.size() - 1 : 1, 1.0);
  lapack_int info = LAPACKE_dsterf(static_cast<lapack_int>(d.size()), d.data(), e.data());
  if (info != 0) throw std::runtime_error("eigenvalues: dsterf failed");
  return d;
}

double ids(const ScalarSeries& V, const Frequency& freq, double E, int L, int phases) {
  if (L < 100) throw std::invalid_argument("ids: L must be >= 100");
  if (phases < 1) throw std::invalid_argument("ids: phases must be >= 1");
  double acc = 0.0;
  for (const auto& th : phase_samples(freq.dim(), phases))
    acc += static_cast<double>(eigen_count_below(truncate(V, freq, th, L), E)) / (2 * L + 1);
  return acc / phases;
}

double SpectralSample::ids(double E) const {
  auto it = std::upper_bound(eigs.begin(), eigs.end(), E);
  return static_cast<double>(it - eigs.begin()) / eigs.size();
}

SpectralSample spectral_sample(const ScalarSeries& V, const Frequency& freq, int L,
                               int phases, int threads) {
  if (phases < 1) throw std::invalid_argument("spectral_sample: phases must be >= 1");
  SpectralSample s;
  s.L = L;
  s.phases = phases;
  const auto thetas = phase_samples(freq.dim(), phases);
  std::vector<std::vector<double>> per(phases);
  auto work = [&](int first, int stride) {
    for (int j = first; j < phases; j += stride) per[j] = eigenvalues(truncate(V, freq, thetas[j], L));
  };
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, phases);
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
    for (auto& th : pool) th.join();
  }
  std::vector<std::pair<double, int>> all;
  for (int j = 0; j < phases; ++j)
    for (double e : per[j]) all.emplace_back(e, j);
  std::sort(all.begin(), all.end());
  s.eigs.reserve(all.size());
  s.phase.reserve(all.size());
  for (const auto& [e, p] : all) {
    s.eigs.push_back(e);
    s.phase.push_back(p);
  }
  return s;
}

bool IdsCurve::monotone() const {
  for (std::size_t i = 1; i < N.size(); ++i)
    if (N[i] < N[i - 1]) return false;
  return true;
}

double IdsCurve::at(double E) const {
  if (energy.empty()) return 0.0;
  if (E <= energy.front()) return N.front();
  if (E >= energy.back()) return N.back();
  auto it = std::upper_bound(energy.begin(), energy.end(), E);
  std::size_t j = it - energy.begin();
  double t = (E - energy[j - 1]) / (energy[j] - energy[j - 1]);
  return N[j - 1] + t * (N[j] - N[j - 1]);
}

IdsCurve ids_curve(const SpectralSample& s, const std::vector<double>& energies) {
  IdsCurve c;
  c.L = s.L;
  c.phases = s.phases;
  c.energy = energies;
  std::sort(c.energy.begin(), c.energy.end());
  for (double E : c.energy) c.N.push_back(s.ids(E));
  return c;
}

IdsCurve ids_curve(const SpectralSample& s, double lo, double hi, int points) {
  if (points < 2) throw std::invalid_argument("ids_curve: need >= 2 points");
  std::vector<double> es(points);
  for (int i = 0; i < points; ++i) es[i] = lo + (hi - lo) * i / (points - 1);
  return ids_curve(s, es);
}

namespace {

Interval trimmed_cluster(const SpectralSample& s, std::size_t begin, std::size_t end) {
  if (s.phase.size() != s.eigs.size()) return {s.eigs[begin], s.eigs[end - 1]};
  std::vector<double> lo(s.phases, std::numeric_limits<double>::infinity());
  std::vector<double> hi(s.phases, -std::numeric_limits<double>::infinity());
  for (std::size_t i = begin; i < end; ++i) {
    lo[s.phase[i]] = std::min(lo[s.phase[i]], s.eigs[i]);
    hi[s.phase[i]] = std::max(hi[s.phase[i]], s.eigs[i]);
  }
  std::erase_if(lo, [](double v) { return std::isinf(v); });
  std::erase_if(hi, [](double v) { return std::isinf(v); });
  std::sort(lo.begin(), lo.end());
  std::sort(hi.begin(), hi.end());
  Interval r{lo[(lo.size() - 1) / 2], hi[hi.size() / 2]};
  if (r.lo > r.hi) r = {s.eigs[begin], s.eigs[end - 1]};
  return r;
}

}  // namespace

std::vector<Interval> spectrum_scan(const SpectralSample& s, double resolution) {
  if (!(resolution > 0.0)) throw std::invalid_argument("spectrum_scan: resolution must be > 0");
  const std::size_t n = s.eigs.size();
  if (n == 0) return {};
  if (s.phase.size() != n || s.phases < 1) {
    std::vector<Interval> out;
    std::size_t start = 0;
    for (std::size_t i = 1; i <= n; ++i) {
      if (i == n || s.eigs[i] - s.eigs[i - 1] > resolution) {
        out.push_back({s.eigs[start], s.eigs[i - 1]});
        start = i;
      }
    }
    return out;
  }

  std::vector<std::vector<double>> by_phase(s.phases);
  for (std::size_t i = 0; i < n; ++i) by_phase[s.phase[i]].push_back(s.eigs[i]);
  auto local_spacing = [&](double a, double b) {
    std::vector<double> sp;
    for (const auto& ev : by_phase) {
      auto lo = std::upper_bound(ev.begin(), ev.end(), a);
      auto hi = std::lower_bound(ev.begin(), ev.end(), b);
      int nl = static_cast<int>(std::min<std::ptrdiff_t>(4, lo - ev.begin()));
      int nh = static_cast<int>(std::min<std::ptrdiff_t>(4, ev.end() - hi));
      if (nl < 2 || nh < 2) continue;
      double span = (*(lo - 1) - *(lo - nl)) + (*(hi + nh - 1) - *hi);
      sp.push_back(span / (nl + nh - 2));
    }
    if (sp.empty()) return 0.0;
    std::sort(sp.begin(), sp.end());
    return sp[sp.size() / 2];
  };

  // open intervals (eigs[i], eigs[j]) in which no phase has more than two
  // eigenvalues; wide ones are gaps (boundary states included)
  struct Gap {
    std::size_t i, j;
  };
  std::vector<Gap> gaps;
  std::vector<int> count(s.phases, 0);
  std::size_t j = 1;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (j < i + 1) j = i + 1;
    while (j < n && count[s.phase[j]] < 2) ++count[s.phase[j++]];
    if (j < n) {
      double a = s.eigs[i], b = s.eigs[j];
      if (b - a > resolution && b - a > 4.0 * local_spacing(a, b)) {
        if (!gaps.empty() && i < gaps.back().j)
          gaps.back().j = std::max(gaps.back().j, j);
        else
          gaps.push_back({i, j});
      }
    }
    if (i + 1 < j) --count[s.phase[i + 1]];
  }

  // bands between gaps; fragments seen by at most half the phases are
  // boundary states and join their neighbouring gaps
  auto covered = [&](std::size_t begin, std::size_t end) {
    std::vector<char> seen(s.phases, 0);
    int c = 0;
    for (std::size_t k = begin; k < end; ++k)
      if (!seen[s.phase[k]]) seen[s.phase[k]] = 1, ++c;
    return 2 * c > s.phases;
  };
  std::vector<Gap> joined;
  std::size_t begin = 0;
  for (const auto& g : gaps) {
    if (!joined.empty() && !covered(begin, g.i + 1))
      joined.back().j = g.j;
    else
      joined.push_back(g);
    begin = g.j;
  }
  const bool tail = covered(begin, n);

  // per phase, the widest spacing inside the gap region spans its view of the
  // gap; a phase without boundary states there sees the true edges
  auto edges = [&](const Gap& g) {
    double a = s.eigs[g.i], b = s.eigs[g.j];
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& ev : by_phase) {
      auto first = std::lower_bound(ev.begin(), ev.end(), a);
      auto last = std::upper_bound(ev.begin(), ev.end(), b);
      if (first != ev.begin()) --first;
      if (last != ev.end()) ++last;
      double best = -1.0, l = 0.0, h = 0.0;
      for (auto it = first; it + 1 < last; ++it)
        if (*(it + 1) - *it > best) best = *(it + 1) - *it, l = *it, h = *(it + 1);
      if (best < 0.0) continue;
      lo = std::min(lo, l);
      hi = std::max(hi, h);
    }
    return Interval{lo, hi};
  };

  std::vector<Interval> out;
  double band_lo = trimmed_cluster(s, 0, n).lo;
  for (std::size_t k = 0; k < joined.size(); ++k) {
    Interval e = edges(joined[k]);
    if (k + 1 == joined.size() && !tail) break;
    out.push_back({band_lo, e.lo});
    band_lo = e.hi;
  }
  out.push_back({band_lo, trimmed_cluster(s, 0, n).hi});
  return out;
}

std::vector<Interval> spectrum_scan(const ScalarSeries& V, const Frequency& freq, int L,
                                    int phases, double resolution) {
  return spectrum_scan(spectral_sample(V, freq, L, phases), resolution);
}

DualityReport ids_rotation_consistency(const ScalarSeries& V, const Frequency& freq, double E,
                                       int L, long iters, int phases) {
  DualityReport r;
  r.N = ids(V, freq, E, L, phases);
  r.rho = rotation_number(schrodinger_cocycle(V, E, freq),
                          std::vector<double>(freq.dim(), 0.0), iters)
              .rho;
  r.defect = dist_to_Z(r.N - (1.0 - 2.0 * r.rho));
  return r;
}

}  // namespace qps
