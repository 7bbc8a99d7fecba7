#include "qpspec/gaps.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace qps {

namespace {

template <class Plateau>
GapDetection detect(const std::vector<Interval>& scan, double min_length, Plateau plateau) {
  if (scan.empty()) throw std::invalid_argument("detect_gaps: empty scan");
  GapDetection out;
  out.E_min = scan.front().lo;
  out.E_max = scan.back().hi;
  for (std::size_t i = 1; i < scan.size(); ++i) {
    GapRecord g;
    g.E_minus = scan[i - 1].hi;
    g.E_plus = scan[i].lo;
    g.length = g.E_plus - g.E_minus;
    if (g.length < min_length) continue;
    g.N_plateau = plateau(0.5 * (g.E_minus + g.E_plus));
    out.gaps.push_back(g);
  }
  return out;
}

std::string fmt(const Index& m) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < m.size(); ++i) os << (i ? "," : "") << m[i];
  os << ")";
  return os.str();
}

}  // namespace

GapDetection detect_gaps(const std::vector<Interval>& scan, const IdsCurve& curve,
                         double min_length) {
  return detect(scan, min_length, [&](double E) { return curve.at(E); });
}

GapDetection detect_gaps(const std::vector<Interval>& scan, const SpectralSample& s,
                         double min_length) {
  return detect(scan, min_length, [&](double E) { return s.ids(E); });
}

Index label_gap(double N_plateau, const Frequency& freq, int M_max, double tol) {
  if (M_max < 1) throw std::invalid_argument("label_gap: M_max must be >= 1");
  double best = std::numeric_limits<double>::infinity();
  double second = best;
  Index arg;
  for (const Index& m : index_ball(freq.dim(), M_max)) {
    double d = dist_to_Z(N_plateau - freq.dot(m));
    if (d < best) {
      second = best;
      best = d;
      arg = m;
    } else if (d < second) {
      second = d;
    }
  }
  if (best > tol) {
    std::ostringstream os;
    os << "label_gap: no |m| <= " << M_max << " within tol " << tol << " (best defect " << best
       << ")";
    throw NoLabelError(os.str());
  }
  double separation = freq.gamma / std::pow(2.0 * M_max, freq.tau) - tol;
  if (second <= tol || second < separation) {
    std::ostringstream os;
    os << "label_gap: ambiguous label near " << fmt(arg) << ", runner-up defect " << second;
    throw AmbiguousLabelError(os.str());
  }
  return arg;
}

void label_gaps(std::vector<GapRecord>& gaps, const Frequency& freq, int M_max, double tol) {
  std::map<Index, std::size_t> seen;
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    gaps[i].m = label_gap(gaps[i].N_plateau, freq, M_max, tol);
    gaps[i].label_defect = dist_to_Z(gaps[i].N_plateau - freq.dot(gaps[i].m));
    auto [it, fresh] = seen.emplace(gaps[i].m, i);
    if (!fresh)
      throw AmbiguousLabelError("label_gaps: label " + fmt(gaps[i].m) + " on two gaps");
  }
}

DecayReport decay_profile(const std::vector<GapRecord>& gaps, double eps, int k) {
  DecayReport rep;
  std::vector<double> xs, ys;
  for (const auto& g : gaps) {
    int norm = sup_norm(g.m);
    if (g.m.empty() || norm == 0) continue;
    DecayItem it;
    it.m = g.m;
    it.length = g.length;
    it.bound = std::pow(eps, 0.25) * std::pow(static_cast<double>(norm), -k / 9.0);
    it.pass = it.length < it.bound;
    rep.all_pass = rep.all_pass && it.pass;
    rep.items.push_back(it);
    if (g.length > 0.0) {
      xs.push_back(std::log(static_cast<double>(norm)));
      ys.push_back(std::log(g.length));
    }
  }
  if (xs.size() >= 2) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      mx += xs[i];
      my += ys[i];
    }
    mx /= xs.size();
    my /= ys.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxy += (xs[i] - mx) * (ys[i] - my);
      sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    if (sxx > 0) rep.slope = sxy / sxx;
  }
  return rep;
}

GapRecord refine_gap_edges(const ScalarSeries& V, const Frequency& freq, const GapRecord& gap,
                           int L, double edge_tol, int phases) {
  if (!(edge_tol > 0.0)) throw std::invalid_argument("refine_gap_edges: edge_tol must be > 0");
  const int allowance = 2;
  const bool lo_open = std::isinf(gap.E_minus), hi_open = std::isinf(gap.E_plus);
  double ref;
  if (lo_open && hi_open) throw std::invalid_argument("refine_gap_edges: both edges infinite");
  double bound = 2.0 + V.l1_norm() + 1.0;
  if (lo_open)
    ref = -bound;
  else if (hi_open)
    ref = bound;
  else
    ref = 0.5 * (gap.E_minus + gap.E_plus);

  std::vector<TruncatedOperator> ops;
  for (const auto& th : phase_samples(freq.dim(), phases)) ops.push_back(truncate(V, freq, th, L));
  std::vector<int> ref_count;
  for (const auto& H : ops) ref_count.push_back(eigen_count_below(H, ref));

  auto in_gap = [&](double E) {
    for (std::size_t j = 0; j < ops.size(); ++j) {
      int between = std::abs(ref_count[j] - eigen_count_below(ops[j], E));
      if (between > allowance) return false;
    }
    return true;
  };

  GapRecord out = gap;
  if (!in_gap(ref)) {
    out.collapsed = true;
    out.length = 0.0;
    return out;
  }
  auto bisect = [&](double outside, double inside) {
    if (in_gap(outside)) return outside;
    while (std::abs(inside - outside) > edge_tol) {
      double mid = 0.5 * (inside + outside);
      if (in_gap(mid))
        inside = mid;
      else
        outside = mid;
    }
    return inside;
  };
  if (!lo_open) out.E_minus = bisect(gap.E_minus, ref);
  if (!hi_open) out.E_plus = bisect(gap.E_plus, ref);
  if (lo_open || hi_open)
    out.length = std::numeric_limits<double>::infinity();
  else
    out.length = out.E_plus - out.E_minus;
  if (!lo_open && !hi_open) {
    // truncation edge states put at most `allowance` levels inside a real gap
    int fewest = std::numeric_limits<int>::max();
    for (const auto& H : ops)
      fewest = std::min(fewest, eigen_count_below(H, out.E_plus) - eigen_count_below(H, out.E_minus));
    if (out.length <= 0.0 || fewest > allowance) {
      out.collapsed = true;
      out.length = 0.0;
    }
  }
  return out;
}

double HomogeneityProfile::min_mu() const {
  double m = std::numeric_limits<double>::infinity();
  for (double v : mu) m = std::min(m, v);
  return m;
}

double measure_in(const std::vector<Interval>& sigma, double a, double b) {
  double s = 0.0;
  auto it = std::lower_bound(sigma.begin(), sigma.end(), a,
                             [](const Interval& iv, double x) { return iv.hi < x; });
  for (; it != sigma.end() && it->lo < b; ++it)
    s += std::max(0.0, std::min(b, it->hi) - std::max(a, it->lo));
  return s;
}

HomogeneityProfile homogeneity_profile(const std::vector<Interval>& scan,
                                       const std::vector<double>& eps_grid, int E_samples) {
  if (scan.empty()) throw std::invalid_argument("homogeneity_profile: empty scan");
  const double lo = scan.front().lo, hi = scan.back().hi;
  std::vector<double> pts;
  for (const auto& iv : scan) {
    pts.push_back(iv.lo);
    pts.push_back(iv.hi);
  }
  // uniform fill, projected onto the nearest point of the union
  for (int i = 0; i < E_samples; ++i) {
    double E = lo + (hi - lo) * (i + 0.5) / E_samples;
    auto it = std::lower_bound(scan.begin(), scan.end(), E,
                               [](const Interval& iv, double x) { return iv.hi < x; });
    if (it == scan.end()) continue;
    if (E >= it->lo) {
      pts.push_back(E);
    } else if (it == scan.begin()) {
      pts.push_back(it->lo);
    } else {
      auto prev = std::prev(it);
      pts.push_back(E - prev->hi < it->lo - E ? prev->hi : it->lo);
    }
  }
  HomogeneityProfile p;
  for (double eps : eps_grid) {
    if (!(eps > 0.0 && eps < hi - lo))
      throw std::invalid_argument("homogeneity_profile: eps outside (0, diam)");
    double best = std::numeric_limits<double>::infinity(), arg = lo;
    for (double E : pts) {
      double r = measure_in(scan, E - eps, E + eps) / eps;
      if (r < best) {
        best = r;
        arg = E;
      }
    }
    p.eps.push_back(eps);
    p.mu.push_back(best);
    p.argmin_E.push_back(arg);
  }
  return p;
}

HolderReport holder_modulus(const IdsCurve& curve, const std::vector<double>& eps_grid) {
  if (!curve.monotone()) throw std::invalid_argument("holder_modulus: curve not monotone");
  HolderReport rep;
  std::vector<double> lx, ly;
  for (double eps : eps_grid) {
    double best = 0.0;
    for (double E : curve.energy) {
      double r = (curve.at(E + eps) - curve.at(E - eps)) / std::sqrt(eps);
      if (r > best) {
        best = r;
        if (r > rep.C0_hat) {
          rep.C0_hat = r;
          rep.E_arg = E;
          rep.eps_arg = eps;
        }
      }
    }
    rep.eps.push_back(eps);
    rep.max_ratio.push_back(best);
    if (best > 0.0) {
      lx.push_back(std::log(eps));
      ly.push_back(std::log(best));
    }
  }
  if (lx.size() >= 2) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      mx += lx[i];
      my += ly[i];
    }
    mx /= lx.size();
    my /= ly.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      sxy += (lx[i] - mx) * (ly[i] - my);
      sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    if (sxx > 0) rep.ratio_slope = sxy / sxx;
  }
  rep.violation = rep.ratio_slope < -0.25;
  return rep;
}

SeparationReport gap_separation_check(const std::vector<GapRecord>& gaps, double E_min,
                                      double E_max, const Frequency& freq, double C0_hat) {
  if (!(C0_hat > 0.0)) throw std::invalid_argument("gap_separation_check: C0_hat must be > 0");
  SeparationReport rep;
  const double c = std::pow(freq.gamma / C0_hat, 2.0);
  const int n = static_cast<int>(gaps.size());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      Index diff(gaps[i].m.size());
      for (std::size_t q = 0; q < diff.size(); ++q) diff[q] = gaps[i].m[q] - gaps[j].m[q];
      int k = sup_norm(diff);
      if (k == 0) continue;
      double dist = std::max({0.0, gaps[j].E_minus - gaps[i].E_plus,
                              gaps[i].E_minus - gaps[j].E_plus});
      double bound = c * std::pow(static_cast<double>(k), -2.0 * freq.tau);
      ++rep.checks;
      if (dist < bound) rep.violations.push_back({"pair", i, j, dist, bound});
    }
    int k = sup_norm(gaps[i].m);
    if (k == 0) continue;
    double bound = c * std::pow(static_cast<double>(k), -2.0 * freq.tau);
    double dist = std::min(gaps[i].E_minus - E_min, E_max - gaps[i].E_plus);
    ++rep.checks;
    if (dist < bound) rep.violations.push_back({"edge", i, -1, dist, bound});
  }
  return rep;
}

}  // namespace qps
