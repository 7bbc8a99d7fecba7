// prints one line per acceptance criterion
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "qpspec/gaps.hpp"
#include "qpspec/kam.hpp"
#include "qpspec/rotnum.hpp"
#include "qpspec/spectrum.hpp"

#ifndef QPSPEC_CLI_PATH
#error "QPSPEC_CLI_PATH must be defined"
#endif
#ifndef QPSPEC_EXAMPLES_DIR
#error "QPSPEC_EXAMPLES_DIR must be defined"
#endif

using namespace qps;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
  std::printf("criterion %d: %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

template <class F>
void guarded(int id, F&& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(id, false, std::string("exception: ") + e.what());
  }
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(a + (b - a) * i / (n - 1));
  return v;
}

std::vector<double> dyadic_eps() {
  std::vector<double> e;
  for (int p = 12; p >= 4; --p) e.push_back(std::ldexp(1.0, -p));
  return e;
}

// splitmix64
struct Rng {
  std::uint64_t s;
  double uniform() {
    std::uint64_t z = (s += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return (z >> 11) * 0x1.0p-53;
  }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
};

struct AmoData {
  Frequency fr = golden_frequency();
  ScalarSeries V = amo_potential(0.3);
  SpectralSample s;
  std::vector<Interval> scan;
  GapDetection det;
  double C0_hat = 0.0;
};

void criterion1() {
  auto fr = golden_frequency();
  auto t0 = Clock::now();
  auto s = spectral_sample(constant_series(1, 0.0), fr, 5000, 8, 1);
  auto c = ids_curve(s, linspace(-2.5, 2.5, 201));
  double secs = seconds_since(t0);
  double err = 0.0;
  for (std::size_t i = 0; i < c.energy.size(); ++i) {
    double x = std::clamp(c.energy[i] / 2.0, -1.0, 1.0);
    err = std::max(err, std::abs(c.N[i] - (1.0 - std::acos(x) / kPi)));
  }
  report(1, err <= 2e-3 && secs <= 60.0, fmt("max_err=%.3e runtime=%.1fs", err, secs));
}

void criterion2(const AmoData& d) {
  double worst = 0.0;
  for (double E : linspace(-2.5, 2.5, 50)) {
    double N = d.s.ids(E);
    double rho = rotation_number(Cocycle::schrodinger(d.V, E, d.fr), {0.0}, 100000).rho;
    worst = std::max(worst, dist_to_Z(N - (1.0 - 2.0 * rho)));
  }
  report(2, worst <= 5e-3, fmt("max_defect=%.3e over 50 energies", worst));
}

void criterion3(const AmoData& d) {
  const double gamma = d.fr.gamma, tau = d.fr.tau;
  const int M = 20;
  const double margin_req = gamma / std::pow(2.0 * M, tau);
  bool ok = true;
  std::ostringstream os;
  for (int want : {1, -1, 2, -2, 3, -3}) {
    const GapRecord* g = nullptr;
    for (const auto& r : d.det.gaps)
      if (r.m == Index{want}) g = &r;
    if (!g) {
      ok = false;
      os << " m=" << want << ":missing";
      continue;
    }
    // brute force over |n| <= M for the best and runner-up distances
    double best = 1e9, second = 1e9;
    int arg = 0;
    for (int n = -M; n <= M; ++n) {
      double dd = dist_to_Z(g->N_plateau - n * d.fr.alpha[0]);
      if (dd < best) {
        second = best;
        best = dd;
        arg = n;
      } else if (dd < second) {
        second = dd;
      }
    }
    bool this_ok = arg == want && best <= 1e-3 && second - best >= margin_req;
    ok = ok && this_ok;
    os << " m=" << want << (this_ok ? ":ok" : ":bad");
  }
  report(3, ok, "labels" + os.str() + fmt(" margin_req=%.3e", margin_req));
}

void criterion4() {
  auto fr = golden_frequency();
  auto V = ck_family(0.01, 6, 8);
  auto s = spectral_sample(V, fr, 5000, 8);
  auto det = detect_gaps(spectrum_scan(s, 1e-3), s, 4.0 / 5000);
  label_gaps(det.gaps, fr, 20, 1e-3);
  double C = ck_norm(V, 6).upper;
  std::vector<GapRecord> small;
  for (const auto& g : det.gaps)
    if (std::abs(g.m[0]) <= 6) small.push_back(g);
  auto rep = decay_profile(small, C, 6);
  bool ok = !small.empty();
  double worst = 0.0;
  for (const auto& it : rep.items) {
    worst = std::max(worst, it.length / it.bound);
    ok = ok && it.length * 10.0 <= it.bound;
  }
  report(4, ok, fmt("gaps=%.0f C_norm=%.4g worst_length/bound=%.3e", small.size(), C, worst));
}

void criterion5() {
  auto fr = golden_frequency();
  Rng rng{2025};
  MatrixSeries f(1, 3);
  for (int n = 1; n <= 3; ++n) {
    auto z = [&] { return cd(rng.uniform(-1, 1), rng.uniform(-1, 1)); };
    cd h = z();
    f.set({n}, CMat2(h, z(), z(), -h));
  }
  f = f * (1e-3 / f.l1_norm());
  auto c = Cocycle::kam_form(rotation(0.17), f, fr);
  auto t0 = Clock::now();
  auto s = almost_reducibility_run(c, 6);
  double secs = seconds_since(t0);
  bool ok = s.norm() <= 1e-12 && s.ledger.size() <= 6 && secs <= 5.0;
  double worst_res = 0.0;
  for (const auto& e : s.ledger) {
    if (e.norm_after > std::pow(e.norm_before, 1.9)) ok = false;
    worst_res = std::max(worst_res, e.residual);
    if (e.residual > 1e-7) ok = false;
  }
  report(5, ok,
         fmt("steps=%.0f final=%.3e ", s.ledger.size(), s.norm()) +
             fmt("max_residual=%.3e runtime=%.2fs", worst_res, secs));
}

void criterion6() {
  auto fr = golden_frequency();
  ParabolicOptions po;
  po.check_hyperbolicity = false;
  auto V0 = constant_series(1, 0.0);
  auto up = reduce_to_parabolic(Cocycle::schrodinger(V0, 2.0, fr), {0}, 6, po);
  auto dn = reduce_to_parabolic(Cocycle::schrodinger(V0, -2.0, fr), {0}, 6, po);
  // hand similarity with [[1,0],[1,1]]: S = B [[1,-1],[0,1]] B^-1
  Mat2 B{1, 0, 1, 1};
  Mat2 S = B * Mat2{1, -1, 0, 1} * B.inverse();
  bool hand = (S - Mat2{2, -1, 1, 0}).max_abs() == 0.0;
  Mat2 X = up.X.at({0.0});
  bool conj = (X.inverse() * Mat2{2, -1, 1, 0} * X - Mat2{1, up.zeta, 0, 1}).max_abs() <= 1e-10;
  bool ok = std::abs(up.zeta + 1.0) <= 1e-10 && std::abs(dn.zeta - 1.0) <= 1e-10 && hand && conj;
  report(6, ok, fmt("zeta(E=2)=%.12f zeta(E=-2)=%.12f", up.zeta, dn.zeta));
}

void criterion7() {
  Rng rng{77};
  double worst = 0.0, worst_cs = 0.0;
  for (int t = 0; t < 1000; ++t) {
    int K = 2 + static_cast<int>(rng.uniform() * 8);
    double a = 0, b = 0, c = 0;
    for (int i = 0; i < K; ++i) {
      double x11 = rng.uniform(-2, 2), x12 = rng.uniform(-2, 2);
      a += x11 * x11 / K;
      b += x11 * x12 / K;
      c += x12 * x12 / K;
    }
    double zeta = rng.uniform(1e-6, 0.5), delta = rng.uniform(1e-6, 0.5);
    auto mp = moser_poschel_from_averages(a, b, c, zeta, delta);
    double formula = -delta * a * zeta + delta * delta * (a * c - b * b);
    worst = std::max({worst, std::abs(mp.d_direct(delta) - formula),
                      std::abs(mp.d_of_delta(delta) - mp.d_direct(delta))});
    worst_cs = std::min(worst_cs, mp.cauchy_schwarz());
  }
  report(7, worst <= 1e-12 && worst_cs >= -1e-12,
         fmt("max_identity_gap=%.3e min_cauchy_schwarz=%.3e", worst, worst_cs));
}

void criterion8(const AmoData& d) {
  auto p = homogeneity_profile(d.scan, {1e-3, 3e-3, 1e-2, 3e-2, 1e-1}, 2000);
  report(8, p.min_mu() >= 0.5, fmt("min_mu=%.4f", p.min_mu()));
}

void criterion9(AmoData& d) {
  auto eps = dyadic_eps();
  double pad = 2.0 * eps.back();
  auto curve = ids_curve(d.s, d.det.E_min - pad, d.det.E_max + pad, 20001);
  auto h = holder_modulus(curve, eps);
  d.C0_hat = h.C0_hat;
  double lo = *std::min_element(h.max_ratio.begin(), h.max_ratio.end());
  double hi = *std::max_element(h.max_ratio.begin(), h.max_ratio.end());
  bool ok = std::isfinite(h.C0_hat) && hi <= 2.0 * lo && !h.violation;
  report(9, ok, fmt("C0_hat=%.4f ratio_spread=%.3f slope=%.3f", h.C0_hat, hi / lo, h.ratio_slope));
}

void criterion10(const AmoData& d) {
  auto rep = gap_separation_check(d.det.gaps, d.det.E_min, d.det.E_max, d.fr, d.C0_hat);
  report(10, rep.pass() && rep.checks > 0,
         fmt("checks=%.0f violations=%.0f", rep.checks, rep.violations.size()));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// true when both runs succeed and every data file matches byte for byte
bool same_outputs(const std::string& cmd, const std::string& config, std::string& note) {
  fs::path root = fs::temp_directory_path() / ("qpspec_accept_" + cmd);
  fs::remove_all(root);
  for (const char* run : {"a", "b"}) {
    std::string line = std::string(QPSPEC_CLI_PATH) + " " + cmd + " --config " + config +
                       " --out " + (root / run).string() + " > /dev/null 2>&1";
    if (std::system(line.c_str()) != 0) {
      note += " " + cmd + ":run_failed";
      return false;
    }
  }
  int files = 0;
  for (const auto& e : fs::directory_iterator(root / "a")) {
    auto name = e.path().filename();
    if (name == "manifest.json") continue;
    ++files;
    if (slurp(e.path()) != slurp(root / "b" / name)) {
      note += " " + cmd + ":" + name.string() + "_differs";
      return false;
    }
  }
  fs::remove_all(root);
  note += " " + cmd + ":" + std::to_string(files) + "_files_identical";
  return files > 0;
}

void criterion11() {
  std::string dir = QPSPEC_EXAMPLES_DIR;
  std::string note;
  bool ok = same_outputs("gaps", dir + "/amo_gaps.json", note);
  ok = same_outputs("kam", dir + "/kam_rotation.json", note) && ok;
  ok = same_outputs("ids", dir + "/free_ids.json", note) && ok;
  report(11, ok, note);
}

}  // namespace

int main() {
  guarded(1, criterion1);
  AmoData d;
  try {
    d.s = spectral_sample(d.V, d.fr, 5000, 8, 0);
    d.scan = spectrum_scan(d.s, 1e-3);
    d.det = detect_gaps(d.scan, d.s, 4.0 / 5000);
    label_gaps(d.det.gaps, d.fr, 20, 1e-3);
  } catch (const std::exception& e) {
    std::printf("almost Mathieu setup failed: %s\n", e.what());
  }
  guarded(2, [&] { criterion2(d); });
  guarded(3, [&] { criterion3(d); });
  guarded(4, criterion4);
  guarded(5, criterion5);
  guarded(6, criterion6);
  guarded(7, criterion7);
  guarded(8, [&] { criterion8(d); });
  guarded(9, [&] { criterion9(d); });
  guarded(10, [&] { criterion10(d); });
  guarded(11, criterion11);
  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
