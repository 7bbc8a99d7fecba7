#include <cmath>

#include "doctest.h"
#include "qpspec/spectrum.hpp"
#include "support.hpp"

using namespace qps;

namespace {

TruncatedOperator free_op(int L) {
  TruncatedOperator H;
  H.L = L;
  H.diag.assign(2 * L + 1, 0.0);
  return H;
}

}  // namespace

TEST_SUITE("spectrum") {

TEST_CASE("truncated operator layout") {
  auto fr = golden_frequency();
  auto V = amo_potential(0.3);
  auto H = truncate(V, fr, {0.1}, 3);
  REQUIRE(H.size() == 7);
  for (int n = -3; n <= 3; ++n)
    CHECK(H.diag[n + 3] == doctest::Approx(0.6 * std::cos(kTwoPi * (0.1 + n * fr.alpha[0]))));
}

TEST_CASE("sturm count on the 3 by 3 free operator") {
  auto H = free_op(1);
  CHECK(eigen_count_below(H, -1.5) == 0);
  CHECK(eigen_count_below(H, 0.5) == 2);
  CHECK(eigen_count_below(H, 10.0) == 3);
  CHECK(eigen_count_below(H, -1.4) == 1);  // -sqrt 2 = -1.414
  CHECK(eigen_count_below(H, 1.5) == 3);
  auto ev = eigenvalues(H);
  CHECK(ev[0] == doctest::Approx(-std::sqrt(2.0)));
  CHECK(ev[1] == doctest::Approx(0.0));
  CHECK(ev[2] == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("sturm count is monotone and saturates") {
  auto fr = golden_frequency();
  auto V = amo_potential(0.7);
  auto H = truncate(V, fr, {0.37}, 200);
  double bound = 2.0 + V.l1_norm();
  CHECK(eigen_count_below(H, -bound - 1e-9) == 0);
  CHECK(eigen_count_below(H, bound + 1e-9) == H.size());
  int prev = 0;
  for (double E : testing::linspace(-bound, bound, 400)) {
    int c = eigen_count_below(H, E);
    CHECK(c >= prev);
    prev = c;
  }
}

TEST_CASE("sturm count agrees with the eigenvalue solver") {
  auto fr = golden_frequency();
  auto H = truncate(amo_potential(0.4), fr, {0.2}, 300);
  auto ev = eigenvalues(H);
  testing::Rng rng(4);
  for (int t = 0; t < 200; ++t) {
    double E = rng.uniform(-3.0, 3.0);
    long direct = std::upper_bound(ev.begin(), ev.end(), E) - ev.begin();
    CHECK(eigen_count_below(H, E) == direct);
  }
}

TEST_CASE("free ids values") {
  auto fr = golden_frequency();
  auto V0 = constant_series(1, 0.0);
  CHECK(std::abs(ids(V0, fr, 0.0, 2000, 4) - 0.5) <= 1e-3);
  CHECK(std::abs(ids(V0, fr, 1.0, 5000, 4) - 2.0 / 3.0) <= 2e-3);
  CHECK(ids(V0, fr, -2.5, 500, 4) == 0.0);
  CHECK(ids(V0, fr, 2.5, 500, 4) == 1.0);
}

TEST_CASE("ids curve is monotone and bounded") {
  auto fr = golden_frequency();
  auto s = spectral_sample(amo_potential(0.3), fr, 800, 6);
  auto c = ids_curve(s, -3.0, 3.0, 301);
  CHECK(c.monotone());
  CHECK(c.N.front() >= 0.0);
  CHECK(c.N.back() <= 1.0);
  CHECK(c.N.front() == 0.0);
  CHECK(c.N.back() == 1.0);
}

TEST_CASE("ids is stable under doubling L") {
  auto fr = golden_frequency();
  auto V = amo_potential(0.3);
  testing::Rng rng(8);
  int L = 500;
  for (int t = 0; t < 25; ++t) {
    double E = rng.uniform(-2.5, 2.5);
    CHECK(std::abs(ids(V, fr, E, L, 8) - ids(V, fr, E, 2 * L, 8)) <= 5.0 / L);
  }
}

TEST_CASE("spectral sample does not depend on the thread count") {
  auto fr = golden_frequency();
  auto V = amo_potential(0.3);
  auto a = spectral_sample(V, fr, 300, 5, 1);
  auto b = spectral_sample(V, fr, 300, 5, 3);
  CHECK(a.eigs == b.eigs);
  CHECK(a.phase == b.phase);
}

TEST_CASE("scan of the free operator") {
  auto fr = golden_frequency();
  auto iv = spectrum_scan(constant_series(1, 0.0), fr, 5000, 8, 1e-3);
  REQUIRE(iv.size() == 1);
  CHECK(std::abs(iv[0].lo + 2.0) <= 5e-3);
  CHECK(std::abs(iv[0].hi - 2.0) <= 5e-3);
}

TEST_CASE("scan of a constant potential") {
  auto fr = golden_frequency();
  double c = 0.7;
  auto iv = spectrum_scan(constant_series(1, c), fr, 2000, 4, 1e-3);
  REQUIRE(iv.size() == 1);
  CHECK(std::abs(iv[0].lo - (c - 2.0)) <= 5e-3);
  CHECK(std::abs(iv[0].hi - (c + 2.0)) <= 5e-3);
}

TEST_CASE("untagged points are merged by resolution") {
  SpectralSample s;
  s.L = 1;
  s.phases = 1;
  s.eigs = {0.0, 0.0005, 0.001, 0.5, 0.5004};
  auto iv = spectrum_scan(s, 1e-2);
  REQUIRE(iv.size() == 2);
  CHECK(iv[0].lo == 0.0);
  CHECK(iv[0].hi == 0.001);
  CHECK(iv[1].lo == 0.5);
}

TEST_CASE("largest inner gap of the almost Mathieu scan sits at plateau alpha") {
  auto fr = golden_frequency();
  auto s = spectral_sample(amo_potential(0.3), fr, 2000, 8);
  auto iv = spectrum_scan(s, 1e-3);
  REQUIRE(iv.size() >= 2);
  double best = 0.0, mid = 0.0;
  for (std::size_t i = 1; i < iv.size(); ++i)
    if (iv[i].lo - iv[i - 1].hi > best) {
      best = iv[i].lo - iv[i - 1].hi;
      mid = 0.5 * (iv[i].lo + iv[i - 1].hi);
    }
  double N = s.ids(mid);
  CHECK((std::abs(N - fr.alpha[0]) <= 1e-3 || std::abs(N - (1 - fr.alpha[0])) <= 1e-3));
}

TEST_CASE("duality at simple energies") {
  auto fr = golden_frequency();
  auto V0 = constant_series(1, 0.0);
  auto r = ids_rotation_consistency(V0, fr, 0.0, 2000, 100000);
  CHECK(std::abs(r.N - 0.5) <= 2e-3);
  CHECK(std::abs(r.rho - 0.25) <= 1e-4);
  CHECK(r.defect <= 2e-3);
  auto above = ids_rotation_consistency(V0, fr, 2.5, 2000, 100000);
  CHECK(above.N == 1.0);
  CHECK(above.rho <= 1e-3);
  CHECK(above.defect <= 1e-3);
}

TEST_CASE("duality on an almost Mathieu energy grid") {
  auto fr = golden_frequency();
  auto V = amo_potential(0.3);
  for (double E : testing::linspace(-2.3, 2.3, 50)) {
    auto r = ids_rotation_consistency(V, fr, E, 2000, 100000);
    CHECK(r.defect <= 5e-3);
  }
}

TEST_CASE("duality at the main gap plateau") {
  auto fr = golden_frequency();
  double a = fr.alpha[0];
  auto V = amo_potential(0.3);
  auto r = ids_rotation_consistency(V, fr, 0.75, 2000, 100000);
  CHECK(std::abs(r.N - a) <= 1e-3);
  CHECK(dist_to_Z(r.rho - (1 - a) / 2) <= 1e-3);
  CHECK(r.defect <= 2e-3);
}

}  // TEST_SUITE
