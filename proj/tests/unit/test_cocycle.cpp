#include <cmath>

#include "doctest.h"
#include "qpspec/cocycle.hpp"
#include "qpspec/gaps.hpp"
#include "qpspec/spectrum.hpp"
#include "support.hpp"

using namespace qps;

TEST_SUITE("cocycle") {

TEST_CASE("schrodinger cocycle entries") {
  auto fr = golden_frequency();
  auto c0 = Cocycle::schrodinger(constant_series(1, 0.0), 0.0, fr);
  CHECK(testing::mat_dist(c0.at({0.41}), Mat2{0, -1, 1, 0}) == 0.0);
  auto c3 = schrodinger_cocycle(constant_series(1, 0.0), 3.0, fr);
  CHECK(testing::mat_dist(c3.at({0.77}), Mat2{3, -1, 1, 0}) == 0.0);
  auto amo = Cocycle::schrodinger(amo_potential(0.3), 1.0, fr);
  CHECK(testing::mat_dist(amo.at({0.0}), Mat2{0.4, -1, 1, 0}) <= 1e-15);
}

TEST_CASE("iterates of simple cocycles") {
  auto fr = golden_frequency();
  auto id = Cocycle::constant(Mat2::identity(), fr);
  CHECK(testing::mat_dist(iterate(id, {0.2}, 17), Mat2::identity()) == 0.0);
  auto quarter = Cocycle::schrodinger(constant_series(1, 0.0), 0.0, fr);
  CHECK(testing::mat_dist(iterate(quarter, {0.2}, 4), Mat2::identity()) <= 1e-15);
  CHECK(testing::mat_dist(iterate(quarter, {0.2}, 0), Mat2::identity()) == 0.0);
}

TEST_CASE("negative iterate inverts the step before theta") {
  auto fr = golden_frequency();
  auto c = Cocycle::schrodinger(amo_potential(0.3), 0.7, fr);
  std::vector<double> th{0.123};
  Mat2 back = iterate(c, th, -1);
  Mat2 prod = c.at(translate(th, fr, -1)) * back;
  CHECK(testing::mat_dist(prod, Mat2::identity()) <= 1e-12);
}

TEST_CASE("cocycle identity on random samples") {
  auto fr = golden_frequency();
  auto c = Cocycle::schrodinger(amo_potential(0.3), 0.4, fr);
  testing::Rng rng(3);
  for (int t = 0; t < 30; ++t) {
    long m = static_cast<long>(rng.uniform(-1000, 1000));
    long n = static_cast<long>(rng.uniform(-1000, 1000));
    std::vector<double> th{rng.uniform()};
    Mat2 lhs = iterate(c, th, m + n);
    Mat2 rhs = iterate(c, translate(th, fr, n), m) * iterate(c, th, n);
    CHECK((lhs - rhs).max_abs() <= 1e-8 * std::max(1.0, lhs.max_abs()));
  }
}

TEST_CASE("determinant drift of long iterates") {
  auto fr = golden_frequency();
  auto c = Cocycle::schrodinger(amo_potential(0.3), 0.4, fr);
  for (long n : {10L, 100L, 1000L, 10000L, -10000L}) {
    Mat2 A = iterate(c, {0.3}, n);
    CHECK(std::abs(A.det() - 1.0) <= 1e-8 * std::abs(static_cast<double>(n)));
  }
}

TEST_CASE("series cocycle validates the determinant") {
  auto fr = golden_frequency();
  MatrixSeries bad = constant_matrix_series(1, Mat2{2, 0, 0, 1});
  CHECK_THROWS_AS(Cocycle::from_series(bad, fr), std::invalid_argument);
  MatrixSeries good = constant_matrix_series(1, rotation(0.1));
  CHECK_NOTHROW(Cocycle::from_series(good, fr));
}

TEST_CASE("hyperbolicity verdicts of constant cocycles") {
  auto fr = golden_frequency();
  auto V0 = constant_series(1, 0.0);
  CHECK(uniform_hyperbolicity_test(Cocycle::schrodinger(V0, 3.0, fr), 8, 400).verdict ==
        Verdict::uniformly_hyperbolic);
  CHECK(uniform_hyperbolicity_test(Cocycle::schrodinger(V0, 0.0, fr), 8, 400).verdict ==
        Verdict::not_uniform);
}

TEST_CASE("hyperbolicity verdicts on a free energy grid") {
  auto fr = golden_frequency();
  auto V0 = constant_series(1, 0.0);
  double margin = 0.05;
  for (double E : testing::linspace(-4.0, 4.0, 33)) {
    auto v = uniform_hyperbolicity_test(Cocycle::schrodinger(V0, E, fr), 4, 400, margin);
    if (std::abs(E) > 2 + margin) CHECK(v.verdict == Verdict::uniformly_hyperbolic);
    if (std::abs(E) < 2 - margin) CHECK(v.verdict == Verdict::not_uniform);
    CHECK(v.orbit_length == 400);
  }
}

TEST_CASE("hyperbolic inside the largest gap of the almost Mathieu operator") {
  auto fr = golden_frequency();
  auto V = amo_potential(0.3);
  auto s = spectral_sample(V, fr, 1000, 8);
  auto det = detect_gaps(spectrum_scan(s, 1e-3), s, 4e-3);
  label_gaps(det.gaps, fr, 20, 1e-3);
  const GapRecord* g1 = nullptr;
  for (const auto& g : det.gaps)
    if (g.m == Index{1}) g1 = &g;
  REQUIRE(g1 != nullptr);
  double mid = 0.5 * (g1->E_minus + g1->E_plus);
  auto v = uniform_hyperbolicity_test(Cocycle::schrodinger(V, mid, fr), 8, 400);
  CHECK(v.verdict == Verdict::uniformly_hyperbolic);
  CHECK(v.phases_passed == 8);
  // inside a band the test must not claim hyperbolicity
  auto inside = uniform_hyperbolicity_test(Cocycle::schrodinger(V, 0.2, fr), 8, 400);
  CHECK(inside.verdict != Verdict::uniformly_hyperbolic);
}

}  // TEST_SUITE
