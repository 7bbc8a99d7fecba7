#include <cmath>

#include "doctest.h"
#include "qpspec/grid.hpp"
#include "qpspec/rotnum.hpp"
#include "support.hpp"

using namespace qps;

namespace {

// R_{n theta / 2} as a series on 2T
MatrixSeries half_rotation_series(int n) {
  MatrixSeries B(1, std::abs(n), true);
  if (n == 0) return constant_matrix_series(1, Mat2::identity(), 0, true);
  int s = n > 0 ? 1 : -1;
  cd h(0.5), i2(0.0, 0.5 * s);
  B.set({std::abs(n)}, CMat2(h, i2, -i2, h));
  return B;
}

// grid samples of theta -> M(theta) analysed into a series on T
MatrixSeries series_of(const std::function<Mat2(double)>& M, int radius) {
  Grid g{1, 64, false};
  std::vector<Mat2> vals;
  for (std::size_t i = 0; i < g.size(); ++i) vals.push_back(M(g.theta(i)[0]));
  return analyze(vals, g, radius, 1e-15);
}

}  // namespace

TEST_SUITE("rotnum") {

TEST_CASE("constant rotation") {
  auto fr = golden_frequency();
  auto r = rotation_number(Cocycle::constant(rotation(0.17), fr), {0.0}, 100000);
  CHECK(std::abs(r.rho - 0.17) <= 1e-6);
  CHECK(r.iterations == 100000);
  CHECK(r.error >= 0.0);
}

TEST_CASE("free schrodinger rotation numbers") {
  auto fr = golden_frequency();
  auto V0 = constant_series(1, 0.0);
  CHECK(std::abs(rotation_number(Cocycle::schrodinger(V0, 0.0, fr), {0.0}, 100000).rho - 0.25) <= 1e-6);
  CHECK(std::abs(rotation_number(Cocycle::schrodinger(V0, 1.0, fr), {0.0}, 100000).rho - 1.0 / 6.0) <= 1e-4);
  for (double x : {0.05, 0.1, 0.2, 0.3, 0.45}) {
    double E = 2.0 * std::cos(kTwoPi * x);
    CHECK(std::abs(rotation_number(Cocycle::schrodinger(V0, E, fr), {0.0}, 100000).rho - x) <= 1e-4);
  }
}

TEST_CASE("constant rotations at random angles") {
  auto fr = golden_frequency();
  testing::Rng rng(17);
  for (int t = 0; t < 20; ++t) {
    double phi = rng.uniform(0.0, 0.999);
    auto r = rotation_number(Cocycle::constant(rotation(phi), fr), {0.0}, 100000);
    CHECK(dist_to_Z(r.rho - phi) <= 1e-6);
  }
}

TEST_CASE("error estimate shrinks along refinement") {
  auto fr = golden_frequency();
  auto c = Cocycle::schrodinger(amo_potential(0.3), 0.3, fr);
  double e1 = rotation_number(c, {0.0}, 1000).error;
  double e2 = rotation_number(c, {0.0}, 100000).error;
  CHECK(e1 >= 0.0);
  CHECK(e2 <= e1);
}

TEST_CASE("degree of simple conjugacies") {
  auto fr = golden_frequency();
  CHECK(degree(constant_matrix_series(1, Mat2::identity(), 0, true), fr) == Index{0});
  CHECK(degree(half_rotation_series(3), fr) == Index{3});
  CHECK(degree(half_rotation_series(-2), fr) == Index{-2});
  Mat2 P{2.0, 1.0, 1.0, 1.0};
  MatrixField f = [&](const std::vector<double>& th) { return rotation(0.5 * th[0]) * P; };
  CHECK(degree(f, 1) == Index{1});
}

TEST_CASE("degree is additive under products") {
  Mat2 P{1.0, 0.5, 0.0, 1.0};
  for (int a : {-2, 0, 1, 3})
    for (int b : {-1, 2}) {
      MatrixField f = [&](const std::vector<double>& th) {
        return rotation(0.5 * a * th[0]) * P * rotation(0.5 * b * th[0]);
      };
      CHECK(degree(f, 1) == Index{a + b});
    }
  MatrixField two = [](const std::vector<double>& th) {
    return rotation(0.5 * (2 * th[0] - th[1]));
  };
  CHECK(degree(two, 2) == Index{2, -1});
}

TEST_CASE("degree of a vanishing column is an error") {
  MatrixField z = [](const std::vector<double>&) { return Mat2{0, 1, 0, 1}; };
  CHECK_THROWS_AS(degree(z, 1), DegeneracyError);
}

TEST_CASE("conjugated rotation arithmetic") {
  auto fr = golden_frequency();
  double a = fr.alpha[0];
  CHECK(conjugated_rotation(0.25, {0}, fr) == doctest::Approx(0.25));
  CHECK(dist_to_Z(conjugated_rotation(a / 2, {1}, fr)) <= 1e-15);
  CHECK(conjugated_rotation(0.4, {2}, fr) == doctest::Approx(mod1(0.4 - a)));
  CHECK(conjugated_rotation(0.4, {2}, fr) == doctest::Approx(0.781966).epsilon(1e-6));
}

TEST_CASE("conjugating by a rotation shifts the rotation number") {
  auto fr = golden_frequency();
  double a = fr.alpha[0];
  auto V = amo_potential(0.3);
  auto S = [&](double th) { return Mat2{0.4 - V.evaluate({th}), -1, 1, 0}; };
  for (int n : {-4, -2, 2, 4}) {
    auto A1 = series_of(S, 4);
    auto A2 = series_of([&](double th) {
      return rotation(0.5 * n * (th + a)).inverse() * S(th) * rotation(0.5 * n * th);
    }, 4 + std::abs(n));
    double r1 = rotation_number(Cocycle::from_series(A1, fr), {0.0}, 200000).rho;
    double r2 = rotation_number(Cocycle::from_series(A2, fr), {0.0}, 200000).rho;
    CHECK(dist_to_Z(r2 - conjugated_rotation(r1, {n}, fr)) <= 1e-4);
  }
}

TEST_CASE("rotation number is monotone in the energy") {
  auto fr = golden_frequency();
  auto V = amo_potential(0.3);
  double prev = 1.0;
  for (double E : testing::linspace(-2.6, 2.6, 60)) {
    double r = rotation_number(Cocycle::schrodinger(V, E, fr), {0.0}, 50000).rho;
    CHECK(r <= prev + 1e-4);
    prev = r;
  }
}

TEST_CASE("perturbation bound at the exact rotation") {
  auto fr = golden_frequency();
  auto rep = rotation_perturbation_bound_check(constant_matrix_series(1, rotation(0.2)), 0.2, fr);
  CHECK(rep.lhs <= 1e-6);
  CHECK(rep.rhs <= 1e-12);
  CHECK(rep.holds);
}

TEST_CASE("perturbation bound for a perturbed rotation") {
  auto fr = golden_frequency();
  double t = 0.01;
  auto A = series_of([&](double th) {
    return normalize_det(rotation(0.2) + Mat2{t * std::cos(kTwoPi * th), t, 0.0, -t * std::sin(kTwoPi * th)});
  }, 12);
  auto rep = rotation_perturbation_bound_check(A, 0.2, fr);
  CHECK(rep.lhs < rep.rhs);
  CHECK(rep.rhs < 3 * t);
  CHECK(rep.holds);
}

TEST_CASE("perturbation bound for a parabolic matrix") {
  auto fr = golden_frequency();
  auto rep = rotation_perturbation_bound_check(constant_matrix_series(1, Mat2{1, 0.1, 0, 1}), 0.0, fr);
  CHECK(rep.lhs <= 1e-4);
  CHECK(rep.rhs == doctest::Approx(0.1).epsilon(1e-9));
  CHECK(rep.holds);
}

}  // TEST_SUITE
