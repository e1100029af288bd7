#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "gems/design.hpp"
#include "gems/instance.hpp"
#include "gems/rng.hpp"
#include "gems/rounding.hpp"

using namespace gems;

namespace {

Mat basis(int d) { return Mat::Identity(d, d); }

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("minimum sample counts") {
  CHECK(r_d(3, 0.25) == doctest::Approx(56.0));
  CHECK(r_d(1, 0.25) == doctest::Approx(16.0));
  CHECK(r_d(2, 0.25) == doctest::Approx(32.0));
  CHECK(r_d(3, 0.25, RdFormula::linear_alt) == doctest::Approx(8640.0));
  CHECK(r_d(1, 0.1, RdFormula::quadratic) == doctest::Approx(40.0));
}

TEST_CASE("even weights split exactly") {
  Mat psi = basis(2);
  std::vector<Vec> dirs = {vec2(1.0, -1.0)};
  Vec w = vec2(0.5, 0.5);
  Allocation a = round_design(w, 64, psi, dirs, 0.25);
  CHECK(a.total() == 64);
  CHECK(a.counts(0) == 32);
  CHECK(a.counts(1) == 32);
}

TEST_CASE("rounding guarantee holds at the minimum count") {
  CounterRng rng{515, 9, 0};
  const double zeta = 0.25;
  for (int rep = 0; rep < 40; ++rep) {
    int d = 2 + static_cast<int>(rng.next_below(2));
    int n_arms = d + static_cast<int>(rng.next_below(3));
    Mat psi(d, n_arms);
    for (int j = 0; j < n_arms; ++j) {
      for (int i = 0; i < d; ++i) psi(i, j) = rng.next_uniform(-1.0, 1.0);
      if (j < d) psi(j, j) += 1.5;  // keep the set spanning
    }
    std::vector<Vec> dirs = pair_directions(psi, d);
    if (dirs.empty()) continue;

    Vec w(n_arms);
    for (int j = 0; j < n_arms; ++j) w(j) = -std::log(rng.next_u01());
    w /= w.sum();

    long long n = static_cast<long long>(std::ceil(r_d(d, zeta)));
    Allocation a = round_design(w, n, psi, dirs, zeta);
    CHECK(a.total() == n);
    CHECK(a.counts.minCoeff() >= 0);

    // independent re-check of the guarantee
    Mat gram = Mat::Zero(d, d);
    for (int j = 0; j < n_arms; ++j) {
      gram += static_cast<double>(a.counts(j)) * psi.col(j) * psi.col(j).transpose();
    }
    PinvQuad quad(gram);
    for (const Vec& y : dirs) {
      double lhs = quad(y);
      double rhs = (1.0 + zeta) / static_cast<double>(n) *
                   weighted_norm_sq(y, psi, w);
      CHECK(lhs <= rhs * (1.0 + 1e-9) + 1e-12);
    }
  }
}

TEST_CASE("tiny support weights are folded away") {
  // one-dimensional so the folded support still spans and no blend fires
  Mat psi(1, 2);
  psi << 1.0, 0.5;
  Vec dir(1);
  dir << 1.0;
  std::vector<Vec> dirs = {dir};
  Vec w(2);
  w << 1.0 - 1e-12, 1e-12;
  Allocation a = round_design(w, 32, psi, dirs, 0.25);
  CHECK(a.total() == 32);
  CHECK(a.counts(0) == 32);
  CHECK(a.counts(1) == 0);
}

TEST_CASE("folding that empties a dimension triggers the blend") {
  // in two dimensions the folded support is rank deficient, so the uniform
  // blend hands the negligible arm one pull instead of zero
  Mat psi = basis(2);
  std::vector<Vec> dirs = {vec2(1.0, 0.0)};
  Vec w(2);
  w << 1.0 - 1e-12, 1e-12;
  Allocation a = round_design(w, 32, psi, dirs, 0.25);
  CHECK(a.total() == 32);
  CHECK(a.counts(0) == 31);
  CHECK(a.counts(1) == 1);
}

TEST_CASE("rank deficient support is blended to safety") {
  // all weight on e1 but a direction needs e2: the original design scores
  // +inf on that direction, so any allocation satisfies the guarantee;
  // the blend keeps the rounded Gram invertible
  Mat psi = basis(2);
  std::vector<Vec> dirs = {vec2(0.0, 1.0)};
  Vec w(2);
  w << 1.0, 0.0;
  Allocation a = round_design(w, 32, psi, dirs, 0.25);
  CHECK(a.total() == 32);
  CHECK(a.counts(1) >= 1);  // uniform blend pulls the missing arm
}

TEST_CASE("input validation") {
  Mat psi = basis(2);
  std::vector<Vec> dirs = {vec2(1.0, -1.0)};
  Vec w = vec2(0.5, 0.5);
  CHECK_THROWS_AS(round_design(w, 8, psi, dirs, 0.25), std::invalid_argument);
  CHECK_THROWS_AS(round_design(w, 64, psi, dirs, 0.05), std::invalid_argument);
  CHECK_THROWS_AS(round_design(w, 64, psi, dirs, 0.3), std::invalid_argument);
  Vec bad = vec2(0.7, 0.7);
  CHECK_THROWS_AS(round_design(bad, 64, psi, dirs, 0.25), std::invalid_argument);
}

TEST_CASE("deterministic output") {
  Mat psi(2, 3);
  psi << 1.0, 0.0, 0.6,
         0.0, 1.0, 0.4;
  std::vector<Vec> dirs = pair_directions(psi, 2);
  Vec w(3);
  w << 0.41, 0.35, 0.24;
  Allocation a = round_design(w, 40, psi, dirs, 0.25);
  Allocation b = round_design(w, 40, psi, dirs, 0.25);
  CHECK(a.counts == b.counts);
  CHECK(a.total() == 40);
}

TEST_CASE("alternative count formula is accepted") {
  Mat psi = basis(2);
  std::vector<Vec> dirs = {vec2(1.0, -1.0)};
  Vec w = vec2(0.5, 0.5);
  long long n = static_cast<long long>(std::ceil(r_d(2, 0.25, RdFormula::linear_alt)));
  CHECK(n == 5760);
  Allocation a = round_design(w, n, psi, dirs, 0.25, RdFormula::linear_alt);
  CHECK(a.total() == n);
  // 33 clears the quadratic threshold of 32 but not the alternative one
  CHECK_NOTHROW(round_design(w, 33, psi, dirs, 0.25, RdFormula::quadratic));
  CHECK_THROWS_AS(round_design(w, 33, psi, dirs, 0.25, RdFormula::linear_alt),
                  std::invalid_argument);
}
