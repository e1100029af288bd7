#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "gems/instance.hpp"
#include "gems/rng.hpp"
#include "gems/simulation.hpp"

using namespace gems;

namespace {

Mat basis(int d) { return Mat::Identity(d, d); }

Instance two_arm() {
  Vec theta(2);
  theta << 1.0, 0.5;
  return Instance::linear(basis(2), Mat(), theta, 2);
}

}  // namespace

TEST_CASE("algorithm names round trip") {
  for (AlgoName name :
       {AlgoName::gems_c, AlgoName::gems_b, AlgoName::gems_m, AlgoName::master_fc,
        AlgoName::master_fb, AlgoName::master_mis, AlgoName::oracle_static}) {
    auto parsed = parse_algo_name(algo_name_string(name));
    REQUIRE(parsed.has_value());
    CHECK(*parsed == name);
  }
  CHECK_FALSE(parse_algo_name("nonsense").has_value());
}

TEST_CASE("environment replays and respects the noise model") {
  Instance inst = two_arm();
  Environment a(inst, {NoiseKind::none, 1.0}, CounterRng{9, 0, 0});
  CHECK(a.pull(0) == doctest::Approx(1.0));
  CHECK(a.pull(1) == doctest::Approx(0.5));
  CHECK(a.pulls_used() == 2);

  Environment g1(inst, {NoiseKind::gaussian_unit, 1.0}, CounterRng{9, 0, 0});
  Environment g2(inst, {NoiseKind::gaussian_unit, 1.0}, CounterRng{9, 0, 0});
  for (int i = 0; i < 20; ++i) CHECK(g1.pull(0) == g2.pull(0));

  Environment b(inst, {NoiseKind::bounded, 0.3}, CounterRng{9, 0, 0});
  for (int i = 0; i < 200; ++i) {
    double v = b.pull(1);
    CHECK(v >= 0.5 - 0.3);
    CHECK(v <= 0.5 + 0.3);
  }
  CHECK_THROWS_AS(Environment(inst, {NoiseKind::bounded, 1.5}, CounterRng{9, 0, 0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(a.pull(5), std::out_of_range);
}

TEST_CASE("reference bounds on the two arm instance") {
  Instance inst = two_arm();
  ReferenceBounds b = reference_bounds(inst, 0.1);
  CHECK(b.d_star == 2);
  CHECK(b.rho_star == doctest::Approx(16.0).epsilon(0.03));
  // rho* log(1/(2.4 * 0.1)) = 16 log(1/0.24) ~ 22.83
  CHECK(b.fixed_conf_lower == doctest::Approx(22.834).epsilon(0.04));
  // rho*/2 log(1/delta) = 8 log(10) ~ 18.42
  CHECK(b.oracle_upper == doctest::Approx(18.421).epsilon(0.04));
  CHECK(std::isnan(b.subroutine_budget_error));
  CHECK(std::isnan(b.master_budget_error));

  ReferenceBounds zero = reference_bounds(inst, 1.0 / 2.4);
  CHECK(zero.fixed_conf_lower == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("budget error formulas need a positive budget") {
  Instance inst = two_arm();
  ReferenceBounds b = reference_bounds(inst, 0.1, 131072.0, 2);
  // 2 * 4 * exp(-131072 / (640 * 2 * rho*)), rho* ~ 16
  double expected = 8.0 * std::exp(-131072.0 / (640.0 * 2.0 * b.rho_star));
  CHECK(b.subroutine_budget_error == doctest::Approx(expected).epsilon(1e-9));
  CHECK(b.master_budget_error > 0.0);
  CHECK(std::isfinite(b.master_budget_error));
}

TEST_CASE("bounds require a declared intrinsic dimension") {
  Vec theta(2);
  theta << 1.0, 0.5;
  Instance inst = Instance::linear(basis(2), Mat(), theta);  // none declared
  CHECK_THROWS_AS(reference_bounds(inst, 0.1), std::invalid_argument);
}

TEST_CASE("misspecified budget error formula") {
  Vec r(2);
  r << 1.0, 0.3;
  Instance inst(basis(2), r, Mat(), Vec());
  double e = misspec_budget_error(inst, 0.5, 10000.0, 2);
  // d*(0.5) = 2, rho*(0.5) with denominators max(gap, eps): (1/w1+1/w2)/0.49
  double rho = 4.0 / 0.49;
  double expected = 2.0 * 4.0 * std::exp(-10000.0 / (2560.0 * 2.0 * rho));
  CHECK(e == doctest::Approx(expected).epsilon(0.05));
}

TEST_CASE("noise free oracle trial is always right") {
  Instance inst = two_arm();
  AlgorithmSpec algo;
  algo.name = AlgoName::oracle_static;
  algo.n_pulls = 64;
  algo.d = 2;
  TrialResult t = run_trial(inst, algo, 0, 2026, {NoiseKind::none, 1.0});
  CHECK(t.correct);
  CHECK(t.recommendation == 0);
  CHECK(t.samples == 64);
  CHECK_FALSE(t.failed);
  // stability is an emission concept; single-shot algorithms leave it unset
  CHECK_FALSE(t.first_correct_at.has_value());
}

TEST_CASE("trials are order free") {
  Instance inst = two_arm();
  AlgorithmSpec algo;
  algo.name = AlgoName::gems_c;
  algo.delta = 0.1;
  algo.n = 2;
  algo.budget = 100.0;
  TrialResult alone = run_trial(inst, algo, 5, 77, {NoiseKind::gaussian_unit, 1.0});
  BatchReport rep = run_batch(inst, algo, 8, 77, {NoiseKind::gaussian_unit, 1.0});
  REQUIRE(rep.results.size() == 8);
  const TrialResult& inside = rep.results[5];
  CHECK(inside.trial == 5);
  CHECK(inside.recommendation == alone.recommendation);
  CHECK(inside.samples == alone.samples);
  CHECK(inside.correct == alone.correct);
}

TEST_CASE("batch aggregates and interval") {
  Instance inst = two_arm();
  AlgorithmSpec algo;
  algo.name = AlgoName::oracle_static;
  algo.n_pulls = 64;
  algo.d = 2;
  BatchReport rep = run_batch(inst, algo, 100, 11, {NoiseKind::none, 1.0});
  CHECK(rep.trials == 100);
  CHECK(rep.errors == 0);
  CHECK(rep.failures == 0);
  CHECK(rep.error_rate == 0.0);
  CHECK(rep.ci_low == 0.0);
  // Wilson upper limit at 0/100 is z^2 / (n + z^2)
  double z = 1.959963984540054;
  CHECK(rep.ci_high == doctest::Approx(z * z / (100.0 + z * z)).epsilon(1e-9));
  CHECK(rep.mean_samples == 64.0);
  CHECK(rep.min_samples == 64.0);
  CHECK(rep.q50_samples == 64.0);
  CHECK(rep.q90_samples == 64.0);
  CHECK(rep.max_samples == 64.0);
  // no emissions from the static oracle, so no stability statistics
  CHECK(rep.first_correct_count == 0);
  CHECK_FALSE(rep.mean_first_correct.has_value());
  REQUIRE(rep.bounds.has_value());
  CHECK(rep.bounds->rho_star == doctest::Approx(16.0).epsilon(0.03));
}

TEST_CASE("batches replay bit for bit") {
  Instance inst = two_arm();
  AlgorithmSpec algo;
  algo.name = AlgoName::master_fc;
  algo.delta = 0.1;
  algo.max_ell = 5;
  BatchReport a = run_batch(inst, algo, 12, 404, {NoiseKind::gaussian_unit, 1.0});
  BatchReport b = run_batch(inst, algo, 12, 404, {NoiseKind::gaussian_unit, 1.0});
  REQUIRE(a.results.size() == b.results.size());
  for (size_t i = 0; i < a.results.size(); ++i) {
    CHECK(a.results[i].recommendation == b.results[i].recommendation);
    CHECK(a.results[i].samples == b.results[i].samples);
    CHECK(a.results[i].first_correct_at == b.results[i].first_correct_at);
  }
  CHECK(a.error_rate == b.error_rate);
  CHECK(a.mean_samples == b.mean_samples);
}

TEST_CASE("stability measure tracks the last incorrect emission") {
  Instance inst = two_arm();
  AlgorithmSpec algo;
  algo.name = AlgoName::master_fc;
  algo.delta = 0.1;
  algo.max_ell = 5;
  TrialResult t = run_trial(inst, algo, 0, 31, {NoiseKind::none, 1.0});
  CHECK(t.correct);
  REQUIRE(t.first_correct_at.has_value());
  // every emission from first_correct_at onward recommends the best target
  for (const auto& e : t.emissions) {
    if (e.pulls >= *t.first_correct_at) CHECK(e.target == 0);
  }
  // and the emission just before it (if any) is wrong or absent
  bool before_ok = true;
  for (const auto& e : t.emissions) {
    if (e.pulls < *t.first_correct_at && e.target != 0) before_ok = false;
  }
  // a trial whose early random guess was wrong must reset the marker
  if (!before_ok) CHECK(*t.first_correct_at > 0);
}

TEST_CASE("subroutine correctness asks for survivor membership") {
  Instance inst = two_arm();
  AlgorithmSpec algo;
  algo.name = AlgoName::gems_c;
  algo.delta = 0.1;
  algo.n = 2;
  algo.budget = 100.0;
  TrialResult t = run_trial(inst, algo, 3, 99, {NoiseKind::none, 1.0});
  CHECK(t.correct);
  CHECK(t.active == std::vector<int>{0});
  CHECK(t.samples == 296);
}

TEST_CASE("failing trials are recorded and do not stop the batch") {
  Instance inst = two_arm();
  AlgorithmSpec algo;
  algo.name = AlgoName::gems_b;
  algo.t_budget = 1.0;  // below the two-pulls-per-iteration precondition
  algo.n = 1;
  algo.budget = 100.0;
  BatchReport rep = run_batch(inst, algo, 5, 1, {NoiseKind::none, 1.0});
  CHECK(rep.trials == 5);
  CHECK(rep.failures == 5);
  CHECK(rep.errors == 5);
  CHECK(rep.error_rate == 1.0);
  for (const auto& t : rep.results) {
    CHECK(t.failed);
    CHECK_FALSE(t.error.empty());
    CHECK_FALSE(t.correct);
  }
}

TEST_CASE("misspecified run counts epsilon optimal picks as correct") {
  Vec r(2);
  r << 1.0, 0.3;
  Instance inst(basis(2), r, Mat(), Vec());
  AlgorithmSpec algo;
  algo.name = AlgoName::gems_m;
  algo.delta = 0.1;
  algo.eps = 0.8;  // both targets are within 0.8 of the best
  algo.n = 1;
  algo.budget = 100.0;
  TrialResult t = run_trial(inst, algo, 0, 55, {NoiseKind::none, 1.0});
  CHECK(t.correct);  // front survivor has gap 0 <= eps regardless
}
