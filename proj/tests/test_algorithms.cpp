#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "gems/algorithms.hpp"
#include "gems/instance.hpp"
#include "gems/rng.hpp"

using namespace gems;

namespace {

Mat basis(int d) { return Mat::Identity(d, d); }

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

// noiseless environment: every pull returns the exact arm reward
struct ExactContext : SamplingContext {
  const Instance* inst;
  explicit ExactContext(const Instance& i) : inst(&i) {}

 private:
  double do_pull(int arm) override { return inst->arm_reward(arm); }
};

struct NoisyContext : SamplingContext {
  const Instance* inst;
  CounterRng rng;
  NoisyContext(const Instance& i, std::uint64_t seed, std::uint64_t stream)
      : inst(&i), rng{seed, stream, 0} {}

 private:
  double do_pull(int arm) override {
    return inst->arm_reward(arm) + rng.next_gaussian();
  }
};

Instance two_arm() { return Instance::linear(basis(2), Mat(), vec2(1.0, 0.5)); }

Instance two_arm_offset() {
  Vec r(2);
  r << 1.0, 0.3;
  return Instance(basis(2), r, Mat(), Vec());
}

Instance single_target() {
  Mat targets(2, 1);
  targets << 1.0, 0.0;
  Vec tr(1);
  tr << 1.0;
  Vec ar = vec2(1.0, 0.5);
  return Instance(basis(2), ar, targets, tr);
}

}  // namespace

TEST_CASE("largest dimension under a budget") {
  auto square = [](int d) { return static_cast<double>(d) * d; };
  auto r = opt_dim(10.0, 5, square);
  REQUIRE(r.has_value());
  CHECK(*r == 3);
  CHECK_FALSE(opt_dim(0.5, 5, square).has_value());
  auto all = opt_dim(1e9, 4, square);
  REQUIRE(all.has_value());
  CHECK(*all == 4);

  auto rd = [](int d) { return r_d(d, 0.25); };
  auto tight = opt_dim(56.0, 10, rd);
  REQUIRE(tight.has_value());
  CHECK(*tight == 3);  // r_3 = 56 exactly, r_4 = 88
}

TEST_CASE("lambert style root") {
  CHECK(std::abs(w_of(8.0) - 2.0) <= 1e-9);
  CHECK(std::abs(w_of(24.0) - 3.0) <= 1e-9);
  CHECK(std::abs(w_of(2.0) - 1.0) <= 1e-9);
  double w = w_of(10.0);
  CHECK(w > 2.0);
  CHECK(w < 3.0);
  double v = w_of(50.0);
  CHECK(v * std::exp2(v) == doctest::Approx(50.0).epsilon(1e-6));
}

TEST_CASE("confidence elimination finds the best arm without noise") {
  Instance inst = two_arm();
  ExactContext ctx(inst);
  EliminationRun run = gems_c(ctx, inst, 0.1, 2, 100.0);
  REQUIRE(run.active.size() == 1);
  CHECK(run.active[0] == 0);
  CHECK_FALSE(run.aborted);
  // budget admits d = 2 where g = max(4 iota, r_2) = 32, so the sample
  // count is ceil(32 * 2 * 1.25 * log(4 / 0.1)) = 296
  CHECK(run.pulls == 296);
  REQUIRE(run.iterations.size() == 1);
  CHECK(run.iterations[0].k == 1);
  CHECK(run.iterations[0].d_k == 2);
  CHECK(run.iterations[0].n_k == 296);
  CHECK(run.iterations[0].active_size == 1);
}

TEST_CASE("tight budget forces a short truncation") {
  Instance inst = two_arm();
  ExactContext ctx(inst);
  EliminationRun run = gems_c(ctx, inst, 0.1, 2, 20.0);
  REQUIRE(run.iterations.size() == 1);
  CHECK(run.iterations[0].d_k == 1);
  // g = r_1 = 16: ceil(16 * 2 * 1.25 * log(40)) = 148 pulls
  CHECK(run.pulls == 148);
  CHECK(run.active == std::vector<int>{0});
}

TEST_CASE("hopeless budget aborts without sampling") {
  Instance inst = two_arm();
  ExactContext ctx(inst);
  EliminationRun run = gems_c(ctx, inst, 0.1, 3, 10.0);
  CHECK(run.aborted);
  CHECK(run.pulls == 0);
  CHECK(run.active.size() == 2);
  CHECK(run.iterations.empty());
}

TEST_CASE("identical truncated targets cannot eliminate each other to extinction") {
  // targets e2 and e3 coincide after truncating to d = 1
  Mat arms = basis(3);
  Vec ar(3);
  ar << 1.0, 0.0, 2.0;
  Mat targets(3, 2);
  targets << 0.0, 0.0,
             1.0, 0.0,
             0.0, 1.0;
  Vec tr(2);
  tr << 0.0, 2.0;
  Instance inst(arms, ar, targets, tr);
  ExactContext ctx(inst);
  EliminationRun run = gems_c(ctx, inst, 0.1, 1, 20.0);  // only d = 1 fits
  REQUIRE(run.iterations.size() == 1);
  CHECK(run.iterations[0].d_k == 1);
  REQUIRE(run.active.size() == 1);
  CHECK(run.active[0] == 0);  // lower index survives the twin tie
}

TEST_CASE("elimination input validation") {
  Instance inst = two_arm();
  ExactContext ctx(inst);
  CHECK_THROWS_AS(gems_c(ctx, inst, 0.0, 2, 100.0), std::invalid_argument);
  CHECK_THROWS_AS(gems_c(ctx, inst, 1.0, 2, 100.0), std::invalid_argument);
  CHECK_THROWS_AS(gems_c(ctx, inst, 0.1, 0, 100.0), std::invalid_argument);
  AlgoOptions bad;
  bad.zeta = 0.3;
  CHECK_THROWS_AS(gems_c(ctx, inst, 0.1, 2, 100.0, bad), std::invalid_argument);
}

TEST_CASE("singleton target set returns immediately") {
  Instance inst = single_target();
  ExactContext ctx(inst);
  EliminationRun run = gems_c(ctx, inst, 0.1, 3, 100.0);
  CHECK(run.active == std::vector<int>{0});
  CHECK(run.pulls == 0);

  BudgetRun b = gems_b(ctx, inst, 100.0, 1, 100.0);
  CHECK(b.recommendation == 0);
  CHECK(b.pulls == 0);
  CHECK_FALSE(b.failed);
}

TEST_CASE("misspec tolerant elimination widens the sample count") {
  Instance inst = two_arm_offset();
  ExactContext ctx(inst);
  EliminationRun run = gems_m(ctx, inst, 0.1, 2, 100.0);
  REQUIRE(run.active.size() == 1);
  CHECK(run.active[0] == 0);
  // factor 8 (1 + zeta): ceil(32 * 8 * 1.25 * log(40)) = 1181
  CHECK(run.pulls == 1181);
  REQUIRE(run.iterations.size() == 1);
  CHECK(run.iterations[0].d_k == 2);
}

TEST_CASE("fixed budget run spends exactly its allotment") {
  Instance inst = two_arm();
  ExactContext ctx(inst);
  BudgetRun run = gems_b(ctx, inst, 100.0, 1, 100.0);
  CHECK(run.recommendation == 0);
  CHECK_FALSE(run.failed);
  CHECK(run.pulls == 100);  // floor(100 / 1) in the single iteration
  REQUIRE(run.iterations.size() == 1);
  CHECK(run.iterations[0].d_k == 2);
  CHECK(run.iterations[0].n_k == 100);
}

TEST_CASE("fixed budget preconditions") {
  Instance inst = two_arm();
  ExactContext ctx(inst);
  CHECK_THROWS_AS(gems_b(ctx, inst, 1.0, 1, 100.0), std::invalid_argument);
  CHECK_THROWS_AS(gems_b(ctx, inst, 100.0, 0, 100.0), std::invalid_argument);

  // targets that are not arms are rejected
  Mat targets(2, 2);
  targets << 1.0, 0.5,
             0.0, 0.5;
  Vec tr(2);
  tr << 1.0, 0.75;
  Instance off_menu(basis(2), vec2(1.0, 0.5), targets, tr);
  CHECK_THROWS_AS(gems_b(ctx, off_menu, 100.0, 1, 100.0), std::invalid_argument);
}

TEST_CASE("fixed budget failure modes set the flag instead of throwing") {
  Instance inst = two_arm();
  {
    ExactContext ctx(inst);
    // 10 pulls per iteration cannot meet even r_1 = 16
    BudgetRun run = gems_b(ctx, inst, 10.0, 1, 100.0);
    CHECK(run.failed);
    CHECK(run.pulls == 0);
    CHECK(run.recommendation == 0);
  }
  {
    ExactContext ctx(inst);
    // dimension scan cannot fit g under budget 1
    BudgetRun run = gems_b(ctx, inst, 100.0, 1, 1.0);
    CHECK(run.failed);
    CHECK(run.pulls == 0);
  }
}

TEST_CASE("doubling master converges and reports its checkpoints") {
  Instance inst = two_arm();
  ExactContext ctx(inst);
  CounterRng rng{7, 0, 0};
  MasterRun run = master_fixed_confidence(ctx, inst, 0.1, 5, rng);
  CHECK(run.recommendation == 0);
  // rounds 1..4 only abort (budgets below r_1 = 16); round 5 runs one
  // subroutine at budget 16, d = 1: ceil(16 * 2.5 * log(4 / 4e-4)) = 369
  CHECK(run.pulls == 369);
  REQUIRE(run.emissions.size() == 12);  // 1 initial + 1+2+3+4 aborts + 1 final
  CHECK(run.emissions.front().pulls == 0);
  CHECK(run.emissions.back().pulls == 369);
  CHECK(run.emissions.back().target == 0);
}

TEST_CASE("master bounds on the schedule length") {
  Instance inst = two_arm();
  ExactContext ctx(inst);
  CounterRng rng{7, 0, 0};
  CHECK_THROWS_AS(master_fixed_confidence(ctx, inst, 0.1, 0, rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(master_fixed_confidence(ctx, inst, 0.1, 41, rng),
                  std::invalid_argument);
}

TEST_CASE("fixed budget master on a tiny budget") {
  Instance inst = two_arm();
  ExactContext ctx(inst);
  CounterRng rng{3, 1, 0};
  MasterRun run = master_fixed_budget(ctx, inst, 8, rng);
  CHECK(run.recommendation == 0);
  CHECK(run.pulls == 8);  // the lone failed subroutine costs 0, validation 8
  REQUIRE(run.validations.size() == 1);
  CHECK(run.validations[0].pulls_each == 8);
  CHECK(run.validations[0].candidates == 1);
  REQUIRE(run.emissions.size() == 1);
  CHECK(run.emissions[0].target == 0);
}

TEST_CASE("fixed budget master smallest legal budget draws nothing") {
  Instance inst = two_arm();
  ExactContext ctx(inst);
  CounterRng rng{3, 1, 0};
  MasterRun run = master_fixed_budget(ctx, inst, 2, rng);
  CHECK(run.pulls == 0);  // the only grid cell is skipped; random fallback
  CHECK(run.validations.empty());
  CHECK(run.recommendation >= 0);
  CHECK(run.recommendation < 2);
  CHECK_THROWS_AS(master_fixed_budget(ctx, inst, 1, rng), std::invalid_argument);
}

TEST_CASE("fixed budget master stays within twice the budget") {
  Instance inst = two_arm();
  const long long t = 4096;
  {
    ExactContext ctx(inst);
    CounterRng rng{3, 1, 0};
    MasterRun run = master_fixed_budget(ctx, inst, t, rng);
    CHECK(run.recommendation == 0);
    CHECK(run.pulls <= 2 * t);
    CHECK(run.pulls > 0);
  }
  {
    NoisyContext a(inst, 11, 0);
    NoisyContext b(inst, 11, 0);
    CounterRng ra{3, 1, 0}, rb{3, 1, 0};
    MasterRun ma = master_fixed_budget(a, inst, t, ra);
    MasterRun mb = master_fixed_budget(b, inst, t, rb);
    CHECK(ma.recommendation == mb.recommendation);
    CHECK(ma.pulls == mb.pulls);
    CHECK(ma.pulls <= 2 * t);
  }
}

TEST_CASE("misspecified master validates its candidates") {
  Instance inst = two_arm_offset();
  ExactContext ctx(inst);
  CounterRng rng{5, 2, 0};
  MasterRun run = master_misspecified(ctx, inst, 0.1, 0.5, 1, rng);
  CHECK(run.recommendation == 0);
  // the lone subroutine aborts; one candidate validated with
  // ceil(8 log(2 / 0.025) / 0.25) = 141 pulls
  CHECK(run.pulls == 141);
  REQUIRE(run.validations.size() == 1);
  CHECK(run.validations[0].ell == 1);
  CHECK(run.validations[0].pulls_each == 141);
  CHECK(run.validations[0].candidates == 1);
  REQUIRE(run.emissions.size() == 2);
  CHECK(run.emissions.back().target == 0);
}

TEST_CASE("misspecified master input validation") {
  Instance inst = two_arm_offset();
  ExactContext ctx(inst);
  CounterRng rng{5, 2, 0};
  CHECK_THROWS_AS(master_misspecified(ctx, inst, 0.1, 0.0, 1, rng),
                  std::invalid_argument);
  Mat targets(2, 2);
  targets << 1.0, 0.5,
             0.0, 0.5;
  Vec tr(2);
  tr << 1.0, 0.65;
  Instance off_menu(basis(2), vec2(1.0, 0.3), targets, tr);
  CHECK_THROWS_AS(master_misspecified(ctx, off_menu, 0.1, 0.5, 1, rng),
                  std::invalid_argument);
}

TEST_CASE("static oracle pulls one rounded design") {
  Instance inst = two_arm();
  ExactContext ctx(inst);
  BudgetRun run = oracle_static(ctx, inst, 64, 2);
  CHECK(run.recommendation == 0);
  CHECK(run.pulls == 64);
  CHECK_FALSE(run.failed);
  REQUIRE(run.iterations.size() == 1);
  CHECK(run.iterations[0].d_k == 2);
  CHECK(run.iterations[0].n_k == 64);
}

TEST_CASE("static oracle is fooled by truncation on the unverifiable family") {
  Instance inst = make_unverifiable_instance(3);
  {
    ExactContext ctx(inst);
    BudgetRun run = oracle_static(ctx, inst, 64, 2);
    CHECK(run.recommendation == 0);  // wrong: the best target is 2
  }
  {
    ExactContext ctx(inst);
    BudgetRun run = oracle_static(ctx, inst, 64, 3);
    CHECK(run.recommendation == 2);  // full dimension sees the truth
  }
}

TEST_CASE("static oracle validation") {
  Instance inst = two_arm();
  ExactContext ctx(inst);
  CHECK_THROWS_AS(oracle_static(ctx, inst, 64, 0), std::invalid_argument);
  CHECK_THROWS_AS(oracle_static(ctx, inst, 64, 3), std::invalid_argument);
  CHECK_THROWS_AS(oracle_static(ctx, inst, 10, 2), std::invalid_argument);

  Instance single = single_target();
  ExactContext sctx(single);
  BudgetRun run = oracle_static(sctx, single, 64, 2);
  CHECK(run.recommendation == 0);
  CHECK(run.pulls == 0);
}

TEST_CASE("least squares fit flags rank deficiency") {
  Instance inst = two_arm();
  ExactContext ctx(inst);
  Eigen::VectorXi counts(2);
  counts << 5, 0;
  LeastSquaresFit fit = pull_and_fit(ctx, basis(2), counts);
  CHECK(fit.rank_deficient);
  CHECK(fit.theta(0) == doctest::Approx(1.0));
  CHECK(fit.theta(1) == doctest::Approx(0.0));

  counts << 3, 4;
  LeastSquaresFit full = pull_and_fit(ctx, basis(2), counts);
  CHECK_FALSE(full.rank_deficient);
  CHECK(full.theta(0) == doctest::Approx(1.0));
  CHECK(full.theta(1) == doctest::Approx(0.5));
  CHECK(ctx.pulls_used() == 12);
}

TEST_CASE("estimate based recommendation breaks ties low") {
  Instance inst = two_arm();
  CHECK(recommend_by_estimate(inst, vec2(0.0, 0.0), 2) == 0);
  CHECK(recommend_by_estimate(inst, vec2(0.0, 1.0), 2) == 1);
  Vec short_theta(1);
  short_theta << 1.0;
  CHECK(recommend_by_estimate(inst, short_theta, 1) == 0);
  CHECK_THROWS_AS(recommend_by_estimate(inst, short_theta, 2),
                  std::invalid_argument);
}

TEST_CASE("noisy runs replay exactly under the same seed") {
  Instance inst = two_arm();
  NoisyContext a(inst, 21, 4);
  NoisyContext b(inst, 21, 4);
  EliminationRun ra = gems_c(a, inst, 0.2, 3, 100.0);
  EliminationRun rb = gems_c(b, inst, 0.2, 3, 100.0);
  CHECK(ra.active == rb.active);
  CHECK(ra.pulls == rb.pulls);
  REQUIRE(ra.iterations.size() == rb.iterations.size());
  for (size_t i = 0; i < ra.iterations.size(); ++i) {
    CHECK(ra.iterations[i].n_k == rb.iterations[i].n_k);
    CHECK(ra.iterations[i].active_size == rb.iterations[i].active_size);
  }
}

TEST_CASE("active sets shrink monotonically") {
  Mat arms = basis(4);
  Vec theta(4);
  theta << 1.0, 0.7, 0.4, 0.1;
  Instance inst = Instance::linear(arms, Mat(), theta);
  NoisyContext ctx(inst, 33, 8);
  EliminationRun run = gems_c(ctx, inst, 0.1, 4, 400.0);
  int prev = inst.num_targets();
  for (const auto& it : run.iterations) {
    CHECK(it.active_size <= prev);
    prev = it.active_size;
  }
  CHECK(static_cast<int>(run.active.size()) == prev);
}
