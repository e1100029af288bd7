#ifndef GEMS_ALGORITHMS_HPP
#define GEMS_ALGORITHMS_HPP

#include <functional>
#include <optional>

#include "gems/design.hpp"
#include "gems/instance.hpp"
#include "gems/rng.hpp"
#include "gems/rounding.hpp"

namespace gems {

// One reward observation per call; implementations add the noise.
class SamplingContext {
 public:
  virtual ~SamplingContext() = default;
  double pull(int arm) {
    ++pulls_;
    return do_pull(arm);
  }
  long long pulls_used() const { return pulls_; }

 private:
  virtual double do_pull(int arm) = 0;
  long long pulls_ = 0;
};

struct AlgoOptions {
  double zeta = 0.25;  // rounding slack, must stay in [1/10, 1/4]
  RdFormula rd_formula = RdFormula::quadratic;
  DesignOptions design;
  bool dedup_candidates = false;  // deduplicate fixed-budget candidate slots
};

struct IterationTrace {
  int k = 0;
  int d_k = 0;
  long long n_k = 0;  // samples spent in the iteration
  int active_size = 0;
  long long pulls_total = 0;
};

struct Emission {
  long long pulls;
  int target;
};

struct ValidationTrace {
  int ell = 0;            // outer round, 0 for the single fixed-budget pass
  long long pulls_each = 0;
  int candidates = 0;
  long long pulls_total = 0;
};

struct EliminationRun {
  std::vector<int> active;  // surviving target indices, ascending
  std::vector<IterationTrace> iterations;
  bool aborted = false;  // no admissible dimension under the budget
  long long pulls = 0;
};

struct BudgetRun {
  int recommendation = 0;
  std::vector<IterationTrace> iterations;
  bool failed = false;  // a subroutine precondition failed mid-run
  long long pulls = 0;
};

struct MasterRun {
  int recommendation = 0;
  long long pulls = 0;
  std::vector<Emission> emissions;  // recommendation after each checkpoint
  std::vector<IterationTrace> iterations;
  std::vector<ValidationTrace> validations;
};

// largest d in [1, d_cap] with g(d) <= budget
std::optional<int> opt_dim(double budget, int d_cap,
                           const std::function<double(int)>& g);

// root of p * 2^p = t, bisection to 1e-12
double w_of(double t);

// Confidence-driven elimination: per iteration k picks the largest
// truncation whose cost max(4^k iota, r_d) fits the budget, samples a
// rounded optimal design, and removes targets beaten by more than their
// confidence width. Returns the survivors after n iterations.
EliminationRun gems_c(SamplingContext& ctx, const Instance& inst, double delta,
                      int n, double budget, const AlgoOptions& opts = {});

// Fixed-budget variant: exactly floor(T/n) pulls per iteration, fixed
// elimination threshold 2^-k, dimension cap from the rounding requirement.
// Requires targets to be arms.
BudgetRun gems_b(SamplingContext& ctx, const Instance& inst, double t_budget,
                 int n, double budget, const AlgoOptions& opts = {});

// Misspecification-tolerant elimination: wider sampling (factor 8(1+zeta))
// and the fixed 2^-k threshold.
EliminationRun gems_m(SamplingContext& ctx, const Instance& inst, double delta,
                      int n, double budget, const AlgoOptions& opts = {});

// Doubling schedule over subroutine budgets; anytime recommendations.
MasterRun master_fixed_confidence(SamplingContext& ctx, const Instance& inst,
                                  double delta, int max_ell, CounterRng rng,
                                  const AlgoOptions& opts = {});

// Two-phase budget split: schedule of gems_b runs, then validation pulls
// over the collected candidates. Consumes at most 2 t_budget pulls.
MasterRun master_fixed_budget(SamplingContext& ctx, const Instance& inst,
                              long long t_budget, CounterRng rng,
                              const AlgoOptions& opts = {});

// gems_m sweeps plus validation sized for eps-optimality.
MasterRun master_misspecified(SamplingContext& ctx, const Instance& inst,
                              double delta, double eps, int max_ell,
                              CounterRng rng, const AlgoOptions& opts = {});

// Rounds the gap-optimal design at truncation d, pulls it once, and picks
// the empirical best target from the least-squares fit.
BudgetRun oracle_static(SamplingContext& ctx, const Instance& inst,
                        long long n_pulls, int d, const AlgoOptions& opts = {});

struct LeastSquaresFit {
  Vec theta;
  bool rank_deficient = false;
};

// pull counts[i] times arm i and fit theta through the truncated features
LeastSquaresFit pull_and_fit(SamplingContext& ctx, const Mat& psi,
                             const Eigen::VectorXi& counts);

// argmax of <theta, psi_d(z)> over targets, lowest index on exact ties
int recommend_by_estimate(const Instance& inst, const Vec& theta, int d);

}  // namespace gems

#endif
