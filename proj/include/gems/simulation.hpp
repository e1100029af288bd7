#ifndef GEMS_SIMULATION_HPP
#define GEMS_SIMULATION_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gems/algorithms.hpp"
#include "gems/instance.hpp"
#include "gems/rng.hpp"

namespace gems {

enum class NoiseKind { gaussian_unit, none, bounded };

struct NoiseSpec {
  NoiseKind kind = NoiseKind::gaussian_unit;
  double bound = 1.0;  // half-width of the uniform noise, at most 1
};

// Noisy bandit feedback: pull(i) returns the arm reward plus fresh noise
// from a counter-based stream, so trials replay identically.
class Environment : public SamplingContext {
 public:
  Environment(const Instance& inst, const NoiseSpec& noise, CounterRng rng);

 private:
  double do_pull(int arm) override;

  const Instance* inst_;
  NoiseSpec noise_;
  CounterRng rng_;
};

enum class AlgoName {
  gems_c,
  gems_b,
  gems_m,
  master_fc,
  master_fb,
  master_mis,
  oracle_static,
};

std::optional<AlgoName> parse_algo_name(const std::string& s);
std::string algo_name_string(AlgoName name);

// Union of per-algorithm parameters; each algorithm reads its own subset.
struct AlgorithmSpec {
  AlgoName name = AlgoName::master_fc;
  double delta = 0.1;     // confidence level
  double eps = 0.1;       // optimality slack for the misspecified runs
  int n = 1;              // subroutine iteration count
  double budget = 1.0;    // subroutine dimension-selection budget B
  double t_budget = 0.0;  // sampling budget T
  int max_ell = 5;        // outer-loop cap for the anytime masters
  long long n_pulls = 0;  // static-design pull count
  int d = 1;              // static-design truncation
};

struct TrialResult {
  int trial = 0;
  int recommendation = -1;
  std::vector<int> active;  // survivors, for the elimination subroutines
  bool correct = false;
  long long samples = 0;
  std::optional<long long> first_correct_at;
  bool failed = false;  // the algorithm threw
  std::string error;
  std::vector<IterationTrace> iterations;
  std::vector<Emission> emissions;
  std::vector<ValidationTrace> validations;
};

struct ReferenceBounds {
  int d_star = 0;
  double rho_star = 0.0;          // gap-weighted complexity at d*
  double fixed_conf_lower = 0.0;  // rho* log(1/(2.4 delta))
  double oracle_upper = 0.0;      // rho*/2 log(1/delta)
  double subroutine_budget_error = 0.0;  // n|Z|^2 exp(-T/(640 n rho*))
  double master_budget_error = 0.0;      // two-term fixed-budget formula
};

// Bound formulas evaluated at the computed rho*_{d*}. Requires a known
// intrinsic dimension. t_budget <= 0 leaves the budget errors NaN; n <= 0
// defaults to ceil(log2(2/min_gap)).
ReferenceBounds reference_bounds(const Instance& inst, double delta,
                                 double t_budget = 0.0, int n = 0,
                                 const DesignOptions& opts = {});

// n|Z|^2 exp(-T/(2560 n rho*_{d*(eps)}(eps))), the misspecified analogue
double misspec_budget_error(const Instance& inst, double eps, double t_budget,
                            int n, double zeta = 0.25,
                            const DesignOptions& opts = {});

struct BatchReport {
  int trials = 0;
  int errors = 0;    // wrong recommendation or thrown trial
  int failures = 0;  // thrown trials only
  double error_rate = 0.0;
  double ci_low = 0.0;  // Wilson 95% interval on the error rate
  double ci_high = 1.0;
  double mean_samples = 0.0;
  double min_samples = 0.0;
  double q50_samples = 0.0;
  double q90_samples = 0.0;
  double max_samples = 0.0;
  int first_correct_count = 0;
  std::optional<double> mean_first_correct;
  std::optional<ReferenceBounds> bounds;
  std::vector<TrialResult> results;
};

// One seeded trial. The environment draws from stream 2*trial, the
// algorithm from 2*trial+1, so trials are independent and order-free.
TrialResult run_trial(const Instance& inst, const AlgorithmSpec& algo,
                      int trial, std::uint64_t seed,
                      const NoiseSpec& noise = {},
                      const AlgoOptions& opts = {});

// Seeded Monte Carlo batch; thrown trials are recorded, never propagated.
BatchReport run_batch(const Instance& inst, const AlgorithmSpec& algo,
                      int trials, std::uint64_t seed,
                      const NoiseSpec& noise = {},
                      const AlgoOptions& opts = {});

}  // namespace gems

#endif
