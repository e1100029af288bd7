#include "gems/algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <utility>

namespace gems {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_zeta(double zeta) {
  if (!(zeta >= 0.1 - 1e-12 && zeta <= 0.25 + 1e-12))
    throw std::invalid_argument("zeta outside [1/10, 1/4]");
}

void check_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("delta outside (0, 1)");
}

std::vector<int> all_targets(const Instance& inst) {
  std::vector<int> v(inst.num_targets());
  for (int z = 0; z < inst.num_targets(); ++z) v[z] = z;
  return v;
}

void require_targets_are_arms(const Instance& inst) {
  for (int z = 0; z < inst.num_targets(); ++z)
    if (!inst.arm_index_of_target(z))
      throw std::invalid_argument("targets must be a subset of the arms");
}

struct DimChoice {
  int d = 0;
  double g = 0.0;
  DesignSolution sol;
  std::vector<Vec> dirs;
};

// largest admissible truncation under the budget; caches the solved design
std::optional<DimChoice> scan_dims(const Instance& inst,
                                   const std::vector<int>& active, int d_cap,
                                   double budget, double four_pow_k,
                                   bool include_rd, const AlgoOptions& opts) {
  std::optional<DimChoice> best;
  for (int d = 1; d <= d_cap; ++d) {
    auto dirs = pair_directions(inst, active, d);
    DesignSolution sol;
    if (dirs.empty()) {
      const int n = inst.num_arms();
      sol = {Vec::Constant(n, 1.0 / n), 0.0, 0, 0.0};
    } else {
      sol = solve_design(dirs, truncate_cols(inst.arms(), d), opts.design);
    }
    double g = four_pow_k * sol.value;
    if (include_rd) g = std::max(g, r_d(d, opts.zeta, opts.rd_formula));
    if (g <= budget) best = DimChoice{d, g, std::move(sol), std::move(dirs)};
  }
  return best;
}

struct SampledRound {
  PinvQuad quad;  // of the pulled Gram
  Vec theta;
  bool rank_def;
};

SampledRound sample_round(SamplingContext& ctx, const Mat& psi,
                          const Eigen::VectorXi& counts) {
  const int d = static_cast<int>(psi.rows());
  Mat gram = Mat::Zero(d, d);
  Vec b = Vec::Zero(d);
  for (int i = 0; i < counts.size(); ++i) {
    if (counts[i] <= 0) continue;
    gram += counts[i] * (psi.col(i) * psi.col(i).transpose());
    double sum = 0.0;
    for (int c = 0; c < counts[i]; ++c) sum += ctx.pull(i);
    b += psi.col(i) * sum;
  }
  PinvQuad quad(gram);
  return {quad, quad.solve(b), quad.rank() < d};
}

// One elimination pass. With a width quad, z goes when some z' beats it by
// its confidence width; ties at zero width keep the lower index. With a
// fixed threshold, z goes when beaten by at least the threshold.
std::vector<int> eliminate(const Instance& inst, const std::vector<int>& active,
                           int d, const Vec& theta, const PinvQuad* width_quad,
                           double width_factor, double fixed_threshold) {
  Mat t = truncate_cols(inst.targets(), d);
  std::vector<double> mean(active.size());
  for (size_t i = 0; i < active.size(); ++i)
    mean[i] = theta.dot(t.col(active[i]));
  std::vector<int> out;
  for (size_t i = 0; i < active.size(); ++i) {
    bool dead = false;
    for (size_t j = 0; j < active.size() && !dead; ++j) {
      if (j == i) continue;
      double diff = mean[j] - mean[i];
      if (width_quad) {
        Vec y = t.col(active[j]) - t.col(active[i]);
        double w2 = (*width_quad)(y);
        if (w2 == kInf) continue;
        double w = std::sqrt(w2) * width_factor;
        dead = diff >= w && (diff > 0.0 || w > 0.0 || active[j] < active[i]);
      } else {
        dead = diff >= fixed_threshold;
      }
    }
    if (!dead) out.push_back(active[i]);
  }
  return out;
}

// shared loop of the two confidence-style elimination subroutines
EliminationRun elimination_loop(SamplingContext& ctx, const Instance& inst,
                                double delta, int n, double budget,
                                const AlgoOptions& opts, double sample_factor,
                                bool width_thresholds) {
  check_delta(delta);
  check_zeta(opts.zeta);
  if (n < 1) throw std::invalid_argument("iteration count must be >= 1");
  EliminationRun run;
  run.active = all_targets(inst);
  long long start = ctx.pulls_used();
  for (int k = 1; k <= n; ++k) {
    if (run.active.size() <= 1) break;
    double delta_k = delta / (static_cast<double>(k) * k);
    auto choice = scan_dims(inst, run.active, inst.dim(), budget,
                            std::ldexp(1.0, 2 * k), true, opts);
    if (!choice) {
      run.aborted = true;
      break;
    }
    double log_term =
        std::log(static_cast<double>(run.active.size()) * run.active.size() /
                 delta_k);
    long long n_k = static_cast<long long>(
        std::ceil(choice->g * sample_factor * (1.0 + opts.zeta) * log_term));
    Mat psi = truncate_cols(inst.arms(), choice->d);
    Allocation alloc = round_design(choice->sol.weights, n_k, psi,
                                    choice->dirs, opts.zeta, opts.rd_formula);
    SampledRound round = sample_round(ctx, psi, alloc.counts);
    if (width_thresholds) {
      run.active = eliminate(inst, run.active, choice->d, round.theta,
                             &round.quad, std::sqrt(2.0 * log_term), 0.0);
    } else {
      run.active = eliminate(inst, run.active, choice->d, round.theta, nullptr,
                             0.0, std::ldexp(1.0, -k));
    }
    run.iterations.push_back({k, choice->d, n_k,
                              static_cast<int>(run.active.size()),
                              ctx.pulls_used()});
  }
  run.pulls = ctx.pulls_used() - start;
  return run;
}

}  // namespace

std::optional<int> opt_dim(double budget, int d_cap,
                           const std::function<double(int)>& g) {
  if (d_cap < 1) throw std::invalid_argument("opt_dim: d_cap must be >= 1");
  std::optional<int> best;
  for (int d = 1; d <= d_cap; ++d)
    if (g(d) <= budget) best = d;
  return best;
}

double w_of(double t) {
  if (!(t > 0.0)) throw std::invalid_argument("w_of: t must be positive");
  auto f = [](double p) { return p * std::exp2(p); };
  double hi = 1.0;
  while (f(hi) < t && hi < 1024.0) hi *= 2.0;
  double lo = 0.0;
  while (hi - lo > 1e-12) {
    double mid = 0.5 * (lo + hi);
    (f(mid) < t ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

namespace {

// exact integer floor of w_of, immune to bisection rounding
int floor_w(double x) {
  int p = 0;
  while (p < 62 && (p + 1) * std::exp2(p + 1) <= x) ++p;
  return p;
}

}  // namespace

EliminationRun gems_c(SamplingContext& ctx, const Instance& inst, double delta,
                      int n, double budget, const AlgoOptions& opts) {
  return elimination_loop(ctx, inst, delta, n, budget, opts, 2.0, true);
}

EliminationRun gems_m(SamplingContext& ctx, const Instance& inst, double delta,
                      int n, double budget, const AlgoOptions& opts) {
  return elimination_loop(ctx, inst, delta, n, budget, opts, 8.0, false);
}

BudgetRun gems_b(SamplingContext& ctx, const Instance& inst, double t_budget,
                 int n, double budget, const AlgoOptions& opts) {
  check_zeta(opts.zeta);
  if (n < 1) throw std::invalid_argument("gems_b: n must be >= 1");
  if (!(t_budget / n >= 2.0))
    throw std::invalid_argument("gems_b: budget below two pulls per iteration");
  require_targets_are_arms(inst);

  BudgetRun run;
  long long start = ctx.pulls_used();
  long long per_iter = static_cast<long long>(std::floor(t_budget / n));
  std::vector<int> active = all_targets(inst);
  if (active.size() == 1) return run;

  auto rd = [&](int d) { return r_d(d, opts.zeta, opts.rd_formula); };
  std::optional<int> d_tilde =
      opt_dim(static_cast<double>(per_iter), inst.dim(), rd);
  if (!d_tilde) {
    run.failed = true;
    run.recommendation = active.front();
    return run;
  }

  for (int k = 1; k <= n; ++k) {
    if (active.size() <= 1) break;
    auto choice = scan_dims(inst, active, *d_tilde, budget,
                            std::ldexp(1.0, 2 * k), false, opts);
    if (!choice) {
      run.failed = true;
      break;
    }
    Mat psi = truncate_cols(inst.arms(), choice->d);
    Allocation alloc = round_design(choice->sol.weights, per_iter, psi,
                                    choice->dirs, opts.zeta, opts.rd_formula);
    SampledRound round = sample_round(ctx, psi, alloc.counts);
    active = eliminate(inst, active, choice->d, round.theta, nullptr, 0.0,
                       std::ldexp(1.0, -k));
    run.iterations.push_back({k, choice->d, per_iter,
                              static_cast<int>(active.size()),
                              ctx.pulls_used()});
  }
  run.recommendation = active.front();
  run.pulls = ctx.pulls_used() - start;
  return run;
}

MasterRun master_fixed_confidence(SamplingContext& ctx, const Instance& inst,
                                  double delta, int max_ell, CounterRng rng,
                                  const AlgoOptions& opts) {
  check_delta(delta);
  if (max_ell < 1 || max_ell > 40)
    throw std::invalid_argument("master_fixed_confidence: max_ell outside [1, 40]");
  MasterRun run;
  run.recommendation =
      static_cast<int>(rng.next_below(static_cast<std::uint64_t>(inst.num_targets())));
  run.emissions.push_back({ctx.pulls_used(), run.recommendation});
  for (int ell = 1; ell <= max_ell; ++ell) {
    double delta_ell = delta / (2.0 * ell * ell * ell);
    for (int i = 1; i <= ell; ++i) {
      double budget = std::exp2(ell - i);
      int n = 1 << i;
      EliminationRun sub = gems_c(ctx, inst, delta_ell, n, budget, opts);
      for (const auto& it : sub.iterations) run.iterations.push_back(it);
      bool singleton = sub.active.size() == 1;
      if (singleton) run.recommendation = sub.active.front();
      run.emissions.push_back({ctx.pulls_used(), run.recommendation});
      if (singleton) break;
    }
  }
  run.pulls = ctx.pulls_used();
  return run;
}

MasterRun master_fixed_budget(SamplingContext& ctx, const Instance& inst,
                              long long t_budget, CounterRng rng,
                              const AlgoOptions& opts) {
  check_zeta(opts.zeta);
  require_targets_are_arms(inst);
  if (t_budget < 2) throw std::invalid_argument("budget too small");
  MasterRun run;
  const double t = static_cast<double>(t_budget);
  const int p = floor_w(t);
  const double t1 = t / p;

  std::vector<int> slots;
  for (int i = 1; i <= p; ++i) {
    double b_i = std::exp2(i);
    int q_i = floor_w(t1 / b_i);
    if (q_i < 1) continue;
    double t2 = t1 / q_i;
    for (int j = 1; j <= q_i; ++j) {
      int n_j = 1 << j;
      if (t2 / n_j < 2.0) continue;  // below the subroutine's minimum
      BudgetRun sub = gems_b(ctx, inst, t2, n_j, b_i, opts);
      for (const auto& it : sub.iterations) run.iterations.push_back(it);
      slots.push_back(sub.recommendation);
    }
  }
  if (opts.dedup_candidates) {
    std::vector<int> uniq;
    for (int z : slots)
      if (std::find(uniq.begin(), uniq.end(), z) == uniq.end()) uniq.push_back(z);
    slots = std::move(uniq);
  }

  if (slots.empty()) {
    run.recommendation = static_cast<int>(
        rng.next_below(static_cast<std::uint64_t>(inst.num_targets())));
  } else {
    long long v = t_budget / static_cast<long long>(slots.size());
    double best_mean = -kInf;
    int best_slot = 0;
    for (size_t s = 0; s < slots.size(); ++s) {
      int arm = *inst.arm_index_of_target(slots[s]);
      double mean = -kInf;
      if (v > 0) {
        double sum = 0.0;
        for (long long c = 0; c < v; ++c) sum += ctx.pull(arm);
        mean = sum / static_cast<double>(v);
      }
      if (mean > best_mean) {
        best_mean = mean;
        best_slot = static_cast<int>(s);
      }
    }
    run.recommendation = slots[best_slot];
    run.validations.push_back(
        {0, v, static_cast<int>(slots.size()), ctx.pulls_used()});
  }
  run.emissions.push_back({ctx.pulls_used(), run.recommendation});
  run.pulls = ctx.pulls_used();
  return run;
}

MasterRun master_misspecified(SamplingContext& ctx, const Instance& inst,
                              double delta, double eps, int max_ell,
                              CounterRng rng, const AlgoOptions& opts) {
  check_delta(delta);
  if (!(eps > 0.0))
    throw std::invalid_argument("master_misspecified: eps must be positive");
  if (max_ell < 1 || max_ell > 40)
    throw std::invalid_argument("master_misspecified: max_ell outside [1, 40]");
  require_targets_are_arms(inst);
  MasterRun run;
  run.recommendation = static_cast<int>(
      rng.next_below(static_cast<std::uint64_t>(inst.num_targets())));
  run.emissions.push_back({ctx.pulls_used(), run.recommendation});
  for (int ell = 1; ell <= max_ell; ++ell) {
    double delta_ell = delta / (4.0 * ell * ell * ell);
    std::vector<int> cands;
    for (int i = 1; i <= ell; ++i) {
      double budget = std::exp2(ell - i);
      int n = 1 << i;
      EliminationRun sub = gems_m(ctx, inst, delta_ell, n, budget, opts);
      for (const auto& it : sub.iterations) run.iterations.push_back(it);
      int z = sub.active.front();
      if (std::find(cands.begin(), cands.end(), z) == cands.end())
        cands.push_back(z);
    }
    long long v = static_cast<long long>(
        std::ceil(8.0 * std::log(2.0 / delta_ell) / (eps * eps)));
    double best_mean = -kInf;
    int best = cands.front();
    for (int z : cands) {
      int arm = *inst.arm_index_of_target(z);
      double sum = 0.0;
      for (long long c = 0; c < v; ++c) sum += ctx.pull(arm);
      double mean = sum / static_cast<double>(v);
      if (mean > best_mean) {
        best_mean = mean;
        best = z;
      }
    }
    run.recommendation = best;
    run.validations.push_back(
        {ell, v, static_cast<int>(cands.size()), ctx.pulls_used()});
    run.emissions.push_back({ctx.pulls_used(), run.recommendation});
  }
  run.pulls = ctx.pulls_used();
  return run;
}

BudgetRun oracle_static(SamplingContext& ctx, const Instance& inst,
                        long long n_pulls, int d, const AlgoOptions& opts) {
  check_zeta(opts.zeta);
  if (d < 1 || d > inst.dim())
    throw std::invalid_argument("oracle_static: d outside [1, dim]");
  BudgetRun run;
  if (inst.num_targets() == 1) return run;
  long long start = ctx.pulls_used();
  auto dirs = rho_directions(inst, d, 0.0);
  Mat psi = truncate_cols(inst.arms(), d);
  DesignSolution sol = solve_rho_design(inst, d, 0.0, opts.design);
  Allocation alloc =
      round_design(sol.weights, n_pulls, psi, dirs, opts.zeta, opts.rd_formula);
  SampledRound round = sample_round(ctx, psi, alloc.counts);
  run.recommendation = recommend_by_estimate(inst, round.theta, d);
  run.iterations.push_back({1, d, n_pulls, inst.num_targets(), ctx.pulls_used()});
  run.pulls = ctx.pulls_used() - start;
  return run;
}

LeastSquaresFit pull_and_fit(SamplingContext& ctx, const Mat& psi,
                             const Eigen::VectorXi& counts) {
  if (counts.size() != psi.cols())
    throw std::invalid_argument("pull_and_fit: counts size mismatch");
  SampledRound round = sample_round(ctx, psi, counts);
  return {round.theta, round.rank_def};
}

int recommend_by_estimate(const Instance& inst, const Vec& theta, int d) {
  if (theta.size() != d)
    throw std::invalid_argument("recommend_by_estimate: theta must be in R^d");
  Mat t = truncate_cols(inst.targets(), d);
  int best = 0;
  double best_val = theta.dot(t.col(0));
  for (int z = 1; z < inst.num_targets(); ++z) {
    double v = theta.dot(t.col(z));
    if (v > best_val) {
      best_val = v;
      best = z;
    }
  }
  return best;
}

}  // namespace gems
