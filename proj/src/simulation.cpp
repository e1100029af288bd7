#include "gems/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gems/misspec.hpp"

namespace gems {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// earliest emission from which every later recommendation satisfies ok
std::optional<long long> first_stable(const std::vector<Emission>& emissions,
                                      const std::function<bool(int)>& ok) {
  std::optional<long long> at;
  for (const Emission& e : emissions) {
    if (ok(e.target)) {
      if (!at) at = e.pulls;
    } else {
      at.reset();
    }
  }
  return at;
}

int default_n(const Instance& inst) {
  double mg = inst.min_gap();
  if (!std::isfinite(mg) || mg <= 0.0) return 1;
  return std::max(1, static_cast<int>(std::ceil(std::log2(2.0 / mg))));
}

double quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  size_t idx = static_cast<size_t>(
      std::ceil(q * static_cast<double>(sorted.size()))) ;
  if (idx > 0) --idx;
  if (idx >= sorted.size()) idx = sorted.size() - 1;
  return sorted[idx];
}

}  // namespace

Environment::Environment(const Instance& inst, const NoiseSpec& noise,
                         CounterRng rng)
    : inst_(&inst), noise_(noise), rng_(rng) {
  if (noise_.kind == NoiseKind::bounded &&
      !(noise_.bound > 0.0 && noise_.bound <= 1.0))
    throw std::invalid_argument("bounded noise half-width outside (0, 1]");
}

double Environment::do_pull(int arm) {
  if (arm < 0 || arm >= inst_->num_arms())
    throw std::out_of_range("pull: arm index out of range");
  double mean = inst_->arm_reward(arm);
  switch (noise_.kind) {
    case NoiseKind::none:
      return mean;
    case NoiseKind::bounded:
      return mean + rng_.next_uniform(-noise_.bound, noise_.bound);
    case NoiseKind::gaussian_unit:
    default:
      return mean + rng_.next_gaussian();
  }
}

std::optional<AlgoName> parse_algo_name(const std::string& s) {
  if (s == "gems_c") return AlgoName::gems_c;
  if (s == "gems_b") return AlgoName::gems_b;
  if (s == "gems_m") return AlgoName::gems_m;
  if (s == "master_fc") return AlgoName::master_fc;
  if (s == "master_fb") return AlgoName::master_fb;
  if (s == "master_mis") return AlgoName::master_mis;
  if (s == "oracle_static") return AlgoName::oracle_static;
  return std::nullopt;
}

std::string algo_name_string(AlgoName name) {
  switch (name) {
    case AlgoName::gems_c: return "gems_c";
    case AlgoName::gems_b: return "gems_b";
    case AlgoName::gems_m: return "gems_m";
    case AlgoName::master_fc: return "master_fc";
    case AlgoName::master_fb: return "master_fb";
    case AlgoName::master_mis: return "master_mis";
    case AlgoName::oracle_static: return "oracle_static";
  }
  return "unknown";
}

ReferenceBounds reference_bounds(const Instance& inst, double delta,
                                 double t_budget, int n,
                                 const DesignOptions& opts) {
  if (!inst.intrinsic_dim())
    throw std::invalid_argument(
        "reference_bounds: instance has no known intrinsic dimension");
  ReferenceBounds b;
  b.d_star = *inst.intrinsic_dim();
  b.rho_star = compute_rho(inst, b.d_star, 0.0, opts);
  b.fixed_conf_lower = b.rho_star * std::log(1.0 / (2.4 * delta));
  b.oracle_upper = 0.5 * b.rho_star * std::log(1.0 / delta);
  if (n <= 0) n = default_n(inst);
  const double nz2 =
      static_cast<double>(inst.num_targets()) * inst.num_targets();
  if (t_budget > 0.0) {
    b.subroutine_budget_error =
        n * nz2 * std::exp(-t_budget / (640.0 * n * b.rho_star));
    double mg = inst.min_gap();
    if (std::isfinite(mg) && mg > 0.0 && t_budget > 1.0) {
      double lg = std::log2(4.0 / mg);
      double lt = std::log2(t_budget);
      b.master_budget_error =
          lg * nz2 * std::exp(-t_budget / (640.0 * lg * b.rho_star)) +
          2.0 * lt * lt * std::exp(-t_budget * mg * mg / (8.0 * lt * lt));
    } else {
      b.master_budget_error = kNan;
    }
  } else {
    b.subroutine_budget_error = kNan;
    b.master_budget_error = kNan;
  }
  return b;
}

double misspec_budget_error(const Instance& inst, double eps, double t_budget,
                            int n, double zeta, const DesignOptions& opts) {
  int d_star = compute_d_star(inst, eps, zeta, opts);
  double rho = compute_rho(inst, d_star, eps, opts);
  if (n <= 0) n = 1;
  const double nz2 =
      static_cast<double>(inst.num_targets()) * inst.num_targets();
  return n * nz2 * std::exp(-t_budget / (2560.0 * n * rho));
}

TrialResult run_trial(const Instance& inst, const AlgorithmSpec& algo,
                      int trial, std::uint64_t seed, const NoiseSpec& noise,
                      const AlgoOptions& opts) {
  TrialResult r;
  r.trial = trial;
  Environment env(inst, noise,
                  CounterRng(seed, 2 * static_cast<std::uint64_t>(trial)));
  CounterRng algo_rng(seed, 2 * static_cast<std::uint64_t>(trial) + 1);
  const int z_star = inst.best_target();
  auto eps_ok = [&](double slack) {
    return [&inst, slack](int z) { return inst.gap(z) <= slack + 1e-12; };
  };
  try {
    switch (algo.name) {
      case AlgoName::gems_c: {
        EliminationRun run =
            gems_c(env, inst, algo.delta, algo.n, algo.budget, opts);
        r.active = run.active;
        r.recommendation = run.active.front();
        r.iterations = run.iterations;
        // success: the true best survives and every survivor has gap below
        // the elimination resolution
        double res = std::ldexp(1.0, 1 - algo.n);
        bool all_small = true;
        for (int z : run.active)
          if (inst.gap(z) >= res) all_small = false;
        r.correct = all_small && std::find(run.active.begin(), run.active.end(),
                                           z_star) != run.active.end();
        break;
      }
      case AlgoName::gems_m: {
        EliminationRun run =
            gems_m(env, inst, algo.delta, algo.n, algo.budget, opts);
        r.active = run.active;
        r.recommendation = run.active.front();
        r.iterations = run.iterations;
        r.correct = eps_ok(algo.eps)(r.recommendation);
        break;
      }
      case AlgoName::gems_b: {
        BudgetRun run =
            gems_b(env, inst, algo.t_budget, algo.n, algo.budget, opts);
        r.recommendation = run.recommendation;
        r.iterations = run.iterations;
        r.correct = !run.failed && r.recommendation == z_star;
        break;
      }
      case AlgoName::master_fc: {
        MasterRun run = master_fixed_confidence(env, inst, algo.delta,
                                                algo.max_ell, algo_rng, opts);
        r.recommendation = run.recommendation;
        r.iterations = run.iterations;
        r.emissions = run.emissions;
        r.correct = r.recommendation == z_star;
        r.first_correct_at =
            first_stable(run.emissions, [&](int z) { return z == z_star; });
        break;
      }
      case AlgoName::master_fb: {
        MasterRun run =
            master_fixed_budget(env, inst, static_cast<long long>(algo.t_budget),
                                algo_rng, opts);
        r.recommendation = run.recommendation;
        r.iterations = run.iterations;
        r.emissions = run.emissions;
        r.validations = run.validations;
        r.correct = r.recommendation == z_star;
        break;
      }
      case AlgoName::master_mis: {
        MasterRun run = master_misspecified(env, inst, algo.delta, algo.eps,
                                            algo.max_ell, algo_rng, opts);
        r.recommendation = run.recommendation;
        r.iterations = run.iterations;
        r.emissions = run.emissions;
        r.validations = run.validations;
        r.correct = eps_ok(2.0 * algo.eps)(r.recommendation);
        r.first_correct_at = first_stable(run.emissions, eps_ok(2.0 * algo.eps));
        break;
      }
      case AlgoName::oracle_static: {
        BudgetRun run = oracle_static(env, inst, algo.n_pulls, algo.d, opts);
        r.recommendation = run.recommendation;
        r.iterations = run.iterations;
        r.correct = r.recommendation == z_star;
        break;
      }
    }
  } catch (const std::exception& e) {
    r.failed = true;
    r.error = e.what();
    r.correct = false;
  }
  r.samples = env.pulls_used();
  return r;
}

BatchReport run_batch(const Instance& inst, const AlgorithmSpec& algo,
                      int trials, std::uint64_t seed, const NoiseSpec& noise,
                      const AlgoOptions& opts) {
  if (trials < 1) throw std::invalid_argument("run_batch: trials must be >= 1");
  BatchReport rep;
  rep.trials = trials;
  rep.results.reserve(trials);
  for (int t = 0; t < trials; ++t)
    rep.results.push_back(run_trial(inst, algo, t, seed, noise, opts));

  std::vector<double> samples;
  samples.reserve(trials);
  double first_sum = 0.0;
  for (const TrialResult& r : rep.results) {
    if (!r.correct) ++rep.errors;
    if (r.failed) ++rep.failures;
    samples.push_back(static_cast<double>(r.samples));
    if (r.first_correct_at) {
      ++rep.first_correct_count;
      first_sum += static_cast<double>(*r.first_correct_at);
    }
  }
  rep.error_rate = static_cast<double>(rep.errors) / trials;

  const double z = 1.959963984540054;  // two-sided 95% normal quantile
  const double nn = trials;
  const double p = rep.error_rate;
  const double denom = 1.0 + z * z / nn;
  const double center = (p + z * z / (2.0 * nn)) / denom;
  const double half =
      z * std::sqrt(p * (1.0 - p) / nn + z * z / (4.0 * nn * nn)) / denom;
  rep.ci_low = std::max(0.0, center - half);
  rep.ci_high = std::min(1.0, center + half);
  // the interval ends are exact at the empirical extremes
  if (rep.errors == 0) rep.ci_low = 0.0;
  if (rep.errors == rep.trials) rep.ci_high = 1.0;

  std::sort(samples.begin(), samples.end());
  double sum = 0.0;
  for (double s : samples) sum += s;
  rep.mean_samples = sum / nn;
  rep.min_samples = samples.front();
  rep.q50_samples = quantile(samples, 0.5);
  rep.q90_samples = quantile(samples, 0.9);
  rep.max_samples = samples.back();
  if (rep.first_correct_count > 0)
    rep.mean_first_correct = first_sum / rep.first_correct_count;

  if (inst.intrinsic_dim()) {
    int n_ref = algo.name == AlgoName::gems_b ? algo.n : 0;
    rep.bounds =
        reference_bounds(inst, algo.delta, algo.t_budget, n_ref, opts.design);
  }
  return rep;
}

}  // namespace gems
