#include "gems/misspec.hpp"

#include <cmath>
#include <map>

#include "gems/lp.hpp"

namespace gems {

ChebyshevFit chebyshev_fit(const Instance& inst, int d) {
  if (d < 1 || d > inst.dim())
    throw std::invalid_argument("chebyshev_fit: d outside [1, dim]");
  const int na = inst.num_arms();
  const int nz = inst.targets_are_arms() ? 0 : inst.num_targets();
  const int m = na + nz;

  // variables (theta, t): minimize t with |h(x) - <theta, psi_d(x)>| <= t
  LpProblem lp;
  lp.c = Vec::Zero(d + 1);
  lp.c[d] = 1.0;
  lp.a_ub = Mat::Zero(2 * m, d + 1);
  lp.b_ub = Vec::Zero(2 * m);
  for (int i = 0; i < m; ++i) {
    Vec p = i < na ? truncate(inst.arm(i), d) : truncate(inst.target(i - na), d);
    double h = i < na ? inst.arm_reward(i) : inst.target_reward(i - na);
    lp.a_ub.row(2 * i).head(d) = p.transpose();
    lp.a_ub(2 * i, d) = -1.0;
    lp.b_ub[2 * i] = h;
    lp.a_ub.row(2 * i + 1).head(d) = -p.transpose();
    lp.a_ub(2 * i + 1, d) = -1.0;
    lp.b_ub[2 * i + 1] = -h;
  }
  LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::optimal)
    throw std::runtime_error("chebyshev_fit: LP did not reach an optimum");
  return {sol.x.head(d), std::max(sol.value, 0.0)};
}

namespace {

// conditions share stratum complexities across k; cache by member list
struct StratumIota {
  const Instance& inst;
  int d;
  const DesignOptions& opts;
  std::map<std::vector<int>, double> cache;

  double at(int k) {
    auto s = inst.stratum(k);
    auto it = cache.find(s);
    if (it != cache.end()) return it->second;
    double v = compute_iota(inst, s, d, opts);
    cache.emplace(std::move(s), v);
    return v;
  }
};

bool stratum_condition(double iota, double gamma_tilde, double zeta, int k) {
  return (2.0 + std::sqrt((1.0 + zeta) * iota)) * gamma_tilde <=
         std::ldexp(1.0, -k) / 2.0;
}

}  // namespace

double compute_gamma(const Instance& inst, int d, double zeta,
                     const DesignOptions& opts) {
  double gt = chebyshev_fit(inst, d).gamma_tilde;
  StratumIota si{inst, d, opts, {}};
  int n = 0;
  while (n < 60 && stratum_condition(si.at(n + 1), gt, zeta, n + 1)) ++n;
  return 2.0 * std::ldexp(1.0, -n);
}

int compute_d_star(const Instance& inst, double eps, double zeta,
                   const DesignOptions& opts) {
  if (!(eps > 0.0))
    throw std::invalid_argument("compute_d_star: eps must be positive");
  const int dim = inst.dim();
  std::vector<double> gammas(dim + 1);
  for (int d = 1; d <= dim; ++d) gammas[d] = compute_gamma(inst, d, zeta, opts);
  int best = -1;
  for (int d = dim; d >= 1; --d) {
    if (gammas[d] > eps) break;
    best = d;
  }
  if (best < 0) throw EpsilonUnreachable();
  return best;
}

bool check_round_number(const Instance& inst, int d, double eps, double zeta,
                        const DesignOptions& opts) {
  if (!(eps > 0.0))
    throw std::invalid_argument("check_round_number: eps must be positive");
  if (compute_gamma(inst, d, zeta, opts) > eps) return true;
  int kmax = static_cast<int>(std::ceil(std::log2(2.0 / eps)));
  double gt = chebyshev_fit(inst, d).gamma_tilde;
  StratumIota si{inst, d, opts, {}};
  for (int k = 1; k <= kmax; ++k)
    if (!stratum_condition(si.at(k), gt, zeta, k)) return false;
  return true;
}

}  // namespace gems
