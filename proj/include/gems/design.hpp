#ifndef GEMS_DESIGN_HPP
#define GEMS_DESIGN_HPP

#include <stdexcept>
#include <vector>

#include "gems/instance.hpp"

namespace gems {

struct DesignOptions {
  double tol = 1e-2;      // certified relative optimality gap
  int max_iters = 10000;
  double ridge = 1e-10;   // added inside the iteration only
  bool line_search = true;
};

struct DesignSolution {
  Vec weights;          // over arms, on the simplex
  double value;         // strict pseudo-inverse evaluation, +inf possible
  int iterations;
  double relative_gap;  // last certified bound on (value - opt) / opt
};

struct SolverStalled : std::runtime_error {
  DesignSolution best;
  explicit SolverStalled(DesignSolution b)
      : std::runtime_error("design solver hit the iteration cap"),
        best(std::move(b)) {}
};

// Spectral pseudo-inverse of a PSD matrix, shared by the solver and the
// least-squares estimators.
class PinvQuad {
 public:
  explicit PinvQuad(const Mat& a);
  // ||y||^2 under A^+; +inf when y leaves range(A) by more than 1e-8 ||y||
  double operator()(const Vec& y) const;
  Vec solve(const Vec& b) const;  // A^+ b
  int rank() const;

 private:
  Mat v_;
  Vec evals_;
  double cutoff_ = 0.0;
};

// ||y||^2 under the pseudo-inverse of A(w) = sum_i w_i psi_i psi_i^T.
// Returns +inf when y lies outside range(A) (residual above 1e-8 * ||y||).
double weighted_norm_sq(const Vec& y, const Mat& psi, const Vec& weights);

// min over simplex designs of max_y ||y||^2_{A(w)^-1}. Frank-Wolfe with
// uniform start, exact line search (2/(t+2) fallback), and a dual
// lower-bound certificate for the stopping rule.
DesignSolution solve_design(const std::vector<Vec>& directions, const Mat& psi,
                            const DesignOptions& opts = {});

// pairwise direction-set complexity of a target subset at truncation d
double compute_iota(const Instance& inst, const std::vector<int>& subset,
                    int d, const DesignOptions& opts = {});
double compute_iota(const Instance& inst, int d, const DesignOptions& opts = {});
// best-vs-rest directions, unscaled
double iota_star(const Instance& inst, int d, const DesignOptions& opts = {});

// gap-normalized complexity; eps floors the denominators
double compute_rho(const Instance& inst, int d, double eps = 0.0,
                   const DesignOptions& opts = {});
// the scaled best-vs-rest directions behind solve_rho_design
std::vector<Vec> rho_directions(const Instance& inst, int d, double eps = 0.0);
DesignSolution solve_rho_design(const Instance& inst, int d, double eps = 0.0,
                                const DesignOptions& opts = {});
// surrogate-gap variant: denominators <theta_d, psi_d(z*) - psi_d(z)>,
// floored at eps; +inf when a nonzero direction has a nonpositive floor
double compute_rho_tilde(const Instance& inst, int d, double eps,
                         const Vec& theta_d, const DesignOptions& opts = {});

}  // namespace gems

#endif
