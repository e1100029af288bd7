#ifndef GEMS_LP_HPP
#define GEMS_LP_HPP

#include <Eigen/Dense>
#include <vector>

namespace gems {

// Small dense linear program:
//   minimize    c.x
//   subject to  a_ub x <= b_ub,  a_eq x == b_eq
// Variables are free unless flagged nonnegative. Solved by a two-phase
// tableau simplex with Bland's rule; intended for the desk-scale systems
// that show up here (tens of rows/columns).
struct LpProblem {
  Eigen::VectorXd c;
  Eigen::MatrixXd a_ub;
  Eigen::VectorXd b_ub;
  Eigen::MatrixXd a_eq;
  Eigen::VectorXd b_eq;
  std::vector<bool> nonneg;  // empty means all free
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpSolution {
  LpStatus status;
  double value = 0.0;
  Eigen::VectorXd x;
};

LpSolution solve_lp(const LpProblem& prob);

}  // namespace gems

#endif
