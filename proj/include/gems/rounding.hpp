#ifndef GEMS_ROUNDING_HPP
#define GEMS_ROUNDING_HPP

#include <cstdint>
#include <vector>

#include "gems/instance.hpp"

namespace gems {

enum class RdFormula {
  quadratic,  // (d^2 + d + 2) / zeta
  linear_alt, // 180 d / zeta^2
};

// minimum sample count for the (1+zeta) rounding guarantee at truncation d
double r_d(int d, double zeta, RdFormula formula = RdFormula::quadratic);

struct Allocation {
  Eigen::VectorXi counts;  // per arm, sums to N
  long long total() const;
};

// Integer apportionment of N pulls to the design's support. Guarantees
//   max_y ||y||^2 under (sum_x counts_x psi_x psi_x^T)^+
//     <= (1+zeta)/N * max_y ||y||^2 under A(weights)^+
// for the supplied directions (checked on every call). Weights below 1e-9
// are folded into the heaviest arm first; rank-deficient supports are
// blended with the uniform design at weight zeta/4 before rounding.
Allocation round_design(const Vec& weights, long long N, const Mat& psi,
                        const std::vector<Vec>& directions, double zeta,
                        RdFormula formula = RdFormula::quadratic);

}  // namespace gems

#endif
