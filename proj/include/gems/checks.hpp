#ifndef GEMS_CHECKS_HPP
#define GEMS_CHECKS_HPP

#include <string>
#include <vector>

#include "gems/instance.hpp"
#include "gems/rng.hpp"

namespace gems {

// Exhaustive reference for the design objective: evaluates the min-max
// value over every simplex weight vector on a 1/resolution grid, with its
// own matrix-inverse evaluation (no solver code shared).
double grid_design_value(const std::vector<Vec>& directions, const Mat& psi,
                         int resolution = 100);

// Basis arms plus `extra_arms` uniform draws from [-1,1]^dim, rewards
// <theta, x> with theta supported on the first d_star coordinates, gaps
// rescaled under 2, unique best. Targets are the arms.
Instance random_linear_instance(CounterRng& rng, int dim, int d_star,
                                int extra_arms);

// Same arm layout with rewards perturbed by a uniform offset in
// [-level, level]; explicit tables, no model parameter carried.
Instance random_misspec_instance(CounterRng& rng, int dim, int d_star,
                                 int extra_arms, double level);

struct SuiteResult {
  bool pass = true;
  std::string report;
};

// design-oracle | monotonicity | rounding | misspec-props | pac-montecarlo
const std::vector<std::string>& suite_names();
SuiteResult run_suite(const std::string& name);

}  // namespace gems

#endif
