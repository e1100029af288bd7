#ifndef GEMS_MISSPEC_HPP
#define GEMS_MISSPEC_HPP

#include <stdexcept>

#include "gems/design.hpp"
#include "gems/instance.hpp"

namespace gems {

struct ChebyshevFit {
  Vec theta;           // in R^d
  double gamma_tilde;  // minimax residual over arms and targets
};

// best uniform-error linear fit of the rewards on the first d coordinates
ChebyshevFit chebyshev_fit(const Instance& inst, int d);

// Effective misspecification at truncation d: the smallest 2*2^-n whose
// per-stratum conditions
//   (2 + sqrt((1+zeta) iota(pairs(stratum_k)))) * gamma_tilde(d) <= 2^-k / 2
// hold for every k <= n (n capped at 60); 2 when even k=1 fails.
double compute_gamma(const Instance& inst, int d, double zeta,
                     const DesignOptions& opts = {});

struct EpsilonUnreachable : std::runtime_error {
  EpsilonUnreachable()
      : std::runtime_error("epsilon unreachable at ambient dimension") {}
};

// smallest d whose whole suffix keeps gamma within eps; throws
// EpsilonUnreachable when even the ambient dimension misses it
int compute_d_star(const Instance& inst, double eps, double zeta,
                   const DesignOptions& opts = {});

// vacuously true when gamma(d) > eps; otherwise re-derives the stratum
// conditions up to ceil(log2(2/eps))
bool check_round_number(const Instance& inst, int d, double eps, double zeta,
                        const DesignOptions& opts = {});

}  // namespace gems

#endif
