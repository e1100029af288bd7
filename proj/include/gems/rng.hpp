#ifndef GEMS_RNG_HPP
#define GEMS_RNG_HPP

#include <cstdint>

namespace gems {

// Threefry2x64-20 block; returns the first output word.
std::uint64_t threefry2x64(std::uint64_t k0, std::uint64_t k1,
                           std::uint64_t c0, std::uint64_t c1);

// AS 241 rational approximation of the standard normal quantile.
double inverse_normal_cdf(double p);

// Counter-based stream: draw i of stream s under seed m is a pure function
// of (m, s, i). Trials can therefore be replayed in any order or subset
// without changing their samples.
struct CounterRng {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::uint64_t counter = 0;

  std::uint64_t next_u64() { return threefry2x64(seed, stream, counter++, 0); }

  // open interval (0,1), safe to feed through the normal quantile
  double next_u01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53 + 0x1.0p-54;
  }

  double next_gaussian() { return inverse_normal_cdf(next_u01()); }

  double next_uniform(double lo, double hi) {
    return lo + (hi - lo) * next_u01();
  }

  // uniform in {0, ..., n-1} by rejection, n >= 1
  std::uint64_t next_below(std::uint64_t n);
};

}  // namespace gems

#endif
