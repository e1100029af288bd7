#include "gems/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace gems {

namespace {

inline std::uint64_t rotl64(std::uint64_t x, int r) {
  return (x << r) | (x >> (64 - r));
}

constexpr int kRot[8] = {16, 42, 12, 31, 16, 32, 24, 21};
constexpr std::uint64_t kParity = 0x1BD11BDAA9FC1A22ULL;

}  // namespace

std::uint64_t threefry2x64(std::uint64_t k0, std::uint64_t k1,
                           std::uint64_t c0, std::uint64_t c1) {
  std::uint64_t ks[3] = {k0, k1, kParity ^ k0 ^ k1};
  std::uint64_t x0 = c0 + ks[0];
  std::uint64_t x1 = c1 + ks[1];
  for (int round = 0; round < 20; ++round) {
    x0 += x1;
    x1 = rotl64(x1, kRot[round % 8]);
    x1 ^= x0;
    if (round % 4 == 3) {
      std::uint64_t s = static_cast<std::uint64_t>(round / 4 + 1);
      x0 += ks[s % 3];
      x1 += ks[(s + 1) % 3] + s;
    }
  }
  return x0;
}

std::uint64_t CounterRng::next_below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("next_below: n must be positive");
  std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  for (;;) {
    std::uint64_t v = next_u64();
    if (v < limit) return v % n;
  }
}

// Wichura's PPND16 (Applied Statistics 241), |error| < 1e-15 over (0,1).
double inverse_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("inverse_normal_cdf: p outside (0,1)");
  double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    double r = 0.180625 - q * q;
    double num = (((((((2.5090809287301226727e3 * r +
                        3.3430575583588128105e4) * r +
                       6.7265770927008700853e4) * r +
                      4.5921953931549871457e4) * r +
                     1.3731693765509461125e4) * r +
                    1.9715909503065514427e3) * r +
                   1.3314166789178437745e2) * r +
                  3.3871328727963666080e0);
    double den = (((((((5.2264952788528545610e3 * r +
                        2.8729085735721942674e4) * r +
                       3.9307895800092710610e4) * r +
                      2.1213794301586595867e4) * r +
                     5.3941960214247511077e3) * r +
                    6.8718700749205790830e2) * r +
                   4.2313330701600911252e1) * r +
                  1.0);
    return q * num / den;
  }
  double r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    double num = (((((((7.74545014278341407640e-4 * r +
                        2.27238449892691845833e-2) * r +
                       2.41780725177450611770e-1) * r +
                      1.27045825245236838258e0) * r +
                     3.64784832476320460504e0) * r +
                    5.76949722146069140550e0) * r +
                   4.63033784615654529590e0) * r +
                  1.42343711074968357734e0);
    double den = (((((((1.05075007164441684324e-9 * r +
                        5.47593808499534494600e-4) * r +
                       1.51986665636164571966e-2) * r +
                      1.48103976427480074590e-1) * r +
                     6.89767334985100004550e-1) * r +
                    1.67638483018380384940e0) * r +
                   2.05319162663775882187e0) * r +
                  1.0);
    val = num / den;
  } else {
    r -= 5.0;
    double num = (((((((2.01033439929228813265e-7 * r +
                        2.71155556874348757815e-5) * r +
                       1.24266094738807843860e-3) * r +
                      2.65321895265761230930e-2) * r +
                     2.96560571828504891230e-1) * r +
                    1.78482653991729133580e0) * r +
                   5.46378491116411436990e0) * r +
                  6.65790464350110377720e0);
    double den = (((((((2.04426310338993978564e-15 * r +
                        1.42151175831644588870e-7) * r +
                       1.84631831751005468180e-5) * r +
                      7.86869131145613259100e-4) * r +
                     1.48753612908506148525e-2) * r +
                    1.36929880922735805310e-1) * r +
                   5.99832206555887937690e-1) * r +
                  1.0);
    val = num / den;
  }
  return (q < 0.0) ? -val : val;
}

}  // namespace gems
