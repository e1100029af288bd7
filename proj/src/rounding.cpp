#include "gems/rounding.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "gems/design.hpp"

namespace gems {

double r_d(int d, double zeta, RdFormula formula) {
  if (d < 1) throw std::invalid_argument("r_d: d must be >= 1");
  if (!(zeta > 0.0)) throw std::invalid_argument("r_d: zeta must be positive");
  if (formula == RdFormula::linear_alt) return 180.0 * d / (zeta * zeta);
  return (static_cast<double>(d) * d + d + 2.0) / zeta;
}

long long Allocation::total() const {
  long long s = 0;
  for (int i = 0; i < counts.size(); ++i) s += counts[i];
  return s;
}

namespace {

constexpr double kSupportCut = 1e-9;

int matrix_rank(const Mat& m) {
  Eigen::ColPivHouseholderQR<Mat> qr(m);
  return static_cast<int>(qr.rank());
}

}  // namespace

Allocation round_design(const Vec& weights, long long N, const Mat& psi,
                        const std::vector<Vec>& directions, double zeta,
                        RdFormula formula) {
  const int n = static_cast<int>(psi.cols());
  const int d = static_cast<int>(psi.rows());
  if (weights.size() != n)
    throw std::invalid_argument("round_design: weight size mismatch");
  if (!(zeta >= 0.1 - 1e-12 && zeta <= 0.25 + 1e-12))
    throw std::invalid_argument("round_design: zeta outside [1/10, 1/4]");
  if (weights.minCoeff() < -1e-12 || std::fabs(weights.sum() - 1.0) > 1e-9)
    throw std::invalid_argument("round_design: weights not on the simplex");
  if (static_cast<double>(N) < r_d(d, zeta, formula))
    throw std::invalid_argument("round_design: N below r_d(zeta)");

  // fold negligible weights into the heaviest arm
  Vec w = weights.cwiseMax(0.0);
  int heaviest = 0;
  w.maxCoeff(&heaviest);
  for (int i = 0; i < n; ++i) {
    if (i != heaviest && w[i] < kSupportCut) {
      w[heaviest] += w[i];
      w[i] = 0.0;
    }
  }
  w /= w.sum();

  // rank-deficient support cannot carry the guarantee; mix toward uniform
  {
    std::vector<int> sup;
    for (int i = 0; i < n; ++i)
      if (w[i] > 0.0) sup.push_back(i);
    Mat cols(d, static_cast<int>(sup.size()));
    for (size_t k = 0; k < sup.size(); ++k)
      cols.col(static_cast<int>(k)) = psi.col(sup[k]);
    if (matrix_rank(cols) < d) {
      double z1 = zeta / 4.0;
      w = (1.0 - z1) * w + z1 * Vec::Constant(n, 1.0 / n);
    }
  }

  std::vector<int> support;
  for (int i = 0; i < n; ++i)
    if (w[i] > 0.0) support.push_back(i);
  const int ell = static_cast<int>(support.size());

  // efficient apportionment: ceiling start, then trade counts by ratio
  std::vector<long long> cnt(ell);
  long long sum = 0;
  for (int k = 0; k < ell; ++k) {
    cnt[k] = static_cast<long long>(
        std::ceil((static_cast<double>(N) - 0.5 * ell) * w[support[k]]));
    if (cnt[k] < 1) cnt[k] = 1;
    sum += cnt[k];
  }
  while (sum > N) {
    int pick = 0;
    double best = -1.0;
    for (int k = 0; k < ell; ++k) {
      double ratio = (cnt[k] - 1.0) / w[support[k]];
      if (ratio > best) {
        best = ratio;
        pick = k;
      }
    }
    --cnt[pick];
    --sum;
  }
  while (sum < N) {
    int pick = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < ell; ++k) {
      double ratio = cnt[k] / w[support[k]];
      if (ratio < best) {
        best = ratio;
        pick = k;
      }
    }
    ++cnt[pick];
    ++sum;
  }

  Allocation alloc;
  alloc.counts = Eigen::VectorXi::Zero(n);
  for (int k = 0; k < ell; ++k)
    alloc.counts[support[k]] = static_cast<int>(cnt[k]);

  if (!directions.empty()) {
    Vec wc = Vec::Zero(n);
    for (int i = 0; i < n; ++i) wc[i] = static_cast<double>(alloc.counts[i]);
    double lhs = 0.0, target = 0.0;
    for (const Vec& y : directions) {
      lhs = std::max(lhs, weighted_norm_sq(y, psi, wc));
      target = std::max(target, weighted_norm_sq(y, psi, weights));
    }
    double rhs = (1.0 + zeta) * target / static_cast<double>(N);
    if (lhs > rhs * (1.0 + 1e-9) + 1e-12) {
      std::ostringstream msg;
      msg << "round_design: guarantee violated (N=" << N << ", d=" << d
          << ", achieved=" << lhs << ", allowed=" << rhs << ")";
      throw std::runtime_error(msg.str());
    }
  }
  return alloc;
}

}  // namespace gems
