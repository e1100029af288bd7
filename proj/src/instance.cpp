#include "gems/instance.hpp"

#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>

namespace gems {

namespace {

constexpr double kTieTol = 1e-9;
constexpr double kThetaTol = 1e-12;

int full_rank_dim(const Mat& m) {
  Eigen::ColPivHouseholderQR<Mat> qr(m);
  return static_cast<int>(qr.rank());
}

}  // namespace

Instance::Instance(Mat arms, Vec arm_rewards, Mat targets, Vec target_rewards,
                   std::optional<Vec> theta, std::optional<int> intrinsic_dim)
    : arms_(std::move(arms)),
      targets_(std::move(targets)),
      arm_rewards_(std::move(arm_rewards)),
      target_rewards_(std::move(target_rewards)),
      theta_(std::move(theta)),
      intrinsic_dim_(intrinsic_dim) {
  const int d = dim();
  if (d < 1 || num_arms() < 1)
    throw std::invalid_argument("instance: need at least one arm in R^d, d >= 1");
  if (arm_rewards_.size() != num_arms())
    throw std::invalid_argument("instance: arm reward table size mismatch");
  if (targets_.size() == 0) {
    targets_ = arms_;
    target_rewards_ = arm_rewards_;
    targets_are_arms_ = true;
  }
  if (targets_.rows() != d)
    throw std::invalid_argument("instance: target dimension mismatch");
  if (target_rewards_.size() != num_targets())
    throw std::invalid_argument("instance: target reward table size mismatch");
  if (num_targets() < 1)
    throw std::invalid_argument("instance: need at least one target");
  if (full_rank_dim(arms_) < d)
    throw std::invalid_argument("instance: arms do not span R^d");

  best_ = 0;
  for (int z = 1; z < num_targets(); ++z)
    if (target_rewards_[z] > target_rewards_[best_]) best_ = z;
  for (int z = 0; z < num_targets(); ++z) {
    if (z == best_) continue;
    if (target_rewards_[best_] - target_rewards_[z] <= kTieTol)
      throw std::invalid_argument("instance: best target not unique (tie within 1e-9)");
  }
  if (max_gap() > 2.0 + 1e-12)
    throw std::invalid_argument("instance: maximum gap exceeds 2");

  if (theta_) {
    if (theta_->size() != d)
      throw std::invalid_argument("instance: theta dimension mismatch");
    for (int i = 0; i < num_arms(); ++i)
      if (std::fabs(arm_rewards_[i] - theta_->dot(arms_.col(i))) > kThetaTol)
        throw std::invalid_argument("instance: arm reward disagrees with theta");
    for (int z = 0; z < num_targets(); ++z)
      if (std::fabs(target_rewards_[z] - theta_->dot(targets_.col(z))) > kThetaTol)
        throw std::invalid_argument("instance: target reward disagrees with theta");
  }
  if (intrinsic_dim_) {
    if (*intrinsic_dim_ < 1 || *intrinsic_dim_ > d)
      throw std::invalid_argument("instance: intrinsic dimension out of range");
    if (theta_)
      for (int i = *intrinsic_dim_; i < d; ++i)
        if (std::fabs((*theta_)[i]) > kThetaTol)
          throw std::invalid_argument(
              "instance: theta has support beyond the intrinsic dimension");
  }

  if (!targets_are_arms_) {
    for (int z = 0; z < num_targets(); ++z) {
      auto i = arm_index_of_target(z);
      if (i && std::fabs(arm_rewards_[*i] - target_rewards_[z]) > kTieTol)
        throw std::invalid_argument(
            "instance: reward tables disagree on a shared point");
    }
  }
}

Instance Instance::linear(Mat arms, Mat targets, const Vec& theta,
                          std::optional<int> intrinsic_dim) {
  Vec ar = arms.transpose() * theta;
  Vec tr = targets.size() == 0 ? Vec() : Vec(targets.transpose() * theta);
  return Instance(std::move(arms), std::move(ar), std::move(targets),
                  std::move(tr), theta, intrinsic_dim);
}

double Instance::min_gap() const {
  double g = std::numeric_limits<double>::infinity();
  for (int z = 0; z < num_targets(); ++z)
    if (z != best_) g = std::min(g, gap(z));
  return g;
}

double Instance::max_gap() const {
  double g = 0.0;
  for (int z = 0; z < num_targets(); ++z) g = std::max(g, gap(z));
  return g;
}

std::vector<int> Instance::stratum(int k) const {
  if (k < 1) throw std::invalid_argument("stratum: k must be >= 1");
  double cut = 4.0 * std::ldexp(1.0, -k);
  std::vector<int> out;
  for (int z = 0; z < num_targets(); ++z)
    if (gap(z) < cut) out.push_back(z);
  return out;
}

bool Instance::spans_star_directions() const {
  if (num_targets() < 2) return dim() == 0;
  Mat diffs(dim(), num_targets() - 1);
  int c = 0;
  for (int z = 0; z < num_targets(); ++z)
    if (z != best_) diffs.col(c++) = targets_.col(best_) - targets_.col(z);
  return full_rank_dim(diffs) == dim();
}

std::optional<int> Instance::arm_index_of_target(int z) const {
  if (targets_are_arms_) return z;
  for (int i = 0; i < num_arms(); ++i)
    if ((arms_.col(i) - targets_.col(z)).lpNorm<Eigen::Infinity>() <= kTieTol)
      return i;
  return std::nullopt;
}

Vec truncate(const Vec& x, int d) {
  if (d < 1 || d > x.size())
    throw std::invalid_argument("truncate: d outside [1, dim]");
  return x.head(d);
}

Mat truncate_cols(const Mat& pts, int d) {
  if (d < 1 || d > pts.rows())
    throw std::invalid_argument("truncate: d outside [1, dim]");
  return pts.topRows(d);
}

namespace {

// sign-canonical dedup preserving first-occurrence order; zero vectors dropped
struct DirectionSet {
  std::set<std::vector<double>> seen;
  std::vector<Vec> out;

  void add(Vec y) {
    int lead = -1;
    for (int i = 0; i < y.size() && lead < 0; ++i)
      if (y[i] != 0.0) lead = i;
    if (lead < 0) return;
    if (y[lead] < 0.0) y = -y;
    std::vector<double> key(y.data(), y.data() + y.size());
    if (seen.insert(std::move(key)).second) out.push_back(std::move(y));
  }
};

}  // namespace

std::vector<Vec> pair_directions(const Mat& pts, int d) {
  Mat p = truncate_cols(pts, d);
  DirectionSet ds;
  for (int i = 0; i < p.cols(); ++i)
    for (int j = i + 1; j < p.cols(); ++j) ds.add(p.col(i) - p.col(j));
  return std::move(ds.out);
}

std::vector<Vec> pair_directions(const Instance& inst,
                                 const std::vector<int>& targets, int d) {
  Mat pts(inst.dim(), static_cast<int>(targets.size()));
  for (size_t i = 0; i < targets.size(); ++i)
    pts.col(static_cast<int>(i)) = inst.target(targets[i]);
  return pair_directions(pts, d);
}

std::vector<Vec> star_directions(const Instance& inst, int d) {
  Mat t = truncate_cols(inst.targets(), d);
  DirectionSet ds;
  for (int z = 0; z < t.cols(); ++z)
    if (z != inst.best_target()) ds.add(t.col(inst.best_target()) - t.col(z));
  return std::move(ds.out);
}

Instance make_hard_instance(int d_star, double eps, bool with_x0) {
  if (d_star < 1)
    throw std::invalid_argument("hard instance: d_star must be >= 1");
  if (!(eps > 0.0 && eps <= 0.5))
    throw std::invalid_argument("hard instance: eps outside (0, 1/2]");
  const int dim = d_star + 1;
  const int n = d_star + 1 + (with_x0 ? 1 : 0);
  Mat arms = Mat::Zero(dim, n);
  for (int i = 0; i < d_star; ++i) arms(i, i) = 1.0;
  arms(d_star - 1, d_star) = 1.0 - eps;
  arms(d_star, d_star) = 1.0;
  if (with_x0) arms(dim - 1, n - 1) = 0.5;
  Vec theta = Vec::Zero(dim);
  theta[d_star - 1] = 1.0;
  return Instance::linear(std::move(arms), Mat(), theta, d_star);
}

Instance make_unverifiable_instance(int dim) {
  if (dim < 2)
    throw std::invalid_argument("unverifiable instance: dim must be >= 2");
  Mat arms = Mat::Identity(dim, dim);
  Vec theta = Vec::Zero(dim);
  theta[0] = 1.0;
  theta[dim - 1] = 2.0;
  return Instance::linear(std::move(arms), Mat(), theta, dim);
}

}  // namespace gems
