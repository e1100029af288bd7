#ifndef GEMS_INSTANCE_HPP
#define GEMS_INSTANCE_HPP

#include <Eigen/Dense>
#include <optional>
#include <vector>

namespace gems {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Pure-exploration instance: arms spanning R^D, finite target set with a
// unique best target under the reward oracle, all gaps at most 2.
// Columns of the matrices are points. Targets may coincide with arms; when
// they do the reward tables must agree.
class Instance {
 public:
  // General constructor with explicit reward tables. Passing an empty
  // targets matrix means "targets are the arms".
  Instance(Mat arms, Vec arm_rewards, Mat targets, Vec target_rewards,
           std::optional<Vec> theta = std::nullopt,
           std::optional<int> intrinsic_dim = std::nullopt);

  // Rewards induced by <theta, x>.
  static Instance linear(Mat arms, Mat targets, const Vec& theta,
                         std::optional<int> intrinsic_dim = std::nullopt);

  int dim() const { return static_cast<int>(arms_.rows()); }
  int num_arms() const { return static_cast<int>(arms_.cols()); }
  int num_targets() const { return static_cast<int>(targets_.cols()); }
  const Mat& arms() const { return arms_; }
  const Mat& targets() const { return targets_; }
  Vec arm(int i) const { return arms_.col(i); }
  Vec target(int z) const { return targets_.col(z); }
  double arm_reward(int i) const { return arm_rewards_[i]; }
  double target_reward(int z) const { return target_rewards_[z]; }

  int best_target() const { return best_; }
  double gap(int z) const { return target_rewards_[best_] - target_rewards_[z]; }
  double min_gap() const;  // over targets other than the best
  double max_gap() const;
  const std::optional<Vec>& theta() const { return theta_; }
  std::optional<int> intrinsic_dim() const { return intrinsic_dim_; }
  bool targets_are_arms() const { return targets_are_arms_; }

  // indices z with gap(z) < 4 * 2^-k; k=1 returns every target
  std::vector<int> stratum(int k) const;

  // does span({z* - z}) cover R^D? (advisory; not enforced anywhere)
  bool spans_star_directions() const;

  // arm index holding the same point as target z, if any (1e-9 tolerance)
  std::optional<int> arm_index_of_target(int z) const;

 private:
  Mat arms_;
  Mat targets_;
  Vec arm_rewards_;
  Vec target_rewards_;
  std::optional<Vec> theta_;
  std::optional<int> intrinsic_dim_;
  bool targets_are_arms_ = false;
  int best_ = 0;
};

// prefix truncation: first d coordinates
Vec truncate(const Vec& x, int d);
Mat truncate_cols(const Mat& pts, int d);

// Pairwise differences of the truncated columns, deduplicated up to sign,
// zero vectors dropped.
std::vector<Vec> pair_directions(const Mat& pts, int d);
std::vector<Vec> pair_directions(const Instance& inst,
                                 const std::vector<int>& targets, int d);
// Differences best-vs-other only, same dedup rules.
std::vector<Vec> star_directions(const Instance& inst, int d);

// d*+1 dimensional family separating truncated from full-dimension
// complexity: basis arms e_1..e_{d*} plus (1-eps) e_{d*} + e_{d*+1}, rewards
// <x, e_{d*}>. with_x0 adds the arm e_D / 2 so the star directions span.
Instance make_hard_instance(int d_star, double eps, bool with_x0 = false);

// Basis arms with rewards from theta = (1, 0, ..., 0, 2): every proper
// truncation fits the data seen under it perfectly yet ranks the targets
// wrong.
Instance make_unverifiable_instance(int dim);

}  // namespace gems

#endif
