#include "gems/design.hpp"

#include <cmath>
#include <limits>

#include "gems/lp.hpp"

namespace gems {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRangeTol = 1e-8;   // relative residual for range membership
constexpr double kRankCut = 1e-12;   // relative eigenvalue cutoff

Mat gram(const Mat& psi, const Vec& w, double ridge) {
  Mat a = psi * w.asDiagonal() * psi.transpose();
  if (ridge > 0.0) a += ridge * Mat::Identity(psi.rows(), psi.rows());
  return a;
}

double max_norm_at(const Mat& psi, const std::vector<Vec>& dirs, const Vec& w,
                   double ridge) {
  Eigen::LLT<Mat> llt(gram(psi, w, ridge));
  double f = 0.0;
  for (const Vec& y : dirs) f = std::max(f, y.dot(llt.solve(y)));
  return f;
}

}  // namespace

PinvQuad::PinvQuad(const Mat& a) {
  Eigen::SelfAdjointEigenSolver<Mat> es(a);
  v_ = es.eigenvectors();
  evals_ = es.eigenvalues();
  double lmax = evals_.size() ? evals_.maxCoeff() : 0.0;
  cutoff_ = std::max(lmax, 0.0) * kRankCut;
}

double PinvQuad::operator()(const Vec& y) const {
  double ynorm = y.norm();
  if (ynorm == 0.0) return 0.0;
  Vec w = v_.transpose() * y;
  double out = 0.0, res2 = 0.0;
  for (int i = 0; i < w.size(); ++i) {
    if (evals_[i] > cutoff_)
      out += w[i] * w[i] / evals_[i];
    else
      res2 += w[i] * w[i];
  }
  if (std::sqrt(res2) > kRangeTol * ynorm) return kInf;
  return out;
}

Vec PinvQuad::solve(const Vec& b) const {
  Vec w = v_.transpose() * b;
  for (int i = 0; i < w.size(); ++i)
    w[i] = evals_[i] > cutoff_ ? w[i] / evals_[i] : 0.0;
  return v_ * w;
}

int PinvQuad::rank() const {
  int r = 0;
  for (int i = 0; i < evals_.size(); ++i)
    if (evals_[i] > cutoff_) ++r;
  return r;
}

double weighted_norm_sq(const Vec& y, const Mat& psi, const Vec& weights) {
  if (psi.cols() != weights.size())
    throw std::invalid_argument("weighted_norm_sq: weight size mismatch");
  if (psi.rows() != y.size())
    throw std::invalid_argument("weighted_norm_sq: direction size mismatch");
  return PinvQuad(gram(psi, weights, 0.0))(y);
}

DesignSolution solve_design(const std::vector<Vec>& directions, const Mat& psi,
                            const DesignOptions& opts) {
  const int n = static_cast<int>(psi.cols());
  const int d = static_cast<int>(psi.rows());
  if (n < 1) throw std::invalid_argument("solve_design: no arms");
  for (const Vec& y : directions)
    if (y.size() != d)
      throw std::invalid_argument("solve_design: direction dimension mismatch");

  Vec w = Vec::Constant(n, 1.0 / n);
  if (directions.empty()) return {w, 0.0, 0, 0.0};

  const int ny = static_cast<int>(directions.size());
  Vec vals(ny);
  Mat scores(n, ny);  // q_x(y) = (y^T A^-1 psi_x)^2
  double best_f = kInf;
  Vec best_w = w;
  double best_lb = 0.0;
  double rel_gap = kInf;
  int iters = 0;
  bool certified = false;

  for (int t = 0; t < opts.max_iters; ++t) {
    Eigen::LLT<Mat> llt(gram(psi, w, opts.ridge));
    double f = -kInf;
    int ystar = 0;
    for (int j = 0; j < ny; ++j) {
      Vec u = llt.solve(directions[j]);
      vals[j] = directions[j].dot(u);
      scores.col(j) = (psi.transpose() * u).array().square();
      if (vals[j] > f) {
        f = vals[j];
        ystar = j;
      }
    }
    if (f < best_f) {
      best_f = f;
      best_w = w;
    }

    int xstar = 0;
    double qmax = scores.col(ystar).maxCoeff(&xstar);
    if (qmax > 0.0) best_lb = std::max(best_lb, f * f / qmax);

    // Near-active mixture step: when several pieces sit at the max, the
    // single-piece vertex zigzags. Step instead toward the heaviest arm of
    // the equalizing mixture min_mu max_x sum_j mu_j q_x(j).
    std::vector<int> near;
    for (int j = 0; j < ny; ++j)
      if (vals[j] >= f * (1.0 - 1e-3)) near.push_back(j);
    if (near.size() > 1) {
      const int na = static_cast<int>(near.size());
      LpProblem game;
      game.c = Vec::Zero(na + 1);
      game.c[na] = 1.0;
      game.a_ub = Mat::Zero(n, na + 1);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < na; ++j) game.a_ub(i, j) = scores(i, near[j]);
        game.a_ub(i, na) = -1.0;
      }
      game.b_ub = Vec::Zero(n);
      game.a_eq = Mat::Zero(1, na + 1);
      for (int j = 0; j < na; ++j) game.a_eq(0, j) = 1.0;
      game.b_eq = Vec::Constant(1, 1.0);
      game.nonneg.assign(na + 1, true);
      LpSolution sol = solve_lp(game);
      if (sol.status == LpStatus::optimal) {
        Vec mu = sol.x.head(na);
        Vec agg = Vec::Zero(n);
        for (int j = 0; j < na; ++j) agg += mu[j] * scores.col(near[j]);
        double vmax = agg.maxCoeff(&xstar);
        double mv = 0.0;
        for (int j = 0; j < na; ++j) mv += mu[j] * vals[near[j]];
        if (mv > 0.0 && vmax > 0.0)
          best_lb = std::max(best_lb, mv * mv / vmax);
      }
    }

    // Dual certificate: each piece q_j(v) = ||y_j||^2_{A(v)^-1} is convex in
    // the design, so for any distribution mu over pieces, with s = scores mu,
    //   opt >= mu.vals + w.s - max_x s_x          (linearization)
    //   opt >= (mu.vals)^2 / max_x s_x            (Cauchy-Schwarz)
    // The LP maximizes the first bound over mu; both are kept. The first is
    // tight at the optimal design paired with its equalizing mixture.
    if (ny > 1) {
      LpProblem cert;
      cert.c = Vec::Zero(ny + 1);
      for (int j = 0; j < ny; ++j)
        cert.c[j] = -(vals[j] + w.dot(scores.col(j)));
      cert.c[ny] = 1.0;
      cert.a_ub = Mat::Zero(n, ny + 1);
      cert.a_ub.leftCols(ny) = scores;
      cert.a_ub.col(ny).setConstant(-1.0);
      cert.b_ub = Vec::Zero(n);
      cert.a_eq = Mat::Zero(1, ny + 1);
      cert.a_eq.row(0).head(ny).setOnes();
      cert.b_eq = Vec::Constant(1, 1.0);
      cert.nonneg.assign(ny + 1, true);
      LpSolution sol = solve_lp(cert);
      if (sol.status == LpStatus::optimal) {
        Vec mu = sol.x.head(ny);
        double tau = sol.x[ny];
        double mv = 0.0;
        for (int j = 0; j < ny; ++j) mv += mu[j] * vals[j];
        best_lb = std::max(best_lb, -sol.value);
        if (tau > 0.0) best_lb = std::max(best_lb, mv * mv / tau);
      }
    }
    rel_gap = best_lb > 0.0 ? std::max(best_f / best_lb - 1.0, 0.0) : kInf;
    iters = t;
    if (rel_gap <= opts.tol) {
      certified = true;
      break;
    }

    // step toward the chosen vertex
    double eta = 2.0 / (t + 2.0);
    if (opts.line_search) {
      auto fval = [&](double e) {
        Vec wn = (1.0 - e) * w;
        wn[xstar] += e;
        return max_norm_at(psi, directions, wn, opts.ridge);
      };
      double lo = 0.0, hi = 0.999;
      const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
      double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
      double f1 = fval(x1), f2 = fval(x2);
      for (int it = 0; it < 40; ++it) {
        if (f1 < f2) {
          hi = x2;
          x2 = x1;
          f2 = f1;
          x1 = hi - gr * (hi - lo);
          f1 = fval(x1);
        } else {
          lo = x1;
          x1 = x2;
          f1 = f2;
          x2 = lo + gr * (hi - lo);
          f2 = fval(x2);
        }
      }
      double egs = 0.5 * (lo + hi);
      if (fval(egs) < f) eta = egs;
    }
    w = (1.0 - eta) * w;
    w[xstar] += eta;
  }

  PinvQuad strict(gram(psi, best_w, 0.0));
  double value = 0.0;
  for (const Vec& y : directions) value = std::max(value, strict(y));
  DesignSolution out{best_w, value, iters, rel_gap};
  if (!certified) throw SolverStalled(std::move(out));
  return out;
}

double compute_iota(const Instance& inst, const std::vector<int>& subset,
                    int d, const DesignOptions& opts) {
  if (subset.size() <= 1) return 0.0;
  auto dirs = pair_directions(inst, subset, d);
  if (dirs.empty()) return 0.0;
  return solve_design(dirs, truncate_cols(inst.arms(), d), opts).value;
}

double compute_iota(const Instance& inst, int d, const DesignOptions& opts) {
  std::vector<int> all(inst.num_targets());
  for (int z = 0; z < inst.num_targets(); ++z) all[z] = z;
  return compute_iota(inst, all, d, opts);
}

double iota_star(const Instance& inst, int d, const DesignOptions& opts) {
  auto dirs = star_directions(inst, d);
  if (dirs.empty()) return 0.0;
  return solve_design(dirs, truncate_cols(inst.arms(), d), opts).value;
}

namespace {

// scaled best-vs-rest directions with per-target denominators
std::vector<Vec> scaled_star_directions(const Instance& inst, int d,
                                        const std::vector<double>& denom,
                                        bool* unbounded) {
  Mat t = truncate_cols(inst.targets(), d);
  const int zs = inst.best_target();
  std::vector<Vec> out;
  int c = 0;
  for (int z = 0; z < inst.num_targets(); ++z) {
    if (z == zs) continue;
    Vec y = t.col(zs) - t.col(z);
    double dn = denom[c++];
    if (y.isZero(0.0)) continue;
    if (dn <= 0.0) {
      *unbounded = true;
      return {};
    }
    out.push_back(y / dn);
  }
  return out;
}

}  // namespace

std::vector<Vec> rho_directions(const Instance& inst, int d, double eps) {
  if (eps < 0.0) throw std::invalid_argument("compute_rho: eps must be >= 0");
  std::vector<double> denom;
  for (int z = 0; z < inst.num_targets(); ++z)
    if (z != inst.best_target()) denom.push_back(std::max(inst.gap(z), eps));
  bool unbounded = false;
  auto dirs = scaled_star_directions(inst, d, denom, &unbounded);
  if (unbounded)
    throw std::invalid_argument("rho_directions: nonpositive gap denominator");
  return dirs;
}

DesignSolution solve_rho_design(const Instance& inst, int d, double eps,
                                const DesignOptions& opts) {
  if (eps < 0.0) throw std::invalid_argument("compute_rho: eps must be >= 0");
  std::vector<double> denom;
  for (int z = 0; z < inst.num_targets(); ++z)
    if (z != inst.best_target()) denom.push_back(std::max(inst.gap(z), eps));
  bool unbounded = false;
  auto dirs = scaled_star_directions(inst, d, denom, &unbounded);
  Mat psi = truncate_cols(inst.arms(), d);
  if (unbounded || dirs.empty()) {
    DesignSolution s;
    s.weights = Vec::Constant(psi.cols(), 1.0 / psi.cols());
    s.value = unbounded ? kInf : 0.0;
    s.iterations = 0;
    s.relative_gap = 0.0;
    return s;
  }
  return solve_design(dirs, psi, opts);
}

double compute_rho(const Instance& inst, int d, double eps,
                   const DesignOptions& opts) {
  return solve_rho_design(inst, d, eps, opts).value;
}

double compute_rho_tilde(const Instance& inst, int d, double eps,
                         const Vec& theta_d, const DesignOptions& opts) {
  if (eps < 0.0)
    throw std::invalid_argument("compute_rho_tilde: eps must be >= 0");
  if (theta_d.size() != d)
    throw std::invalid_argument("compute_rho_tilde: theta_d must live in R^d");
  Mat t = truncate_cols(inst.targets(), d);
  const int zs = inst.best_target();
  std::vector<double> denom;
  for (int z = 0; z < inst.num_targets(); ++z)
    if (z != zs)
      denom.push_back(std::max(theta_d.dot(t.col(zs) - t.col(z)), eps));
  bool unbounded = false;
  auto dirs = scaled_star_directions(inst, d, denom, &unbounded);
  if (unbounded) return kInf;
  if (dirs.empty()) return 0.0;
  return solve_design(dirs, truncate_cols(inst.arms(), d), opts).value;
}

}  // namespace gems
