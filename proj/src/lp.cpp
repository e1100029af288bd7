#include "gems/lp.hpp"

#include <cmath>
#include <stdexcept>

namespace gems {

namespace {

constexpr double kTol = 1e-9;
constexpr int kMaxPivots = 50000;

// Canonical-form tableau simplex over the allowed columns, Bland's rule.
// Returns false if unbounded.
bool run_simplex(Eigen::MatrixXd& t, std::vector<int>& basis,
                 const Eigen::VectorXd& cost, const std::vector<bool>& allowed) {
  const int m = static_cast<int>(t.rows());
  const int n = static_cast<int>(t.cols()) - 1;
  for (int iter = 0; iter < kMaxPivots; ++iter) {
    int enter = -1;
    for (int j = 0; j < n && enter < 0; ++j) {
      if (!allowed[j]) continue;
      double red = cost[j];
      for (int i = 0; i < m; ++i) red -= cost[basis[i]] * t(i, j);
      if (red < -kTol) enter = j;
    }
    if (enter < 0) return true;  // optimal

    int leave = -1;
    double best_ratio = 0.0;
    for (int i = 0; i < m; ++i) {
      if (t(i, enter) > kTol) {
        double ratio = t(i, n) / t(i, enter);
        if (leave < 0 || ratio < best_ratio - kTol ||
            (ratio < best_ratio + kTol && basis[i] < basis[leave])) {
          leave = i;
          best_ratio = ratio;
        }
      }
    }
    if (leave < 0) return false;  // unbounded

    t.row(leave) /= t(leave, enter);
    for (int i = 0; i < m; ++i) {
      if (i != leave && std::fabs(t(i, enter)) > 0.0)
        t.row(i) -= t(i, enter) * t.row(leave);
    }
    basis[leave] = enter;
  }
  throw std::runtime_error("solve_lp: pivot limit exceeded");
}

}  // namespace

LpSolution solve_lp(const LpProblem& prob) {
  const int nvar = static_cast<int>(prob.c.size());
  const int m_ub = static_cast<int>(prob.a_ub.rows());
  const int m_eq = static_cast<int>(prob.a_eq.rows());
  const int m = m_ub + m_eq;
  if (m_ub > 0 && prob.a_ub.cols() != nvar)
    throw std::invalid_argument("solve_lp: a_ub shape mismatch");
  if (m_eq > 0 && prob.a_eq.cols() != nvar)
    throw std::invalid_argument("solve_lp: a_eq shape mismatch");

  // standard-form columns: split free variables, then slacks, then artificials
  std::vector<int> col_var;    // original variable index per column
  std::vector<double> col_sgn;
  for (int j = 0; j < nvar; ++j) {
    bool nn = !prob.nonneg.empty() && prob.nonneg[j];
    col_var.push_back(j);
    col_sgn.push_back(1.0);
    if (!nn) {
      col_var.push_back(j);
      col_sgn.push_back(-1.0);
    }
  }
  const int nsplit = static_cast<int>(col_var.size());
  const int nslack = m_ub;
  const int ncols = nsplit + nslack + m;  // + artificials

  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, ncols + 1);
  for (int i = 0; i < m; ++i) {
    const bool ub_row = i < m_ub;
    for (int k = 0; k < nsplit; ++k) {
      double a = ub_row ? prob.a_ub(i, col_var[k]) : prob.a_eq(i - m_ub, col_var[k]);
      t(i, k) = col_sgn[k] * a;
    }
    if (ub_row) t(i, nsplit + i) = 1.0;
    t(i, ncols) = ub_row ? prob.b_ub[i] : prob.b_eq[i - m_ub];
    if (t(i, ncols) < 0.0) t.row(i) = -t.row(i);
    t(i, nsplit + nslack + i) = 1.0;
  }

  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) basis[i] = nsplit + nslack + i;

  // phase 1: drive the artificials to zero
  Eigen::VectorXd cost1 = Eigen::VectorXd::Zero(ncols);
  cost1.tail(m).setOnes();
  std::vector<bool> allowed(ncols, true);
  if (!run_simplex(t, basis, cost1, allowed))
    throw std::runtime_error("solve_lp: phase-1 unbounded");
  double infeas = 0.0;
  for (int i = 0; i < m; ++i)
    if (basis[i] >= nsplit + nslack) infeas += t(i, ncols);
  if (infeas > 1e-7) return {LpStatus::infeasible, 0.0, {}};

  // pivot leftover zero-value artificials out; redundant rows get dropped
  std::vector<int> keep;
  for (int i = 0; i < m; ++i) {
    if (basis[i] < nsplit + nslack) {
      keep.push_back(i);
      continue;
    }
    int piv = -1;
    for (int j = 0; j < nsplit + nslack && piv < 0; ++j)
      if (std::fabs(t(i, j)) > kTol) piv = j;
    if (piv < 0) continue;  // redundant constraint
    t.row(i) /= t(i, piv);
    for (int r = 0; r < m; ++r)
      if (r != i && std::fabs(t(r, piv)) > 0.0) t.row(r) -= t(r, piv) * t.row(i);
    basis[i] = piv;
    keep.push_back(i);
  }
  if (static_cast<int>(keep.size()) < m) {
    Eigen::MatrixXd t2(static_cast<int>(keep.size()), t.cols());
    std::vector<int> b2;
    for (size_t r = 0; r < keep.size(); ++r) {
      t2.row(static_cast<int>(r)) = t.row(keep[r]);
      b2.push_back(basis[keep[r]]);
    }
    t = std::move(t2);
    basis = std::move(b2);
  }

  // phase 2 on the original objective
  Eigen::VectorXd cost2 = Eigen::VectorXd::Zero(ncols);
  for (int k = 0; k < nsplit; ++k) cost2[k] = col_sgn[k] * prob.c[col_var[k]];
  for (int j = nsplit + nslack; j < ncols; ++j) allowed[j] = false;
  if (!run_simplex(t, basis, cost2, allowed)) return {LpStatus::unbounded, 0.0, {}};

  Eigen::VectorXd xhat = Eigen::VectorXd::Zero(ncols);
  const int rhs = static_cast<int>(t.cols()) - 1;
  for (size_t i = 0; i < basis.size(); ++i) xhat[basis[i]] = t(static_cast<int>(i), rhs);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(nvar);
  for (int k = 0; k < nsplit; ++k) x[col_var[k]] += col_sgn[k] * xhat[k];
  return {LpStatus::optimal, prob.c.dot(x), x};
}

}  // namespace gems
