#include "freep/simplex.hpp"

#include <stdexcept>
#include <vector>

namespace freep {

SimplexResult simplex_max(const Eigen::VectorXd& c, const Eigen::MatrixXd& A,
                          const Eigen::VectorXd& b, int max_iter) {
  const int m = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  if (b.size() != m || c.size() != n)
    throw std::invalid_argument("simplex dimension mismatch");
  if (m > 0 && b.minCoeff() < 0.0)
    throw std::invalid_argument("simplex_max needs b >= 0");

  constexpr double eps = 1e-11;

  // Tableau rows 0..m-1: [A | I | b]; row m: reduced costs of the max problem.
  Eigen::MatrixXd T(m + 1, n + m + 1);
  T.setZero();
  T.block(0, 0, m, n) = A;
  T.block(0, n, m, m) = Eigen::MatrixXd::Identity(m, m);
  T.block(0, n + m, m, 1) = b;
  T.block(m, 0, 1, n) = -c.transpose();

  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) basis[i] = n + i;

  SimplexResult res;
  for (int iter = 0; iter < max_iter; ++iter) {
    // Bland: entering column = lowest index with negative reduced cost.
    int enter = -1;
    for (int j = 0; j < n + m; ++j)
      if (T(m, j) < -eps) {
        enter = j;
        break;
      }
    if (enter < 0) {
      res.ok = true;
      res.value = T(m, n + m);
      res.x = Eigen::VectorXd::Zero(n);
      for (int i = 0; i < m; ++i)
        if (basis[i] < n) res.x[basis[i]] = T(i, n + m);
      return res;
    }

    // Ratio test, ties by lowest basis index (Bland).
    int leave = -1;
    double best = 0.0;
    for (int i = 0; i < m; ++i) {
      double a = T(i, enter);
      if (a > eps) {
        double ratio = T(i, n + m) / a;
        if (leave < 0 || ratio < best - eps ||
            (ratio < best + eps && basis[i] < basis[leave]))
          leave = i, best = ratio;
      }
    }
    if (leave < 0) {
      res.unbounded = true;
      return res;
    }

    T.row(leave) /= T(leave, enter);
    for (int i = 0; i <= m; ++i) {
      if (i == leave) continue;
      double f = T(i, enter);
      if (f != 0.0) T.row(i) -= f * T.row(leave);
    }
    basis[leave] = enter;
  }
  return res;  // not converged
}

}  // namespace freep
