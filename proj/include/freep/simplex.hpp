#pragma once

#include <Eigen/Dense>

namespace freep {

struct SimplexResult {
  bool ok = false;       // converged to an optimum
  bool unbounded = false;
  double value = 0.0;
  Eigen::VectorXd x;
};

/// Maximizes c.x subject to A x <= b, x >= 0, for b >= 0 (so the slack basis
/// is feasible). Dense tableau method with Bland's rule; meant for the tiny
/// dual programs of this project, not general-purpose use.
SimplexResult simplex_max(const Eigen::VectorXd& c, const Eigen::MatrixXd& A,
                          const Eigen::VectorXd& b, int max_iter = 20000);

}  // namespace freep
