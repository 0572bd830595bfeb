#pragma once

#include <Eigen/Dense>

#include <array>
#include <vector>

#include "freep/constants.hpp"
#include "freep/whitney.hpp"

namespace freep {

/// Finite-dimensional coordinate space with the ell_p (quasi-)norm; dim 1 is
/// the scalar line with absolute value.
struct ValueSpace {
  int dim = 1;
  double p = 1.0;

  double norm(const Eigen::VectorXd& v) const;
};

/// Piecewise-constant map from [0,1) into a value space: breakpoints start at
/// 0, end at 1, strictly increase; one value per subinterval.
struct StepFunction {
  std::vector<double> breaks;
  std::vector<Eigen::VectorXd> values;

  bool valid() const;
};

StepFunction constant_step(const Eigen::VectorXd& value);

/// (sum over pieces of length * ||value||^p)^(1/p).
double step_norm(const StepFunction& f, double p, const ValueSpace& vs);

/// Pointwise a*f + b*g on the merged breakpoint grid (coincident breakpoints
/// merged at tolerance 1e-12).
StepFunction step_combine(double a, const StepFunction& f, double b,
                          const StepFunction& g);
StepFunction step_sub(const StepFunction& f, const StepFunction& g);

/// For each point of V, the list of (set index, left endpoint, right endpoint)
/// with positive length, partitioning [0,1) in the construction order of the
/// cover. Lengths are the partition-of-unity weights.
struct IntervalAssignment {
  std::vector<int> v_points;
  std::vector<std::vector<std::array<double, 3>>> intervals;  // {j, a, b}

  int v_position(int point) const;
};

/// Cumulative sums of phi in set order; the per-point partition property is
/// verified (tolerance 1e-12) and the final endpoint snapped to 1.
IntervalAssignment interval_assignment(const PartitionOfUnity& pou);

/// Boundary data: one value per ambient point index, meaningful on N.
using BoundaryMap = std::vector<Eigen::VectorXd>;

/// Lipschitz constant of boundary data over (N, d): max ||f(x)-f(y)|| / d(x,y).
double lipschitz_constant(const BoundaryMap& f, const QuasiMetricSpace& space,
                          const std::vector<int>& N, const ValueSpace& vs);

/// The extension: a step function per ambient point. On N it is the constant
/// function at f(x); on V it concatenates anchor values over the interval
/// assignment.
struct Extension {
  std::vector<StepFunction> at;  // indexed by ambient point
  ValueSpace value_space;
};

/// Requires every anchor of the partition of unity to lie in N (throws
/// "anchor outside N" otherwise) and f to vanish at the base point.
Extension extend(const BoundaryMap& f, const PartitionOfUnity& pou,
                 const IntervalAssignment& assignment,
                 const QuasiMetricSpace& space, const std::vector<int>& N,
                 const ValueSpace& vs);

/// max over pairs x != y of ||T(f)(x) - T(f)(y)||_{p} / d(x, y).
double measured_lip(const Extension& ext, const QuasiMetricSpace& space, double p);

using constants::bound_D;

/// Pairwise estimates behind the operator bound, each checked with the
/// partition's actual constants: pairs meeting N obey 1 + nu, disjoint-support
/// pairs (1 + nu)(1 + 2 gamma), shared-support pairs
/// 4 nu mu (1 + alpha)(1 + 1/alpha) kappa, all raised to 1/p and scaled by
/// Lip(f) d(x, y).
struct CaseBounds {
  double c1 = 0.0, c2 = 0.0, c3 = 0.0;  // the constants themselves
  double worst_boundary = 0.0;          // ratio for (N, V) pairs
  double worst_disjoint = 0.0;
  double worst_shared = 0.0;
  double worst_within_n = 0.0;          // plain Lipschitz bound on N x N pairs
  std::array<int, 2> boundary_pair{-1, -1};
  std::array<int, 2> disjoint_pair{-1, -1};
  std::array<int, 2> shared_pair{-1, -1};
  std::array<int, 2> within_n_pair{-1, -1};
  bool ok = false;
};

CaseBounds check_case_bounds(const Extension& ext, const QuasiMetricSpace& space,
                             const std::vector<int>& N,
                             const PartitionOfUnity& pou, double lip_f, double p);

}  // namespace freep
