#pragma once

#include <Eigen/Dense>

#include <array>
#include <memory>
#include <string>
#include <vector>

namespace freep {

/// A finite pointed quasi-metric space: points carry names, `dist` is the
/// symmetric distance table, and `p` is the exponent for which the p-triangle
/// inequality d(x,z)^p <= d(x,y)^p + d(y,z)^p is declared to hold.
struct QuasiMetricSpace {
  std::vector<std::string> names;
  int base = 0;
  double p = 1.0;
  Eigen::MatrixXd dist;

  int size() const { return static_cast<int>(names.size()); }
  double d(int i, int j) const { return dist(i, j); }

  /// Index of a named point, or -1.
  int index_of(const std::string& name) const;

  /// Distance table raised elementwise to the declared exponent. The result
  /// is an honest metric whenever the space validates; the Whitney machinery
  /// runs in this metricized view.
  Eigen::MatrixXd metricized() const { return dist.array().pow(p).matrix(); }
};

using SpacePtr = std::shared_ptr<const QuasiMetricSpace>;

struct ValidationReport {
  bool ok = false;
  /// Set when the table itself is malformed (asymmetry, negative entry,
  /// nonzero diagonal, zero off-diagonal); distinct from a triangle failure.
  bool structural_error = false;
  std::string message;
  std::array<int, 3> worst_triple{-1, -1, -1};
  /// max over triples of d(x,z)^p / (d(x,y)^p + d(y,z)^p); pass iff <= 1 + tol.
  double worst_ratio = 0.0;
};

/// Relative tolerance on the p-triangle inequality; absorbs rounding in the
/// computed powers d^p.
inline constexpr double kTriangleTol = 1e-9;

ValidationReport validate(const QuasiMetricSpace& space);

/// Throws std::invalid_argument when validation fails.
void require_valid(const QuasiMetricSpace& space);

/// Replaces dist by dist^r and declares exponent min(1, p/r); validates the
/// result and throws if it fails.
QuasiMetricSpace snowflake(const QuasiMetricSpace& space, double r);

struct WeightedTree {
  std::vector<std::string> vertices;
  /// (u, v, weight) with indices into `vertices`; weights strictly positive.
  std::vector<std::array<double, 3>> edges;  // {u, v, w} with u, v integral
  std::string root;

  int index_of(const std::string& name) const;
};

/// Skeleton p-metric tree: vertex set with dist(u,v) = (path weight)^(1/p),
/// based at the root. Throws on disconnected or cyclic input.
QuasiMetricSpace skeleton_tree_space(const WeightedTree& tree, double p);

/// The root plus every vertex whose path from the root cannot be extended.
std::vector<std::string> leaves(const WeightedTree& tree);

struct SubsetSelection {
  SpacePtr parent;
  std::vector<int> members;  // sorted indices into parent points; contains base

  bool contains(int idx) const;
};

SubsetSelection make_subset(SpacePtr parent, std::vector<int> members);

/// Restriction of `parent` to `members` (same base point, same exponent).
QuasiMetricSpace restrict_space(const QuasiMetricSpace& parent,
                                const std::vector<int>& members);

/// Truncated lattice window: points are the integer vectors w with
/// |w|_inf <= radius, placed at coordinates t*w, with
/// dist(u, v) = (t * |u - v|_inf)^(1/q) and declared exponent q.
struct GridWindow {
  SpacePtr space;
  std::vector<Eigen::VectorXi> coords;  // lattice coordinates, space order
  int dim = 0;
  int radius = 0;
  double t = 1.0;
  double q = 1.0;

  int index_of(const Eigen::VectorXi& w) const;
};

inline constexpr std::size_t kGridSizeCap = 100000;

GridWindow grid_window(int dim, double q, double t, int radius,
                       std::size_t cap = kGridSizeCap);

/// Convenience matching the flat space interface.
QuasiMetricSpace grid_space(int dim, double q, double t, int radius,
                            std::size_t cap = kGridSizeCap);

/// Finite subset of R^d under the quasi-metric |x - y|_inf^(1/q). Used to
/// host images of maps whose outputs are not lattice points.
QuasiMetricSpace sup_metric_space(const std::vector<Eigen::VectorXd>& points,
                                  double q, int base_index = 0);

}  // namespace freep
