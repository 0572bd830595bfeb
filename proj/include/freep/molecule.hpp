#pragma once

#include <Eigen/Dense>

#include <vector>

#include "freep/space.hpp"

namespace freep {

/// Coefficient threshold below which support entries are pruned after
/// arithmetic; keeps enumeration supports free of numerical dust.
inline constexpr double kCoeffPruneTol = 1e-12;

/// A molecule: finitely supported signed coefficients over the points of one
/// space, with the base point's coefficient identically zero. Molecules are
/// tied to their space by handle; arithmetic across distinct handles throws.
class Molecule {
 public:
  Molecule() = default;
  explicit Molecule(SpacePtr space);
  Molecule(SpacePtr space, Eigen::VectorXd coeffs);

  const SpacePtr& space() const { return space_; }
  const Eigen::VectorXd& coeffs() const { return coeffs_; }
  double coeff(int idx) const { return coeffs_[idx]; }

  void set_coeff(int idx, double value);
  std::vector<int> support() const;
  bool is_zero() const;

  Molecule& operator+=(const Molecule& other);
  Molecule& operator-=(const Molecule& other);
  Molecule& operator*=(double s);

  friend Molecule operator+(Molecule a, const Molecule& b) { return a += b; }
  friend Molecule operator-(Molecule a, const Molecule& b) { return a -= b; }
  friend Molecule operator*(double s, Molecule a) { return a *= s; }

  /// Drops entries with |coefficient| < tol.
  void prune(double tol = kCoeffPruneTol);

  bool same_data(const Molecule& other) const;

 private:
  void check_compatible(const Molecule& other) const;

  SpacePtr space_;
  Eigen::VectorXd coeffs_;
};

/// Unit point mass at x (zero when x is the base point).
Molecule delta(SpacePtr space, int x);

/// (delta(x) - delta(y)) / d(x, y); throws when x == y.
Molecule elementary(SpacePtr space, int x, int y);

struct ElementaryTerm {
  int x = -1;
  int y = -1;
  double a = 0.0;
};

/// A finite family of weighted elementary molecules. `reconstruct` returns
/// sum_j a_j (delta(x_j) - delta(y_j)) / d(x_j, y_j).
struct ElementaryDecomposition {
  std::vector<ElementaryTerm> terms;

  Molecule reconstruct(const SpacePtr& space) const;
  /// (sum_j |a_j|^p)^(1/p)
  double cost(double p) const;
};

/// Total or partial point map between spaces: entry -1 marks "undefined".
/// Must send the source base point to the target base point.
using PointMap = std::vector<int>;

/// Transports coefficients along h; mass landing on the target base point is
/// dropped. Throws when h is undefined on a support point or moves the base.
Molecule pushforward(const Molecule& mu, const PointMap& h, SpacePtr target);

/// max over pairs x != y of d_target(h(x), h(y)) / d_source(x, y); requires h
/// total on the source.
double lipschitz_constant(const PointMap& h, const QuasiMetricSpace& source,
                          const QuasiMetricSpace& target);

}  // namespace freep
