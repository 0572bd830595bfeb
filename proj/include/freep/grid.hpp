#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "freep/free_norm.hpp"
#include "freep/molecule.hpp"
#include "freep/space.hpp"

namespace freep {

/// Half-open interval [lo, hi) inside [0, 1); empty when hi <= lo.
struct AxisInterval {
  double lo = 0.0;
  double hi = 0.0;

  bool empty() const { return !(hi > lo); }
  double length() const { return empty() ? 0.0 : hi - lo; }
};

/// One-dimensional tile: [0, 1+w-x) when -1 <= w-x <= 0, [w-x, 1) when
/// 0 <= w-x <= 1, empty when |w-x| >= 1. The boundary conventions fall out of
/// the formulas: both cases agree at w = x, and |w-x| = 1 yields empty.
AxisInterval tile_axis(int w, double x);

/// Measure of the symmetric difference of two axis intervals.
double interval_symdiff(const AxisInterval& a, const AxisInterval& b);

/// Axis-aligned product tile in [0,1)^d.
struct Tile {
  std::vector<AxisInterval> axes;

  bool empty() const;
  double volume() const;
};

Tile tile(const Eigen::VectorXi& w, const Eigen::VectorXd& x);

double tile_symdiff(const Tile& a, const Tile& b);

/// Lattice corners {floor(x_j), ceil(x_j)} per axis; at most 2^d vectors.
std::vector<Eigen::VectorXi> tile_corners(const Eigen::VectorXd& x);

struct TilePropertyReport {
  bool ok = false;
  int checks = 0;
  std::vector<std::string> failures;
};

/// Exercises the one-dimensional properties (active set, partition, shift
/// invariance, reflection, exact and bounded symmetric differences) and their
/// d-dimensional product analogues on seeded random inputs plus the boundary
/// cases (integral coordinates, |w - x| = 1).
TilePropertyReport verify_tile_properties(int d, int samples, std::uint64_t seed);

struct Box {
  Eigen::VectorXd lo, hi;

  double volume() const;
};

/// Step function over [0,1)^d with molecule values on a lattice window; the
/// boxes partition the cube.
struct LatticeStep {
  std::vector<std::pair<Box, Molecule>> cells;
};

bool lattice_equal(const LatticeStep& a, const LatticeStep& b);

/// a*F + b*G on the common box refinement.
LatticeStep lattice_combine(double a, const LatticeStep& f, double b,
                            const LatticeStep& g);
LatticeStep lattice_sub(const LatticeStep& f, const LatticeStep& g);

/// The lattice embedding map: boxes are the nonempty tiles around x, each
/// carrying the unit mass at its lattice corner. Requires
/// |x|_inf + 1 <= window radius.
LatticeStep tau(const Eigen::VectorXd& x, const GridWindow& window);

/// Certified upper bound on the free-space norm of a window molecule: the
/// exact norm over the subspace spanned by the support and the base point.
/// Restrictions only shrink the set of admissible decompositions, so this
/// dominates the window norm, which in turn dominates the ambient norm;
/// inequalities checked against it are conservative.
double molecule_norm_upper(const Molecule& mu, double p, int cap = kNormPointCap);

/// (sum over cells of volume * norm^q)^(1/q) with molecule norms at level p.
double lattice_qnorm(const LatticeStep& f, double q, double p,
                     int cap = kNormPointCap);

struct TauLipReport {
  bool ok = false;
  int pairs = 0;
  double constant = 0.0;   // 2^(1/p-1/q) (2^(2d)-1)^(1/p)
  double max_ratio = 0.0;  // step norm / (constant * |x-y|_1^(1/q))
  Eigen::VectorXd worst_x, worst_y;
};

TauLipReport tau_lip_check(double p, double q, int d, int pairs, int window_radius,
                           std::uint64_t seed);

/// min{1, n/|w|_inf} w with exact arithmetic where the scaling divides.
Eigen::VectorXd retraction(int n, const Eigen::VectorXi& w);
Eigen::VectorXd retraction_real(int n, const Eigen::VectorXd& v);

struct RetractionReport {
  bool ok = false;
  bool idempotent = false;
  bool fixes_ball = false;
  double lipschitz = 0.0;  // in the |.|_inf^(1/q) quasi-metric
};

/// Exhaustive check over the lattice window.
RetractionReport retraction_check(int d, int n, int window_radius, double q);

struct CommuteReport {
  bool ok = false;
  bool envelope_ok = false;             // level reinterpretation commutes with tau
  bool dilation_ok = false;             // dilation conjugation identities
  bool retraction_identity_ok = false;  // tau at lattice points is chi (x) delta
  int samples = 0;
};

/// Checks the molecule-level commuting squares: envelope reinterpretation at
/// level r between p and q, the dilation conjugation at scale t, and the
/// lattice retraction identity, on seeded random molecules.
CommuteReport commuting_square_check(int samples, double p, double r, double q,
                                     int d, double t, std::uint64_t seed);

}  // namespace freep
