#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include "freep/molecule.hpp"

namespace freep {

/// Point cap for certified enumeration; m points mean m^(m-2) spanning trees.
inline constexpr int kNormPointCap = 9;

enum class NormMethod { Exact, Search, Dual };

struct NormResult {
  double value = 0.0;
  ElementaryDecomposition witness;
  NormMethod method = NormMethod::Exact;
  bool certified = false;
};

/// Free-space norm of a molecule by exhaustive minimization over spanning
/// trees of the complete graph on all points of the ambient space. Each tree
/// admits a unique coefficient assignment, found by leaf peeling with the
/// base point absorbing the residual mass; the reported value is the minimum
/// of (sum |a_e|^p)^(1/p) with a deterministic lexicographic witness.
///
/// Throws std::domain_error when p exceeds the space exponent and
/// std::length_error when the point count exceeds `cap` (use norm_search).
NormResult norm_exact(const Molecule& mu, double p, int cap = kNormPointCap);

/// Upper bound by random-restart local descent. Restarts alternate between
/// pure spanning-tree moves (swap one edge across the induced cut, re-solve)
/// and descent over cyclic supports: extra edges are added and the concave
/// cost is line-minimized along fundamental-cycle shifts, so candidate
/// decompositions are not restricted to forests. Never certified.
NormResult norm_search(const Molecule& mu, double p, int restarts,
                       std::uint64_t seed);

/// Optimum of: maximize sum_x a_x f(x) over f with |f(x) - f(y)| <= d(x,y)
/// and f(base) = 0. A valid lower bound on the free-space norm for every
/// exponent (scalars with absolute value form a p-normed target); equals the
/// norm when p = 1. The exponent argument documents which norm is bounded;
/// the program itself does not depend on it.
double dual_lower_bound(const Molecule& mu, double p);

/// Certified norms at two exponents p <= q; the q-value can never exceed the
/// p-value (coefficientwise comparison of the same decompositions).
std::pair<NormResult, NormResult> envelope_compare(const Molecule& mu, double p,
                                                   double q,
                                                   int cap = kNormPointCap);

/// Coefficients of a molecule on the restriction transported to the parent.
Molecule inject(const Molecule& mu_on_subset, const SubsetSelection& subset,
                SpacePtr subset_space_parent_view);

struct DistortionReport {
  double norm_subset = 0.0;
  double norm_parent = 0.0;
  double ratio = 1.0;        // norm_subset / norm_parent (1 for the zero molecule)
  double bound = 0.0;        // A^(1/p) used for the counterexample flag
  bool nonexpansive_ok = true;   // ratio >= 1 - 1e-9
  bool within_bound = true;      // ratio <= bound
};

/// Compares the norm of a molecule computed inside the subset against the
/// norm of the same molecule in the parent. `mu` may live either on the
/// restricted space or on the parent with support inside the subset.
/// `bound` defaults to the universal embedding constant A^(1/p) computed
/// from primitive formulas (see constants.hpp).
DistortionReport distortion(const SubsetSelection& subset, const Molecule& mu,
                            double p, std::optional<double> bound = std::nullopt,
                            int cap = kNormPointCap);

}  // namespace freep
