#pragma once

#include <string>
#include <vector>

namespace freep {
namespace constants {

/// Partition-of-unity sum constant mu(kappa, gamma) = 2 e ln(2) gamma ln(2 kappa).
/// All logarithms in this module are natural.
double mu_const(double kappa, double gamma);

/// Exclusive lower bound for the anchor constant: any nu > 2 + beta works.
double nu_floor(double beta);

/// Extension-operator constant
/// D = (8 e ln2 gamma (2+beta) (1+alpha)^2/alpha kappa ln(2 kappa))^(1/p).
double bound_D(double p, double kappa, double gamma, double beta, double alpha);

/// Rational factor R^4 (R+1)^2 (7R^2 + 7R - 6) / ((R-1)(R^2 + R - 1)).
double rational_factor(double R);

/// Closed-form embedding constant at parameter R:
/// 16 e ln2 ln12 * rational_factor(R).
double A_of_R(double R);

/// The same quantity assembled from the primitive product
/// 8 e ln2 gamma (2+beta) (1+alpha)^2/alpha kappa ln(2 kappa)
/// with kappa = 6, alpha = R^2+R-1, beta = 14(R^2+R-1), gamma = R^2/(R-1).
double A_primitive_of_R(double R);

struct AMin {
  double R = 0.0;               // interior minimizer
  double rational = 0.0;        // rational_factor at the minimizer
  double value = 0.0;           // A_of_R at the minimizer (closed form)
  double primitive = 0.0;       // primitive product at the minimizer
  double first_order = 0.0;     // centered finite difference of A_of_R at R
};

/// Coarse log-space scan over (1, 100] followed by golden-section refinement
/// to 1e-12 relative width.
AMin A_min();

/// Universal distortion bound assembled from primitive formulas only.
double A_primitive();

/// Lipschitz constant of the lattice embedding map: 2^(1/p-1/q) (2^(2d)-1)^(1/p).
double tau_constant(double p, double q, int d);

struct ConstantAudit {
  std::string name;
  double value = 0.0;           // computed from primitive formulas
  double printed = 0.0;         // closed-form / literature figure, NaN if none
  double ratio = 0.0;           // value / printed, NaN if no printed figure
  std::string notes;
};

/// Decimal figure quoted for the universal constant; carried verbatim in the
/// audit next to the independently computed values, never reconciled.
inline constexpr double kQuotedAValue = 13982.5641659317;

std::vector<ConstantAudit> audit_all(double p);

}  // namespace constants
}  // namespace freep
