#include "freep/constants.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace freep {
namespace constants {

namespace {
const double kE = std::exp(1.0);
const double kLn2 = std::log(2.0);
const double kLn12 = std::log(12.0);
const double kNaN = std::numeric_limits<double>::quiet_NaN();
}  // namespace

double mu_const(double kappa, double gamma) {
  if (kappa < 2.0) throw std::domain_error("mu_const needs kappa >= 2");
  if (gamma < 1.0) throw std::domain_error("mu_const needs gamma >= 1");
  return 2.0 * kE * kLn2 * gamma * std::log(2.0 * kappa);
}

double nu_floor(double beta) {
  if (!(beta > 0.0)) throw std::domain_error("nu_floor needs beta > 0");
  return 2.0 + beta;
}

double bound_D(double p, double kappa, double gamma, double beta, double alpha) {
  if (!(p > 0.0 && p <= 1.0)) throw std::domain_error("bound_D needs p in (0, 1]");
  if (kappa < 2.0) throw std::domain_error("bound_D needs kappa >= 2");
  if (gamma < 1.0) throw std::domain_error("bound_D needs gamma >= 1");
  if (!(beta > 0.0)) throw std::domain_error("bound_D needs beta > 0");
  if (alpha < 1.0) throw std::domain_error("bound_D needs alpha >= 1");
  double product = 8.0 * kE * kLn2 * gamma * (2.0 + beta) *
                   ((1.0 + alpha) * (1.0 + alpha) / alpha) * kappa *
                   std::log(2.0 * kappa);
  return std::pow(product, 1.0 / p);
}

double rational_factor(double R) {
  if (!(R > 1.0)) throw std::domain_error("rational_factor needs R > 1");
  double num = std::pow(R, 4.0) * (R + 1.0) * (R + 1.0) * (7.0 * R * R + 7.0 * R - 6.0);
  double den = (R - 1.0) * (R * R + R - 1.0);
  return num / den;
}

double A_of_R(double R) { return 16.0 * kE * kLn2 * kLn12 * rational_factor(R); }

double A_primitive_of_R(double R) {
  double alpha = R * R + R - 1.0;
  double beta = 14.0 * alpha;
  double gamma = R * R / (R - 1.0);
  double kappa = 6.0;
  return 8.0 * kE * kLn2 * gamma * (2.0 + beta) *
         ((1.0 + alpha) * (1.0 + alpha) / alpha) * kappa * std::log(2.0 * kappa);
}

AMin A_min() {
  // Coarse scan in log space, then golden-section refinement.
  const int scan_points = 4000;
  double best_R = 2.0;
  double best_val = A_of_R(best_R);
  for (int i = 0; i <= scan_points; ++i) {
    double logR = std::log(1.0 + 1e-6) +
                  (std::log(100.0) - std::log(1.0 + 1e-6)) * i / scan_points;
    double R = std::exp(logR);
    double v = A_of_R(R);
    if (v < best_val) {
      best_val = v;
      best_R = R;
    }
  }

  double lo = best_R / 1.2;
  double hi = best_R * 1.2;
  if (lo <= 1.0) lo = 1.0 + 1e-9;
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - phi * (b - a);
  double d = a + phi * (b - a);
  double fc = A_of_R(c), fd = A_of_R(d);
  while ((b - a) > 1e-12 * b) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = A_of_R(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = A_of_R(d);
    }
  }

  AMin out;
  out.R = 0.5 * (a + b);
  out.rational = rational_factor(out.R);
  out.value = A_of_R(out.R);
  out.primitive = A_primitive_of_R(out.R);
  double h = 1e-5 * out.R;
  out.first_order = (A_of_R(out.R + h) - A_of_R(out.R - h)) / (2.0 * h);
  return out;
}

double A_primitive() {
  // Minimize the primitive product itself; it shares the rational factor with
  // the closed form, so the same minimizer applies.
  return A_primitive_of_R(A_min().R);
}

double tau_constant(double p, double q, int d) {
  if (!(p > 0.0 && p <= q && q <= 1.0))
    throw std::domain_error("tau_constant needs 0 < p <= q <= 1");
  if (d < 1) throw std::domain_error("tau_constant needs d >= 1");
  return std::pow(2.0, 1.0 / p - 1.0 / q) *
         std::pow(std::pow(2.0, 2.0 * d) - 1.0, 1.0 / p);
}

std::vector<ConstantAudit> audit_all(double p) {
  if (!(p > 0.0 && p <= 1.0)) throw std::domain_error("audit needs p in (0, 1]");
  std::vector<ConstantAudit> out;

  out.push_back({"mu(6, 1)", mu_const(6.0, 1.0), kNaN, kNaN,
                 "partition-of-unity constant at kappa = 6, gamma = 1"});
  out.push_back({"nu_floor(14(R^2+R-1)) at R = 2", nu_floor(14.0 * 5.0), kNaN, kNaN,
                 "exclusive anchor bound 2 + beta"});
  out.push_back({"rational_factor(2)", rational_factor(2.0), 1036.8,
                 rational_factor(2.0) / 1036.8, "16 * 9 * 36 / 5"});

  AMin amin = A_min();
  out.push_back({"A minimizer R*", amin.R, kNaN, kNaN,
                 "interior minimizer of the closed form"});
  out.push_back({"rational_factor(R*)", amin.rational, kNaN, kNaN, ""});
  out.push_back({"A closed form at R*", amin.value, kQuotedAValue,
                 amin.value / kQuotedAValue,
                 "printed decimal carried for comparison only; not reconciled"});
  out.push_back({"A primitive product at R*", amin.primitive, amin.value,
                 amin.primitive / amin.value,
                 "8e ln2 gamma (2+beta) (1+alpha)^2/alpha kappa ln(2 kappa) with "
                 "kappa=6, alpha=R^2+R-1, beta=14 alpha, gamma=R^2/(R-1); the "
                 "prefactor works out to 96 e ln2 ln12 against the printed 16"});

  for (double R : {1.5, 2.0, 3.0}) {
    double alpha = R * R + R - 1.0;
    ConstantAudit a;
    a.name = "primitive/printed chain at R = " + std::to_string(R);
    a.value = A_primitive_of_R(R);
    a.printed = A_of_R(R);
    a.ratio = a.value / a.printed;
    a.notes = "both sides evaluated independently";
    out.push_back(a);
    out.push_back({"extension bound D at R = " + std::to_string(R) +
                       ", p = " + std::to_string(p),
                   bound_D(p, 6.0, R * R / (R - 1.0), 14.0 * alpha, alpha), kNaN,
                   kNaN, "Whitney parameters of the tree reduction"});
  }

  out.push_back({"tau constant (p, q, d) = (p, 1, 2)", tau_constant(p, 1.0, 2), kNaN,
                 kNaN, ""});
  out.push_back({"tau constant (p, p, 2)", tau_constant(p, p, 2),
                 std::pow(std::pow(2.0, 4.0) - 1.0, 1.0 / p),
                 tau_constant(p, p, 2) / std::pow(std::pow(2.0, 4.0) - 1.0, 1.0 / p),
                 "at p = q the prefactor 2^(1/p-1/q) drops out"});
  return out;
}

}  // namespace constants
}  // namespace freep
