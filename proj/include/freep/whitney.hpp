#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

#include "freep/space.hpp"

namespace freep {

/// A scale-s cover of a finite metric subspace: nonempty subsets of N (point
/// indices of the ambient space) of diameter at most lambda*s such that no
/// subset of N of diameter <= s meets more than n+1 of them.
struct NagataCover {
  double s = 0.0;
  int n = 0;
  double lambda = 1.0;
  std::vector<std::vector<int>> sets;
};

struct NagataReport {
  bool ok = false;
  bool covers = false;
  bool diam_ok = false;
  bool multiplicity_ok = false;
  double worst_diam = 0.0;       // max set diameter, to compare with lambda*s
  int worst_multiplicity = 0;    // max sets met by a diameter-<=s subset
  std::vector<int> worst_subset;
  std::string message;
};

/// Exhaustive verification. `rho` is the ambient metric table (the metricized
/// view d^p of a quasi-metric space). The multiplicity scan is exact for
/// |N| <= 15 via subset enumeration; beyond that it scans singletons and all
/// pairs within distance s, which lower-bounds the true multiplicity.
NagataReport verify_nagata(const Eigen::MatrixXd& rho, const std::vector<int>& N,
                           const NagataCover& cover);

enum class NagataStrategy { Auto, Greedy, TreeBand, Exhaustive };

/// Tree data for the band construction: root distance per point and the
/// minimum root distance along the unique tree path between any two points.
struct TreeContext {
  std::vector<double> level;
  Eigen::MatrixXd path_min_level;
};

TreeContext make_tree_context(const WeightedTree& tree,
                              const QuasiMetricSpace& space);

/// Builds a verified Nagata cover of (N, rho) at scale s for the target
/// (n, lambda), by the chosen strategy with fallbacks; throws when no
/// candidate passes verification. Never returns an unverified cover.
NagataCover nagata_cover(const Eigen::MatrixXd& rho, const std::vector<int>& N,
                         double s, int n, double lambda,
                         NagataStrategy strategy = NagataStrategy::Auto,
                         const TreeContext* tree = nullptr);

/// Scale-indexed cover source with its declared Nagata parameters.
struct NagataProvider {
  int n = 0;
  double lambda = 1.0;
  std::function<NagataCover(double)> build;
};

/// Greedy ball covers around maximal separated nets (lambda = 2), with n
/// calibrated as the worst multiplicity observed over the probe scales.
NagataProvider greedy_nagata_provider(const Eigen::MatrixXd& rho,
                                      const std::vector<int>& N,
                                      const std::vector<double>& probe_scales);

/// Band decomposition of a skeleton tree by root distance, restricted to N;
/// declares the (1, 6) property.
NagataProvider tree_nagata_provider(const WeightedTree& tree,
                                    const QuasiMetricSpace& space,
                                    const std::vector<int>& N);

/// Singleton sets; declares (|N| - 1, 1). Always verifies at every scale.
NagataProvider trivial_nagata_provider(const Eigen::MatrixXd& rho,
                                       const std::vector<int>& N);

/// Searches small (n, lambda) targets in increasing order and returns the
/// first pair for which every probe scale admits a verified cover from the
/// standard candidate families; the provider then rebuilds per scale.
NagataProvider exhaustive_nagata_provider(const Eigen::MatrixXd& rho,
                                          const std::vector<int>& N,
                                          const std::vector<double>& probe_scales);

struct WhitneyParams {
  double kappa = 0.0;
  double gamma = 0.0;
  double beta = 0.0;
  double alpha = 0.0;
};

struct WhitneySet {
  int j = 0;  // scale index
  int k = 0;  // set index within the scale-j Nagata cover
  std::vector<int> members;
};

struct ScaleCover {
  int j = 0;
  double s = 0.0;
  NagataCover cover;
};

/// Whitney cover of V = M \ N relative to the metricized space (M, d^p),
/// together with the Nagata covers it was assembled from.
struct WhitneyCover {
  double R = 0.0;
  int nagata_n = 0;
  double nagata_lambda = 1.0;
  WhitneyParams params;
  std::vector<WhitneySet> sets;
  std::vector<ScaleCover> scales;
};

/// The scale ladder s_j = 2(R^2+R-1) R^(j-1) for j spanning the data range
/// of distances from V to N (with one index margin on both sides).
std::vector<std::pair<int, double>> whitney_scales(const QuasiMetricSpace& space,
                                                   const std::vector<int>& N,
                                                   double R);

/// Runs the interval construction at every scale, attaches the closed-form
/// parameters (3(n+1), R^2/(R-1), 2(R^2+R-1)(lambda+1), R^2+R-1), and
/// verifies the result before returning; a verification failure throws.
WhitneyCover whitney_build(const QuasiMetricSpace& space, const std::vector<int>& N,
                           double R, const NagataProvider& provider);

struct WhitneyReport {
  bool ok = false;
  bool structural_ok = false;     // sets nonempty subsets of V
  bool multiplicity_ok = false;   // condition (a)
  bool gamma_ok = false;          // condition (b)
  bool diam_ok = false;           // condition (c)
  bool alpha_ok = false;          // condition (d)
  bool claim_a_ok = false;        // nearest-set membership at every used scale
  bool claim_b_ok = false;        // half-scale ball multiplicity at every scale
  int max_multiplicity = 0;
  double worst_gamma_ratio = 0.0;  // max over x of min over U of rho(x,N)/rho(x,M\U), vs gamma
  double worst_diam_ratio = 0.0;   // max over U, x in U of diam(U)/rho(x,N), vs beta
  double worst_alpha_ratio = 0.0;  // max over U, x,y in U of rho(x,N)/rho(y,N), vs alpha
  std::string violated;
};

WhitneyReport verify_whitney(const QuasiMetricSpace& space,
                             const std::vector<int>& N, const WhitneyCover& cover);

/// Tabulated partition of unity subordinated to a Whitney cover, with anchors
/// taken in N so that extension operators can evaluate boundary data at them.
struct PartitionOfUnity {
  std::vector<int> v_points;   // V in ambient index order
  std::vector<WhitneySet> sets;  // construction order; doubles as the well-order
  Eigen::MatrixXd phi;         // one row per set, one column per V point
  std::vector<int> anchors;    // per set, a point of N
  WhitneyParams params;
  double nu = 0.0;
  double mu_const = 0.0;
  double q_psi = 0.0;

  int v_position(int point) const;  // column of an ambient index, or -1
};

/// Builds phi_U = rho(., M\U)^q / sum over the cover, q = ln(2 kappa).
/// Requires kappa >= 2 and nu > 2 + beta. For each set U the minimizer
/// u* of rho(., N) over U must satisfy rho(u*, N) <= (nu-1) rho(U, N) - diam(U)
/// (otherwise the construction errors and suggests a larger nu); the stored
/// anchor is the point of N nearest to u*, so stored anchors always lie in N.
PartitionOfUnity partition_of_unity(const QuasiMetricSpace& space,
                                    const std::vector<int>& N,
                                    const WhitneyCover& cover, double nu);

struct PouReport {
  bool ok = false;
  bool sums_to_one = false;
  bool support_matches_sets = false;  // phi_U > 0 exactly on U
  bool b1_ok = false, b2_ok = false, b3_ok = false, b4_ok = false;
  int max_support_count = 0;       // vs kappa
  double worst_b1_ratio = 0.0;     // LHS / (mu rho(x,y)(1/rho(x,N) + 1/rho(y,N)))
  double worst_b2_ratio = 0.0;     // rho(x, x_j) / (nu rho(y, N))
  double worst_b3_ratio = 0.0;     // rho(x, N) / (gamma rho(x, y))
  std::string violated;
};

PouReport verify_pou(const PartitionOfUnity& pou, const QuasiMetricSpace& space,
                     const std::vector<int>& N);

/// Complement of N in index order.
std::vector<int> complement_points(const QuasiMetricSpace& space,
                                   const std::vector<int>& N);

}  // namespace freep
