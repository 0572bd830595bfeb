#include "freep/whitney.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "freep/constants.hpp"

namespace freep {

namespace {

constexpr double kRelTol = 1e-9;

double set_diam(const Eigen::MatrixXd& rho, const std::vector<int>& set) {
  double d = 0.0;
  for (std::size_t a = 0; a < set.size(); ++a)
    for (std::size_t b = a + 1; b < set.size(); ++b)
      d = std::max(d, rho(set[a], set[b]));
  return d;
}

double dist_to_set(const Eigen::MatrixXd& rho, int x, const std::vector<int>& set) {
  double d = std::numeric_limits<double>::infinity();
  for (int y : set) d = std::min(d, rho(x, y));
  return d;
}

}  // namespace

std::vector<int> complement_points(const QuasiMetricSpace& space,
                                   const std::vector<int>& N) {
  std::vector<bool> in_n(space.size(), false);
  for (int x : N) in_n[x] = true;
  std::vector<int> out;
  for (int x = 0; x < space.size(); ++x)
    if (!in_n[x]) out.push_back(x);
  return out;
}

NagataReport verify_nagata(const Eigen::MatrixXd& rho, const std::vector<int>& N,
                           const NagataCover& cover) {
  NagataReport report;
  if (N.empty() || cover.sets.empty()) {
    report.message = "empty point set or cover";
    return report;
  }
  for (const auto& set : cover.sets) {
    if (set.empty()) {
      report.message = "cover contains an empty set";
      return report;
    }
    for (int x : set)
      if (std::find(N.begin(), N.end(), x) == N.end()) {
        report.message = "cover set escapes N";
        return report;
      }
  }

  std::vector<bool> covered(rho.rows(), false);
  for (const auto& set : cover.sets)
    for (int x : set) covered[x] = true;
  report.covers = std::all_of(N.begin(), N.end(), [&](int x) { return covered[x]; });

  report.worst_diam = 0.0;
  for (const auto& set : cover.sets)
    report.worst_diam = std::max(report.worst_diam, set_diam(rho, set));
  report.diam_ok = report.worst_diam <= cover.lambda * cover.s * (1.0 + kRelTol);

  const int nn = static_cast<int>(N.size());
  const double s_tol = cover.s * (1.0 + kRelTol);
  auto multiplicity_of = [&](const std::vector<int>& A) {
    int count = 0;
    for (const auto& set : cover.sets) {
      bool meets = false;
      for (int a : A) {
        if (std::find(set.begin(), set.end(), a) != set.end()) {
          meets = true;
          break;
        }
      }
      if (meets) count++;
    }
    return count;
  };

  report.worst_multiplicity = 0;
  if (nn <= 15) {
    // Exact scan over every subset of N with small diameter.
    for (std::uint32_t mask = 1; mask < (1u << nn); ++mask) {
      std::vector<int> A;
      double diam = 0.0;
      bool small = true;
      for (int i = 0; i < nn && small; ++i) {
        if (!(mask & (1u << i))) continue;
        for (int a : A) {
          diam = std::max(diam, rho(N[i], a));
          if (diam > s_tol) small = false;
        }
        A.push_back(N[i]);
      }
      if (!small) continue;
      int mult = multiplicity_of(A);
      if (mult > report.worst_multiplicity) {
        report.worst_multiplicity = mult;
        report.worst_subset = A;
      }
    }
  } else {
    // Singleton and close-pair scan; a lower bound on the true multiplicity.
    for (int i = 0; i < nn; ++i) {
      int mult = multiplicity_of({N[i]});
      if (mult > report.worst_multiplicity) {
        report.worst_multiplicity = mult;
        report.worst_subset = {N[i]};
      }
      for (int j = i + 1; j < nn; ++j) {
        if (rho(N[i], N[j]) > s_tol) continue;
        mult = multiplicity_of({N[i], N[j]});
        if (mult > report.worst_multiplicity) {
          report.worst_multiplicity = mult;
          report.worst_subset = {N[i], N[j]};
        }
      }
    }
  }
  report.multiplicity_ok = report.worst_multiplicity <= cover.n + 1;

  report.ok = report.covers && report.diam_ok && report.multiplicity_ok;
  if (!report.ok) {
    std::ostringstream os;
    if (!report.covers) os << "cover misses points of N; ";
    if (!report.diam_ok)
      os << "diameter " << report.worst_diam << " exceeds lambda*s = "
         << cover.lambda * cover.s << "; ";
    if (!report.multiplicity_ok)
      os << "multiplicity " << report.worst_multiplicity << " exceeds n+1 = "
         << cover.n + 1;
    report.message = os.str();
  }
  return report;
}

namespace {

NagataCover greedy_ball_cover(const Eigen::MatrixXd& rho, const std::vector<int>& N,
                              double s, int n, double lambda) {
  NagataCover cover{s, n, lambda, {}};
  std::vector<int> centers;
  for (int x : N) {
    bool separated = true;
    for (int c : centers)
      if (rho(x, c) < s) separated = false;
    if (separated) centers.push_back(x);
  }
  for (int c : centers) {
    std::vector<int> ball;
    for (int x : N)
      if (rho(x, c) <= lambda * s / 2.0) ball.push_back(x);
    if (!ball.empty()) cover.sets.push_back(std::move(ball));
  }
  return cover;
}

NagataCover band_cover(const Eigen::MatrixXd& rho, const std::vector<int>& N,
                       double s, const TreeContext& tree) {
  NagataCover cover{s, 1, 6.0, {}};
  double max_level = 0.0;
  for (int x : N) max_level = std::max(max_level, tree.level[x]);
  int bands = static_cast<int>(max_level / (2.0 * s)) + 1;
  for (int k = 0; k < bands; ++k) {
    double lo = 2.0 * k * s, hi = 2.0 * (k + 1) * s;
    std::vector<int> slab;
    for (int x : N)
      if (tree.level[x] >= lo && tree.level[x] < hi) slab.push_back(x);
    if (slab.empty()) continue;
    // Split where the connecting path dips below one scale under the slab;
    // points whose meet stays above (2k-1)s share a class.
    double threshold = (2.0 * k - 1.0) * s;
    std::vector<int> cls(slab.size(), -1);
    int classes = 0;
    for (std::size_t i = 0; i < slab.size(); ++i) {
      if (cls[i] >= 0) continue;
      cls[i] = classes++;
      for (std::size_t j = i + 1; j < slab.size(); ++j) {
        if (cls[j] >= 0) continue;
        if (tree.path_min_level(slab[i], slab[j]) >= threshold) cls[j] = cls[i];
      }
    }
    // Class membership is transitive here: meets along a root path are nested,
    // so the pairwise relation against a fixed representative is enough.
    for (int c = 0; c < classes; ++c) {
      std::vector<int> set;
      for (std::size_t i = 0; i < slab.size(); ++i)
        if (cls[i] == c) set.push_back(slab[i]);
      cover.sets.push_back(std::move(set));
    }
  }
  (void)rho;
  return cover;
}

// Set partitions of N as candidate families, in restricted-growth order.
std::vector<std::vector<std::vector<int>>> small_partitions(const std::vector<int>& N) {
  std::vector<std::vector<std::vector<int>>> out;
  const int nn = static_cast<int>(N.size());
  std::vector<int> assign(nn, 0);
  while (true) {
    int blocks = *std::max_element(assign.begin(), assign.end()) + 1;
    std::vector<std::vector<int>> part(blocks);
    for (int i = 0; i < nn; ++i) part[assign[i]].push_back(N[i]);
    out.push_back(part);
    // next restricted growth string
    int i = nn - 1;
    for (; i > 0; --i) {
      int cap = *std::max_element(assign.begin(), assign.begin() + i) + 1;
      if (assign[i] < cap) {
        assign[i]++;
        std::fill(assign.begin() + i + 1, assign.end(), 0);
        break;
      }
      assign[i] = 0;
    }
    if (i == 0) break;
  }
  return out;
}

}  // namespace

TreeContext make_tree_context(const WeightedTree& tree,
                              const QuasiMetricSpace& space) {
  const int m = space.size();
  TreeContext ctx;
  ctx.level.assign(m, 0.0);
  ctx.path_min_level = Eigen::MatrixXd::Zero(m, m);

  std::vector<int> to_space(tree.vertices.size());
  for (std::size_t v = 0; v < tree.vertices.size(); ++v) {
    int idx = space.index_of(tree.vertices[v]);
    if (idx < 0) throw std::invalid_argument("tree vertex missing from space");
    to_space[v] = idx;
  }

  std::vector<std::vector<std::pair<int, double>>> adj(tree.vertices.size());
  for (const auto& e : tree.edges) {
    int u = static_cast<int>(e[0]), v = static_cast<int>(e[1]);
    adj[u].push_back({v, e[2]});
    adj[v].push_back({u, e[2]});
  }
  int root = tree.index_of(tree.root);

  std::vector<double> level(tree.vertices.size(), -1.0);
  std::vector<int> parent(tree.vertices.size(), -1);
  std::vector<int> order;
  level[root] = 0.0;
  order.push_back(root);
  for (std::size_t head = 0; head < order.size(); ++head) {
    int u = order[head];
    for (auto [v, w] : adj[u])
      if (level[v] < 0.0) {
        level[v] = level[u] + w;
        parent[v] = u;
        order.push_back(v);
      }
  }
  for (std::size_t v = 0; v < tree.vertices.size(); ++v)
    ctx.level[to_space[v]] = level[v];

  // Minimum level along the unique path = level of the meet; walk ancestors.
  auto ancestors = [&](int v) {
    std::vector<int> chain;
    for (int u = v; u >= 0; u = parent[u]) chain.push_back(u);
    return chain;
  };
  for (std::size_t a = 0; a < tree.vertices.size(); ++a) {
    std::vector<int> ca = ancestors(static_cast<int>(a));
    for (std::size_t b = 0; b < tree.vertices.size(); ++b) {
      std::vector<int> cb = ancestors(static_cast<int>(b));
      double meet = 0.0;
      for (int u : ca)
        if (std::find(cb.begin(), cb.end(), u) != cb.end()) {
          meet = level[u];
          break;
        }
      ctx.path_min_level(to_space[a], to_space[b]) = meet;
    }
  }
  return ctx;
}

NagataCover nagata_cover(const Eigen::MatrixXd& rho, const std::vector<int>& N,
                         double s, int n, double lambda, NagataStrategy strategy,
                         const TreeContext* tree) {
  if (N.empty()) throw std::invalid_argument("nagata_cover needs a nonempty N");
  if (!(s > 0.0)) throw std::invalid_argument("nagata_cover needs s > 0");

  std::vector<NagataCover> candidates;
  auto push = [&](NagataCover c) {
    c.s = s;
    c.n = n;
    c.lambda = lambda;
    candidates.push_back(std::move(c));
  };

  if (strategy == NagataStrategy::TreeBand) {
    if (!tree) throw std::invalid_argument("tree strategy needs tree context");
    push(band_cover(rho, N, s, *tree));
  } else if (strategy == NagataStrategy::Greedy) {
    push(greedy_ball_cover(rho, N, s, n, lambda));
  } else if (strategy == NagataStrategy::Exhaustive) {
    if (N.size() > 6)
      throw std::invalid_argument("exhaustive strategy capped at 6 points");
    for (auto& part : small_partitions(N)) push({s, n, lambda, part});
  } else {  // Auto: cheap candidates first, then fallbacks
    if (tree) push(band_cover(rho, N, s, *tree));
    push({s, n, lambda, {N}});
    push(greedy_ball_cover(rho, N, s, n, lambda));
    NagataCover singles{s, n, lambda, {}};
    for (int x : N) singles.sets.push_back({x});
    push(singles);
    if (N.size() <= 6)
      for (auto& part : small_partitions(N)) push({s, n, lambda, part});
  }

  for (auto& cand : candidates)
    if (verify_nagata(rho, N, cand).ok) return cand;
  throw std::runtime_error("no verified Nagata cover found within budget");
}

NagataProvider greedy_nagata_provider(const Eigen::MatrixXd& rho,
                                      const std::vector<int>& N,
                                      const std::vector<double>& probe_scales) {
  NagataProvider provider;
  provider.lambda = 2.0;
  int worst = 0;
  for (double s : probe_scales) {
    NagataCover cover = greedy_ball_cover(rho, N, s, 0, provider.lambda);
    cover.n = static_cast<int>(N.size());  // permissive while calibrating
    NagataReport report = verify_nagata(rho, N, cover);
    worst = std::max(worst, report.worst_multiplicity);
  }
  provider.n = std::max(0, worst - 1);
  int n = provider.n;
  double lambda = provider.lambda;
  provider.build = [rho, N, n, lambda](double s) {
    NagataCover cover = greedy_ball_cover(rho, N, s, n, lambda);
    NagataReport report = verify_nagata(rho, N, cover);
    if (!report.ok)
      throw std::runtime_error("greedy Nagata cover failed verification: " +
                               report.message);
    return cover;
  };
  return provider;
}

NagataProvider tree_nagata_provider(const WeightedTree& tree,
                                    const QuasiMetricSpace& space,
                                    const std::vector<int>& N) {
  NagataProvider provider;
  provider.n = 1;
  provider.lambda = 6.0;
  TreeContext ctx = make_tree_context(tree, space);
  Eigen::MatrixXd rho = space.metricized();
  provider.build = [rho, N, ctx](double s) {
    NagataCover cover = band_cover(rho, N, s, ctx);
    NagataReport report = verify_nagata(rho, N, cover);
    if (!report.ok)
      throw std::runtime_error("tree band cover failed verification: " +
                               report.message);
    return cover;
  };
  return provider;
}

NagataProvider trivial_nagata_provider(const Eigen::MatrixXd& rho,
                                       const std::vector<int>& N) {
  NagataProvider provider;
  provider.n = static_cast<int>(N.size()) - 1;
  provider.lambda = 1.0;
  int n = provider.n;
  provider.build = [rho, N, n](double s) {
    NagataCover cover{s, n, 1.0, {}};
    for (int x : N) cover.sets.push_back({x});
    NagataReport report = verify_nagata(rho, N, cover);
    if (!report.ok)
      throw std::runtime_error("singleton cover failed verification");
    return cover;
  };
  return provider;
}

NagataProvider exhaustive_nagata_provider(const Eigen::MatrixXd& rho,
                                          const std::vector<int>& N,
                                          const std::vector<double>& probe_scales) {
  std::vector<std::pair<int, double>> targets = {
      {0, 1.0}, {0, 2.0}, {1, 2.0}, {1, 6.0}, {2, 2.0}, {2, 6.0},
      {static_cast<int>(N.size()) - 1, 1.0}, {static_cast<int>(N.size()) - 1, 6.0}};
  for (auto [n, lambda] : targets) {
    bool feasible = true;
    for (double s : probe_scales) {
      try {
        nagata_cover(rho, N, s, n, lambda, NagataStrategy::Auto);
      } catch (const std::exception&) {
        feasible = false;
        break;
      }
    }
    if (feasible) {
      NagataProvider provider;
      provider.n = n;
      provider.lambda = lambda;
      provider.build = [rho, N, n = n, lambda = lambda](double s) {
        return nagata_cover(rho, N, s, n, lambda, NagataStrategy::Auto);
      };
      return provider;
    }
  }
  throw std::runtime_error("no (n, lambda) target admits verified covers");
}

std::vector<std::pair<int, double>> whitney_scales(const QuasiMetricSpace& space,
                                                   const std::vector<int>& N,
                                                   double R) {
  if (!(R > 1.0)) throw std::invalid_argument("whitney needs R > 1");
  Eigen::MatrixXd rho = space.metricized();
  std::vector<int> V = complement_points(space, N);
  if (V.empty()) throw std::invalid_argument("nothing to cover: V is empty");
  if (N.empty()) throw std::invalid_argument("N must be nonempty");

  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (int x : V) {
    double d = dist_to_set(rho, x, N);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  int jmin = static_cast<int>(std::floor(std::log(lo) / std::log(R))) - 1;
  int jmax = static_cast<int>(std::ceil(std::log(hi) / std::log(R))) + 1;
  double front = 2.0 * (R * R + R - 1.0);
  std::vector<std::pair<int, double>> out;
  for (int j = jmin; j <= jmax; ++j)
    out.push_back({j, front * std::pow(R, j - 1.0)});
  return out;
}

WhitneyCover whitney_build(const QuasiMetricSpace& space, const std::vector<int>& N,
                           double R, const NagataProvider& provider) {
  Eigen::MatrixXd rho = space.metricized();
  std::vector<int> V = complement_points(space, N);
  auto scales = whitney_scales(space, N, R);

  WhitneyCover cover;
  cover.R = R;
  cover.nagata_n = provider.n;
  cover.nagata_lambda = provider.lambda;
  cover.params.kappa = 3.0 * (provider.n + 1);
  cover.params.gamma = R * R / (R - 1.0);
  cover.params.beta = 2.0 * (R * R + R - 1.0) * (provider.lambda + 1.0);
  cover.params.alpha = R * R + R - 1.0;

  std::vector<double> rhoN(space.size(), 0.0);
  for (int x : V) rhoN[x] = dist_to_set(rho, x, N);

  for (auto [j, s] : scales) {
    NagataCover nagata = provider.build(s);
    cover.scales.push_back({j, s, nagata});
    const double band_lo = std::pow(R, j);
    const double band_hi = std::pow(R, j + 1.0);
    const double halo = (R - 1.0) * std::pow(R, j - 1.0);
    for (std::size_t k = 0; k < nagata.sets.size(); ++k) {
      std::vector<int> A;
      for (int x : V) {
        if (!(rhoN[x] >= band_lo && rhoN[x] < band_hi)) continue;
        // D[K]: x whose distance to N is realized by this Nagata set.
        if (dist_to_set(rho, x, nagata.sets[k]) <= rhoN[x] * (1.0 + 1e-12))
          A.push_back(x);
      }
      if (A.empty()) continue;
      std::vector<int> U;
      for (int y = 0; y < space.size(); ++y)
        if (dist_to_set(rho, y, A) < halo) U.push_back(y);
      cover.sets.push_back({j, static_cast<int>(k), std::move(U)});
    }
  }

  WhitneyReport report = verify_whitney(space, N, cover);
  if (!report.ok)
    throw std::runtime_error("constructed Whitney cover failed verification: " +
                             report.violated);
  return cover;
}

WhitneyReport verify_whitney(const QuasiMetricSpace& space,
                             const std::vector<int>& N,
                             const WhitneyCover& cover) {
  WhitneyReport report;
  Eigen::MatrixXd rho = space.metricized();
  std::vector<int> V = complement_points(space, N);
  if (V.empty() || N.empty() || cover.sets.empty()) {
    report.violated = "degenerate instance or empty cover";
    return report;
  }

  std::vector<bool> in_v(space.size(), false);
  for (int x : V) in_v[x] = true;
  report.structural_ok = true;
  for (const auto& set : cover.sets) {
    if (set.members.empty()) report.structural_ok = false;
    for (int x : set.members)
      if (!in_v[x]) report.structural_ok = false;
  }

  std::vector<double> rhoN(space.size(), 0.0);
  for (int x = 0; x < space.size(); ++x) rhoN[x] = dist_to_set(rho, x, N);

  // (a) multiplicity
  report.max_multiplicity = 0;
  for (int x : V) {
    int count = 0;
    for (const auto& set : cover.sets)
      if (std::find(set.members.begin(), set.members.end(), x) != set.members.end())
        count++;
    report.max_multiplicity = std::max(report.max_multiplicity, count);
  }
  report.multiplicity_ok = report.max_multiplicity <= cover.params.kappa + 0.5;

  // (b) gamma condition
  report.worst_gamma_ratio = 0.0;
  for (int x : V) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& set : cover.sets) {
      std::vector<int> outside;
      std::vector<bool> in_u(space.size(), false);
      for (int y : set.members) in_u[y] = true;
      double d_out = std::numeric_limits<double>::infinity();
      for (int y = 0; y < space.size(); ++y)
        if (!in_u[y]) d_out = std::min(d_out, rho(x, y));
      if (d_out > 0.0) best = std::min(best, rhoN[x] / d_out);
    }
    report.worst_gamma_ratio = std::max(report.worst_gamma_ratio, best);
  }
  report.gamma_ok = report.worst_gamma_ratio <= cover.params.gamma * (1.0 + kRelTol);

  // (c) diameter bound and (d) comparability
  report.worst_diam_ratio = 0.0;
  report.worst_alpha_ratio = 0.0;
  for (const auto& set : cover.sets) {
    double diam = set_diam(rho, set.members);
    for (int x : set.members) {
      report.worst_diam_ratio = std::max(report.worst_diam_ratio, diam / rhoN[x]);
      for (int y : set.members)
        report.worst_alpha_ratio =
            std::max(report.worst_alpha_ratio, rhoN[x] / rhoN[y]);
    }
  }
  report.diam_ok = report.worst_diam_ratio <= cover.params.beta * (1.0 + kRelTol);
  report.alpha_ok = report.worst_alpha_ratio <= cover.params.alpha * (1.0 + kRelTol);

  // Proof-side claims on the stored Nagata data.
  report.claim_a_ok = true;
  report.claim_b_ok = true;
  for (const auto& scale : cover.scales) {
    for (int x : V) {
      if (2.0 * rhoN[x] < scale.s) {
        bool found = false;
        for (const auto& K : scale.cover.sets)
          if (dist_to_set(rho, x, K) <= rhoN[x] * (1.0 + 1e-12)) found = true;
        if (!found) report.claim_a_ok = false;
      }
      int close = 0;
      for (const auto& K : scale.cover.sets)
        if (dist_to_set(rho, x, K) < scale.s / 2.0) close++;
      if (close > cover.nagata_n + 1) report.claim_b_ok = false;
    }
  }

  report.ok = report.structural_ok && report.multiplicity_ok && report.gamma_ok &&
              report.diam_ok && report.alpha_ok && report.claim_a_ok &&
              report.claim_b_ok;
  if (!report.ok) {
    std::ostringstream os;
    if (!report.structural_ok) os << "sets must be nonempty subsets of V; ";
    if (!report.multiplicity_ok)
      os << "multiplicity " << report.max_multiplicity << " > kappa; ";
    if (!report.gamma_ok) os << "gamma condition fails; ";
    if (!report.diam_ok) os << "diameter condition fails; ";
    if (!report.alpha_ok) os << "comparability condition fails; ";
    if (!report.claim_a_ok) os << "nearest-set claim fails; ";
    if (!report.claim_b_ok) os << "half-scale multiplicity claim fails";
    report.violated = os.str();
  }
  return report;
}

int PartitionOfUnity::v_position(int point) const {
  for (std::size_t i = 0; i < v_points.size(); ++i)
    if (v_points[i] == point) return static_cast<int>(i);
  return -1;
}

PartitionOfUnity partition_of_unity(const QuasiMetricSpace& space,
                                    const std::vector<int>& N,
                                    const WhitneyCover& cover, double nu) {
  const double kappa = cover.params.kappa;
  if (kappa < 2.0)
    throw std::invalid_argument("partition of unity needs kappa >= 2");
  if (!(nu > 2.0 + cover.params.beta))
    throw std::invalid_argument("nu must exceed 2 + beta strictly");

  Eigen::MatrixXd rho = space.metricized();
  PartitionOfUnity pou;
  pou.v_points = complement_points(space, N);
  pou.sets = cover.sets;
  pou.params = cover.params;
  pou.nu = nu;
  pou.q_psi = std::log(2.0 * kappa);
  pou.mu_const = constants::mu_const(kappa, cover.params.gamma);

  const int nsets = static_cast<int>(pou.sets.size());
  const int nv = static_cast<int>(pou.v_points.size());
  pou.phi.resize(nsets, nv);
  for (int u = 0; u < nsets; ++u) {
    std::vector<bool> in_u(space.size(), false);
    for (int y : pou.sets[u].members) in_u[y] = true;
    for (int c = 0; c < nv; ++c) {
      int x = pou.v_points[c];
      double d_out = std::numeric_limits<double>::infinity();
      for (int y = 0; y < space.size(); ++y)
        if (!in_u[y]) d_out = std::min(d_out, rho(x, y));
      pou.phi(u, c) = in_u[x] ? std::pow(d_out, pou.q_psi) : 0.0;
    }
  }
  for (int c = 0; c < nv; ++c) {
    double total = pou.phi.col(c).sum();
    if (!(total > 0.0))
      throw std::runtime_error("cover leaves a point of V unweighted");
    pou.phi.col(c) /= total;
  }

  for (int u = 0; u < nsets; ++u) {
    const auto& members = pou.sets[u].members;
    int u_star = members.front();
    double best = std::numeric_limits<double>::infinity();
    for (int x : members) {
      double d = dist_to_set(rho, x, N);
      if (d < best) {
        best = d;
        u_star = x;
      }
    }
    double diam = set_diam(rho, members);
    double rho_un = best;  // rho(U, N) is attained at the minimizer
    if (best > (nu - 1.0) * rho_un - diam + kRelTol * rho_un)
      throw std::runtime_error(
          "anchor inequality unsatisfiable at this nu; choose a larger nu");
    int anchor = N.front();
    double nearest = std::numeric_limits<double>::infinity();
    for (int y : N)
      if (rho(u_star, y) < nearest) {
        nearest = rho(u_star, y);
        anchor = y;
      }
    pou.anchors.push_back(anchor);
  }
  return pou;
}

PouReport verify_pou(const PartitionOfUnity& pou, const QuasiMetricSpace& space,
                     const std::vector<int>& N) {
  PouReport report;
  Eigen::MatrixXd rho = space.metricized();
  const int nsets = static_cast<int>(pou.sets.size());
  const int nv = static_cast<int>(pou.v_points.size());

  std::vector<double> rhoN(nv, 0.0);
  for (int c = 0; c < nv; ++c) rhoN[c] = dist_to_set(rho, pou.v_points[c], N);

  report.sums_to_one = true;
  for (int c = 0; c < nv; ++c)
    if (std::abs(pou.phi.col(c).sum() - 1.0) > 1e-12) report.sums_to_one = false;

  report.support_matches_sets = true;
  for (int u = 0; u < nsets; ++u)
    for (int c = 0; c < nv; ++c) {
      bool member = std::find(pou.sets[u].members.begin(), pou.sets[u].members.end(),
                              pou.v_points[c]) != pou.sets[u].members.end();
      if ((pou.phi(u, c) > 0.0) != member) report.support_matches_sets = false;
    }

  report.max_support_count = 0;
  for (int c = 0; c < nv; ++c) {
    int count = 0;
    for (int u = 0; u < nsets; ++u)
      if (pou.phi(u, c) > 0.0) count++;
    report.max_support_count = std::max(report.max_support_count, count);
  }
  report.b4_ok = report.max_support_count <= pou.params.kappa + 0.5;

  report.worst_b2_ratio = 0.0;
  for (int u = 0; u < nsets; ++u)
    for (int cx = 0; cx < nv; ++cx) {
      if (!(pou.phi(u, cx) > 0.0)) continue;
      for (int cy = 0; cy < nv; ++cy) {
        if (!(pou.phi(u, cy) > 0.0)) continue;
        double ratio = rho(pou.v_points[cx], pou.anchors[u]) / (pou.nu * rhoN[cy]);
        report.worst_b2_ratio = std::max(report.worst_b2_ratio, ratio);
      }
    }
  report.b2_ok = report.worst_b2_ratio <= 1.0 + kRelTol;

  report.worst_b3_ratio = 0.0;
  report.worst_b1_ratio = 0.0;
  for (int cx = 0; cx < nv; ++cx)
    for (int cy = 0; cy < nv; ++cy) {
      if (cx == cy) continue;
      bool shared = false;
      for (int u = 0; u < nsets && !shared; ++u)
        if (pou.phi(u, cx) > 0.0 && pou.phi(u, cy) > 0.0) shared = true;
      double dist = rho(pou.v_points[cx], pou.v_points[cy]);
      if (!shared) {
        double ratio = rhoN[cx] / (pou.params.gamma * dist);
        report.worst_b3_ratio = std::max(report.worst_b3_ratio, ratio);
      }
      if (cx < cy) {
        double lhs = (pou.phi.col(cx) - pou.phi.col(cy)).cwiseAbs().sum();
        double rhs = pou.mu_const * dist * (1.0 / rhoN[cx] + 1.0 / rhoN[cy]);
        report.worst_b1_ratio = std::max(report.worst_b1_ratio, lhs / rhs);
      }
    }
  report.b3_ok = report.worst_b3_ratio <= 1.0 + kRelTol;
  report.b1_ok = report.worst_b1_ratio <= 1.0 + kRelTol;

  report.ok = report.sums_to_one && report.support_matches_sets && report.b1_ok &&
              report.b2_ok && report.b3_ok && report.b4_ok;
  if (!report.ok) {
    std::ostringstream os;
    if (!report.sums_to_one) os << "partition does not sum to one; ";
    if (!report.support_matches_sets) os << "support differs from the cover set; ";
    if (!report.b4_ok) os << "support count exceeds kappa; ";
    if (!report.b2_ok) os << "anchor distance bound fails; ";
    if (!report.b3_ok) os << "separation bound fails; ";
    if (!report.b1_ok) os << "sum bound fails";
    report.violated = os.str();
  }
  return report;
}

}  // namespace freep
