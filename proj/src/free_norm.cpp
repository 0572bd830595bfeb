#include "freep/free_norm.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "freep/constants.hpp"
#include "freep/parallel.hpp"
#include "freep/rng.hpp"
#include "freep/simplex.hpp"

namespace freep {

namespace {

constexpr int kMaxPoints = 12;  // hard bound for the fixed-size scratch arrays

using Edge = std::pair<int, int>;

void check_exponent(const Molecule& mu, double p) {
  if (!(p > 0.0 && p <= 1.0))
    throw std::domain_error("norm exponent must lie in (0, 1]");
  if (p > mu.space()->p + 1e-12)
    throw std::domain_error("norm exponent exceeds the space exponent");
}

// Signed mass vector with the base point absorbing the negative total, so
// every spanning-tree flow problem balances exactly.
std::vector<double> balanced_mass(const Molecule& mu) {
  const auto& c = mu.coeffs();
  std::vector<double> mass(c.size());
  double total = 0.0;
  for (int i = 0; i < c.size(); ++i) {
    mass[i] = c[i];
    total += c[i];
  }
  mass[mu.space()->base] -= total;
  return mass;
}

// Decodes the Pruefer sequence of `m` vertices addressed by `index` written
// in base m. Output: m-1 edges.
void prufer_decode(std::uint64_t index, int m, Edge* edges) {
  if (m == 2) {
    edges[0] = {0, 1};
    return;
  }
  int seq[kMaxPoints - 2];
  for (int k = 0; k < m - 2; ++k) {
    seq[k] = static_cast<int>(index % m);
    index /= m;
  }
  int deg[kMaxPoints];
  for (int v = 0; v < m; ++v) deg[v] = 1;
  for (int k = 0; k < m - 2; ++k) deg[seq[k]]++;
  int count = 0;
  for (int k = 0; k < m - 2; ++k) {
    int leaf = -1;
    for (int v = 0; v < m; ++v)
      if (deg[v] == 1) {
        leaf = v;
        break;
      }
    edges[count++] = {leaf, seq[k]};
    deg[leaf] = 0;
    deg[seq[k]]--;
  }
  int u = -1, v = -1;
  for (int w = 0; w < m; ++w)
    if (deg[w] == 1) (u < 0 ? u : v) = w;
  edges[count++] = {u, v};
}

// Flows below this fraction of the molecule's mass are cancellation dust from
// the balancing sum at the base point; |dust|^p would otherwise inflate the
// cost by dust^p (1e-8 at p = 1/2 for 1e-16 dust). Matches the coefficient
// pruning threshold.
double flow_tolerance(const std::vector<double>& mass) {
  double total = 0.0;
  for (double v : mass) total += std::abs(v);
  return 1e-12 * total;
}

// Leaf peeling: the unique flow on a spanning tree transporting `mass` to
// zero. Returns sum over edges of |flow|^p d^p; when `flow_out` is given it
// receives the flow across each edge oriented first -> second.
double tree_cost(const Edge* edges, int m, const std::vector<double>& mass,
                 const Eigen::MatrixXd& dpow, double p, double flow_tol,
                 double* flow_out) {
  double acc[kMaxPoints];
  int deg[kMaxPoints];
  bool done[kMaxPoints - 1];
  for (int v = 0; v < m; ++v) {
    acc[v] = mass[v];
    deg[v] = 0;
  }
  for (int e = 0; e < m - 1; ++e) {
    done[e] = false;
    deg[edges[e].first]++;
    deg[edges[e].second]++;
  }
  double total = 0.0;
  for (int step = 0; step < m - 1; ++step) {
    for (int e = 0; e < m - 1; ++e) {
      if (done[e]) continue;
      auto [u, v] = edges[e];
      int leaf, other;
      if (deg[u] == 1)
        leaf = u, other = v;
      else if (deg[v] == 1)
        leaf = v, other = u;
      else
        continue;
      double f = acc[leaf];
      if (std::abs(f) > flow_tol) total += std::pow(std::abs(f), p) * dpow(u, v);
      acc[other] += f;
      acc[leaf] = 0.0;
      deg[leaf]--;
      deg[other]--;
      done[e] = true;
      if (flow_out) flow_out[e] = leaf == u ? f : -f;
      break;
    }
  }
  return total;
}

// Witness terms from per-edge flows; a = flow * d, oriented so a >= 0, sorted
// by canonical edge order.
ElementaryDecomposition witness_from_flows(const Edge* edges, int edge_count,
                                           const double* flows, double flow_tol,
                                           const QuasiMetricSpace& space) {
  ElementaryDecomposition dec;
  for (int e = 0; e < edge_count; ++e) {
    double f = flows[e];
    if (std::abs(f) <= flow_tol) continue;
    int x = edges[e].first, y = edges[e].second;
    if (f < 0.0) {
      std::swap(x, y);
      f = -f;
    }
    dec.terms.push_back({x, y, f * space.d(x, y)});
  }
  std::sort(dec.terms.begin(), dec.terms.end(),
            [](const ElementaryTerm& a, const ElementaryTerm& b) {
              auto key = [](const ElementaryTerm& t) {
                return std::array<int, 2>{std::min(t.x, t.y), std::max(t.x, t.y)};
              };
              return key(a) < key(b);
            });
  return dec;
}

std::array<std::array<int, 2>, kMaxPoints - 1> canonical_edges(const Edge* edges,
                                                               int count) {
  std::array<std::array<int, 2>, kMaxPoints - 1> out{};
  for (int e = 0; e < count; ++e)
    out[e] = {std::min(edges[e].first, edges[e].second),
              std::max(edges[e].first, edges[e].second)};
  std::sort(out.begin(), out.begin() + count);
  return out;
}

std::uint64_t ipow(std::uint64_t b, int e) {
  std::uint64_t r = 1;
  while (e-- > 0) r *= b;
  return r;
}

}  // namespace

NormResult norm_exact(const Molecule& mu, double p, int cap) {
  check_exponent(mu, p);
  const QuasiMetricSpace& space = *mu.space();
  const int m = space.size();
  if (m > cap)
    throw std::length_error(
        "point count exceeds the certified enumeration cap; use norm_search");

  NormResult res;
  res.method = NormMethod::Exact;
  res.certified = true;
  if (mu.is_zero() || m < 2) return res;

  const std::vector<double> mass = balanced_mass(mu);
  const double flow_tol = flow_tolerance(mass);
  const Eigen::MatrixXd dpow = space.dist.array().pow(p).matrix();
  const std::uint64_t total = ipow(m, m - 2);

  struct Best {
    double cost = std::numeric_limits<double>::infinity();
    std::uint64_t index = 0;
    std::array<std::array<int, 2>, kMaxPoints - 1> edges{};
  };
  std::vector<Best> partial;
  std::mutex partial_mutex;

  parallel_chunks(static_cast<std::int64_t>(total), [&](std::int64_t b, std::int64_t e) {
    Best best;
    Edge edges[kMaxPoints - 1];
    for (std::int64_t idx = b; idx < e; ++idx) {
      prufer_decode(static_cast<std::uint64_t>(idx), m, edges);
      double cost = tree_cost(edges, m, mass, dpow, p, flow_tol, nullptr);
      if (cost < best.cost) {
        best.cost = cost;
        best.index = static_cast<std::uint64_t>(idx);
        best.edges = canonical_edges(edges, m - 1);
      } else if (cost == best.cost) {
        auto cand = canonical_edges(edges, m - 1);
        if (cand < best.edges) {
          best.index = static_cast<std::uint64_t>(idx);
          best.edges = cand;
        }
      }
    }
    std::lock_guard<std::mutex> lock(partial_mutex);
    partial.push_back(best);
  });

  Best best;
  for (const Best& cand : partial) {
    if (cand.cost < best.cost ||
        (cand.cost == best.cost && cand.edges < best.edges))
      best = cand;
  }

  Edge edges[kMaxPoints - 1];
  double flows[kMaxPoints - 1] = {};
  prufer_decode(best.index, m, edges);
  tree_cost(edges, m, mass, dpow, p, flow_tol, flows);
  res.value = std::pow(best.cost, 1.0 / p);
  res.witness = witness_from_flows(edges, m - 1, flows, flow_tol, space);
  return res;
}

namespace {

// State for local search on one spanning tree.
struct TreeState {
  int m = 0;
  std::vector<Edge> edges;

  // Vertices on the `first` side of edge e once e is removed.
  std::vector<int> cut_side(int e) const {
    std::vector<int> side;
    std::vector<bool> seen(m, false);
    std::vector<int> stack{edges[e].first};
    seen[edges[e].first] = true;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      side.push_back(u);
      for (int k = 0; k < m - 1; ++k) {
        if (k == e) continue;
        int v = -1;
        if (edges[k].first == u)
          v = edges[k].second;
        else if (edges[k].second == u)
          v = edges[k].first;
        if (v >= 0 && !seen[v]) {
          seen[v] = true;
          stack.push_back(v);
        }
      }
    }
    return side;
  }
};

double flow_cost(const std::vector<Edge>& edges, const std::vector<double>& flows,
                 const Eigen::MatrixXd& dpow, double p, double flow_tol) {
  double total = 0.0;
  for (std::size_t e = 0; e < edges.size(); ++e)
    if (std::abs(flows[e]) > flow_tol)
      total += std::pow(std::abs(flows[e]), p) * dpow(edges[e].first, edges[e].second);
  return total;
}

// Tree path from a to b as a list of (edge index, +1 if traversed
// first->second).
std::vector<std::pair<int, int>> tree_path(const TreeState& tree, int a, int b) {
  std::vector<int> parent(tree.m, -1), via(tree.m, -1), dir(tree.m, 0);
  std::vector<bool> seen(tree.m, false);
  std::vector<int> stack{a};
  seen[a] = true;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (int k = 0; k < tree.m - 1; ++k) {
      int v = -1, d = 0;
      if (tree.edges[k].first == u)
        v = tree.edges[k].second, d = +1;
      else if (tree.edges[k].second == u)
        v = tree.edges[k].first, d = -1;
      if (v >= 0 && !seen[v]) {
        seen[v] = true;
        parent[v] = u;
        via[v] = k;
        dir[v] = d;
        stack.push_back(v);
      }
    }
  }
  std::vector<std::pair<int, int>> path;
  for (int u = b; u != a; u = parent[u]) path.push_back({via[u], dir[u]});
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace

NormResult norm_search(const Molecule& mu, double p, int restarts,
                       std::uint64_t seed) {
  check_exponent(mu, p);
  const QuasiMetricSpace& space = *mu.space();
  const int m = space.size();

  NormResult res;
  res.method = NormMethod::Search;
  res.certified = false;
  if (mu.is_zero() || m < 2) return res;

  const std::vector<double> mass = balanced_mass(mu);
  const double flow_tol = flow_tolerance(mass);
  const Eigen::MatrixXd dpow = space.dist.array().pow(p).matrix();

  struct Best {
    double cost = std::numeric_limits<double>::infinity();
    int restart = std::numeric_limits<int>::max();
    std::vector<Edge> edges;
    std::vector<double> flows;
  };
  std::vector<Best> partial;
  std::mutex partial_mutex;

  parallel_chunks(restarts, [&](std::int64_t rb, std::int64_t re) {
    Best best;
    Edge scratch[kMaxPoints - 1];
    double scratch_flows[kMaxPoints - 1];
    for (std::int64_t r = rb; r < re; ++r) {
      Rng rng = substream(seed, static_cast<std::uint64_t>(r));

      TreeState tree;
      tree.m = m;
      std::uint64_t index = 0;
      for (int k = 0; k < m - 2; ++k)
        index = index * m + rng.below(static_cast<std::uint64_t>(m));
      prufer_decode(index, m, scratch);
      tree.edges.assign(scratch, scratch + (m - 1));

      auto eval_tree = [&](const std::vector<Edge>& edges) {
        std::copy(edges.begin(), edges.end(), scratch);
        return tree_cost(scratch, m, mass, dpow, p, flow_tol, nullptr);
      };

      double cost = eval_tree(tree.edges);
      // Edge-swap descent: remove a tree edge, reconnect across the cut.
      bool improved = true;
      while (improved) {
        improved = false;
        for (int e = 0; e < m - 1 && !improved; ++e) {
          std::vector<int> side = tree.cut_side(e);
          std::vector<bool> in_side(m, false);
          for (int v : side) in_side[v] = true;
          for (int u = 0; u < m && !improved; ++u) {
            if (!in_side[u]) continue;
            for (int v = 0; v < m && !improved; ++v) {
              if (in_side[v]) continue;
              Edge candidate{u, v};
              if (candidate == tree.edges[e] ||
                  Edge{v, u} == tree.edges[e])
                continue;
              Edge removed = tree.edges[e];
              tree.edges[e] = candidate;
              double c2 = eval_tree(tree.edges);
              if (c2 < cost - 1e-15) {
                cost = c2;
                improved = true;
              } else {
                tree.edges[e] = removed;
              }
            }
          }
        }
      }

      std::copy(tree.edges.begin(), tree.edges.end(), scratch);
      tree_cost(scratch, m, mass, dpow, p, flow_tol, scratch_flows);
      std::vector<Edge> edges = tree.edges;
      std::vector<double> flows(scratch_flows, scratch_flows + (m - 1));

      // Cyclic-support exploration: add extra edges and line-minimize the
      // concave cost along fundamental-cycle shifts. Minima sit where some
      // edge flow vanishes, so every breakpoint is probed.
      if (r % 3 == 0 && m >= 3) {
        int extras = 1 + static_cast<int>(rng.below(2));
        std::vector<std::vector<std::pair<int, int>>> cycles;
        for (int t = 0; t < extras; ++t) {
          int a = rng.index(m);
          int b = rng.index(m);
          if (a == b) continue;
          bool dup = false;
          for (const Edge& e : edges)
            if ((e.first == a && e.second == b) || (e.first == b && e.second == a))
              dup = true;
          if (dup) continue;
          auto path = tree_path(tree, a, b);
          edges.push_back({a, b});
          flows.push_back(0.0);
          // Cycle: +t on the extra edge a->b, -t along the tree path a->b.
          std::vector<std::pair<int, int>> cyc;
          cyc.push_back({static_cast<int>(edges.size()) - 1, +1});
          for (auto [k, d] : path) cyc.push_back({k, -d});
          cycles.push_back(std::move(cyc));
        }
        for (int sweep = 0; sweep < 4; ++sweep) {
          bool moved = false;
          for (const auto& cyc : cycles) {
            double base_cost = flow_cost(edges, flows, dpow, p, flow_tol);
            double best_t = 0.0, best_cost = base_cost;
            for (auto [k, s] : cyc) {
              double t = -flows[k] / s;  // shift making edge k vanish
              if (t == 0.0) continue;
              std::vector<double> trial = flows;
              for (auto [k2, s2] : cyc) trial[k2] += s2 * t;
              double c2 = flow_cost(edges, trial, dpow, p, flow_tol);
              if (c2 < best_cost - 1e-15) {
                best_cost = c2;
                best_t = t;
              }
            }
            if (best_t != 0.0) {
              for (auto [k2, s2] : cyc) flows[k2] += s2 * best_t;
              moved = true;
            }
          }
          if (!moved) break;
        }
        cost = flow_cost(edges, flows, dpow, p, flow_tol);
      }

      if (cost < best.cost - 1e-15 ||
          (cost < best.cost + 1e-15 && static_cast<int>(r) < best.restart)) {
        best.cost = cost;
        best.restart = static_cast<int>(r);
        best.edges = edges;
        best.flows = flows;
      }
    }
    std::lock_guard<std::mutex> lock(partial_mutex);
    partial.push_back(std::move(best));
  });

  Best best;
  for (Best& cand : partial)
    if (cand.cost < best.cost - 1e-15 ||
        (cand.cost < best.cost + 1e-15 && cand.restart < best.restart))
      best = std::move(cand);

  res.value = std::pow(best.cost, 1.0 / p);
  std::vector<Edge> edges = best.edges;
  res.witness = witness_from_flows(edges.data(), static_cast<int>(edges.size()),
                                   best.flows.data(), flow_tol, space);
  return res;
}

double dual_lower_bound(const Molecule& mu, double p) {
  check_exponent(mu, p);
  const QuasiMetricSpace& space = *mu.space();
  const int m = space.size();
  if (mu.is_zero() || m < 2) return 0.0;

  // Variables f(x) for x != base, split into positive parts: f = u - v.
  std::vector<int> vars;
  for (int i = 0; i < m; ++i)
    if (i != space.base) vars.push_back(i);
  const int k = static_cast<int>(vars.size());

  const int rows = m * (m - 1);  // both signs of every ordered pair constraint
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(rows, 2 * k);
  Eigen::VectorXd b(rows);
  int row = 0;
  auto var_pos = [&](int point) {
    for (int j = 0; j < k; ++j)
      if (vars[j] == point) return j;
    return -1;
  };
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      int vi = var_pos(i), vj = var_pos(j);
      for (int sign : {+1, -1}) {
        if (vi >= 0) {
          A(row, vi) = sign;
          A(row, k + vi) = -sign;
        }
        if (vj >= 0) {
          A(row, vj) = -sign;
          A(row, k + vj) = sign;
        }
        b(row) = space.d(i, j);
        ++row;
      }
    }
  A.conservativeResize(row, Eigen::NoChange);
  b.conservativeResize(row);

  Eigen::VectorXd c(2 * k);
  for (int j = 0; j < k; ++j) {
    c[j] = mu.coeff(vars[j]);
    c[k + j] = -mu.coeff(vars[j]);
  }

  SimplexResult lp = simplex_max(c, A, b);
  if (!lp.ok) throw std::runtime_error("dual bound LP did not converge");
  return lp.value;
}

std::pair<NormResult, NormResult> envelope_compare(const Molecule& mu, double p,
                                                   double q, int cap) {
  if (!(p <= q)) throw std::invalid_argument("envelope_compare needs p <= q");
  NormResult at_p = norm_exact(mu, p, cap);
  NormResult at_q = norm_exact(mu, q, cap);
  if (at_q.value > at_p.value + 1e-9)
    throw std::logic_error("envelope monotonicity violated; enumeration bug");
  return {at_p, at_q};
}

Molecule inject(const Molecule& mu_on_subset, const SubsetSelection& subset,
                SpacePtr parent) {
  if (parent != subset.parent)
    throw std::invalid_argument("subset does not belong to the given parent");
  if (mu_on_subset.space()->size() != static_cast<int>(subset.members.size()))
    throw std::invalid_argument("molecule does not live on the restriction");
  Eigen::VectorXd c = Eigen::VectorXd::Zero(parent->size());
  for (std::size_t a = 0; a < subset.members.size(); ++a)
    c[subset.members[a]] = mu_on_subset.coeff(static_cast<int>(a));
  return Molecule(parent, std::move(c));
}

DistortionReport distortion(const SubsetSelection& subset, const Molecule& mu,
                            double p, std::optional<double> bound, int cap) {
  const SpacePtr& parent = subset.parent;
  auto sub_space = std::make_shared<QuasiMetricSpace>(
      restrict_space(*parent, subset.members));

  Molecule on_sub(sub_space);
  Molecule on_parent(parent);
  if (mu.space() == parent) {
    for (int x : mu.support())
      if (!subset.contains(x))
        throw std::invalid_argument("molecule support escapes the subset");
    on_parent = mu;
    for (std::size_t a = 0; a < subset.members.size(); ++a)
      on_sub.set_coeff(static_cast<int>(a), mu.coeff(subset.members[a]));
  } else if (mu.space()->size() == sub_space->size()) {
    on_sub = Molecule(sub_space, mu.coeffs());
    on_parent = inject(on_sub, subset, parent);
  } else {
    throw std::invalid_argument("molecule lives on neither the parent nor the subset");
  }

  DistortionReport report;
  report.bound = bound ? *bound : std::pow(constants::A_primitive(), 1.0 / p);
  report.norm_subset = norm_exact(on_sub, p, cap).value;
  report.norm_parent = norm_exact(on_parent, p, cap).value;
  report.ratio = report.norm_parent == 0.0
                     ? 1.0
                     : report.norm_subset / report.norm_parent;
  report.nonexpansive_ok = report.ratio >= 1.0 - 1e-9;
  report.within_bound = report.ratio <= report.bound;
  return report;
}

}  // namespace freep
