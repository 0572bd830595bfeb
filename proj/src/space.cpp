#include "freep/space.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>

namespace freep {

int QuasiMetricSpace::index_of(const std::string& name) const {
  for (int i = 0; i < size(); ++i)
    if (names[i] == name) return i;
  return -1;
}

ValidationReport validate(const QuasiMetricSpace& space) {
  ValidationReport report;
  const int m = space.size();
  if (m == 0) {
    report.structural_error = true;
    report.message = "empty point set";
    return report;
  }
  if (space.base < 0 || space.base >= m) {
    report.structural_error = true;
    report.message = "base point outside point set";
    return report;
  }
  if (space.p <= 0.0 || space.p > 1.0) {
    report.structural_error = true;
    report.message = "exponent p must lie in (0, 1]";
    return report;
  }
  if (space.dist.rows() != m || space.dist.cols() != m) {
    report.structural_error = true;
    report.message = "distance table shape does not match point count";
    return report;
  }
  for (int i = 0; i < m; ++i) {
    if (space.dist(i, i) != 0.0) {
      report.structural_error = true;
      report.message = "nonzero diagonal entry at " + space.names[i];
      return report;
    }
    for (int j = 0; j < m; ++j) {
      double v = space.dist(i, j);
      if (!(v >= 0.0) || !std::isfinite(v)) {
        report.structural_error = true;
        report.message = "negative or non-finite distance (" + space.names[i] +
                         ", " + space.names[j] + ")";
        return report;
      }
      if (i != j && v == 0.0) {
        report.structural_error = true;
        report.message = "zero off-diagonal distance (" + space.names[i] + ", " +
                         space.names[j] + ")";
        return report;
      }
      if (space.dist(i, j) != space.dist(j, i)) {
        report.structural_error = true;
        report.message = "asymmetric entries (" + space.names[i] + ", " +
                         space.names[j] + ")";
        return report;
      }
    }
  }

  Eigen::MatrixXd pow = space.metricized();
  report.worst_ratio = 0.0;
  for (int x = 0; x < m; ++x)
    for (int z = 0; z < m; ++z) {
      if (x == z) continue;
      for (int y = 0; y < m; ++y) {
        if (y == x || y == z) continue;
        double ratio = pow(x, z) / (pow(x, y) + pow(y, z));
        if (ratio > report.worst_ratio) {
          report.worst_ratio = ratio;
          report.worst_triple = {x, y, z};
        }
      }
    }
  report.ok = report.worst_ratio <= 1.0 + kTriangleTol;
  if (!report.ok) {
    std::ostringstream os;
    os << "p-triangle violated at (" << space.names[report.worst_triple[0]]
       << ", " << space.names[report.worst_triple[1]] << ", "
       << space.names[report.worst_triple[2]] << ") with ratio "
       << report.worst_ratio;
    report.message = os.str();
  }
  return report;
}

void require_valid(const QuasiMetricSpace& space) {
  ValidationReport r = validate(space);
  if (!r.ok) throw std::invalid_argument("invalid quasi-metric space: " + r.message);
}

QuasiMetricSpace snowflake(const QuasiMetricSpace& space, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("snowflake exponent must be positive");
  QuasiMetricSpace out = space;
  out.dist = space.dist.array().pow(r).matrix();
  out.p = std::min(1.0, space.p / r);
  require_valid(out);
  return out;
}

int WeightedTree::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < vertices.size(); ++i)
    if (vertices[i] == name) return static_cast<int>(i);
  return -1;
}

namespace {

// Path-weight distance table of a weighted tree; throws unless the edge set
// is exactly a spanning tree.
Eigen::MatrixXd tree_distances(const WeightedTree& tree) {
  const int m = static_cast<int>(tree.vertices.size());
  if (m == 0) throw std::invalid_argument("tree has no vertices");
  if (static_cast<int>(tree.edges.size()) != m - 1)
    throw std::invalid_argument("tree must have exactly |V| - 1 edges");
  std::vector<std::vector<std::pair<int, double>>> adj(m);
  for (const auto& e : tree.edges) {
    int u = static_cast<int>(e[0]);
    int v = static_cast<int>(e[1]);
    double w = e[2];
    if (u < 0 || u >= m || v < 0 || v >= m || u == v)
      throw std::invalid_argument("tree edge endpoints out of range");
    if (!(w > 0.0)) throw std::invalid_argument("tree edge weights must be positive");
    adj[u].push_back({v, w});
    adj[v].push_back({u, w});
  }
  Eigen::MatrixXd dist = Eigen::MatrixXd::Constant(m, m, -1.0);
  for (int s = 0; s < m; ++s) {
    dist(s, s) = 0.0;
    std::queue<int> frontier;
    frontier.push(s);
    while (!frontier.empty()) {
      int u = frontier.front();
      frontier.pop();
      for (auto [v, w] : adj[u]) {
        if (dist(s, v) < 0.0) {
          dist(s, v) = dist(s, u) + w;
          frontier.push(v);
        }
      }
    }
    for (int v = 0; v < m; ++v)
      if (dist(s, v) < 0.0)
        throw std::invalid_argument("tree is disconnected");
  }
  // Path sums accumulate in traversal order; mirror so the table is exactly
  // symmetric.
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) dist(j, i) = dist(i, j);
  return dist;
}

}  // namespace

QuasiMetricSpace skeleton_tree_space(const WeightedTree& tree, double p) {
  Eigen::MatrixXd path = tree_distances(tree);
  int root = tree.index_of(tree.root);
  if (root < 0) throw std::invalid_argument("tree root is not a vertex");
  QuasiMetricSpace out;
  out.names = tree.vertices;
  out.base = root;
  out.p = p;
  out.dist = path.array().pow(1.0 / p).matrix();
  require_valid(out);
  return out;
}

std::vector<std::string> leaves(const WeightedTree& tree) {
  tree_distances(tree);  // structural checks
  int root = tree.index_of(tree.root);
  if (root < 0) throw std::invalid_argument("tree root is not a vertex");
  const int m = static_cast<int>(tree.vertices.size());
  std::vector<int> degree(m, 0);
  for (const auto& e : tree.edges) {
    degree[static_cast<int>(e[0])]++;
    degree[static_cast<int>(e[1])]++;
  }
  std::vector<std::string> out;
  out.push_back(tree.vertices[root]);
  for (int v = 0; v < m; ++v)
    if (v != root && degree[v] <= 1) out.push_back(tree.vertices[v]);
  return out;
}

bool SubsetSelection::contains(int idx) const {
  return std::binary_search(members.begin(), members.end(), idx);
}

SubsetSelection make_subset(SpacePtr parent, std::vector<int> members) {
  if (!parent) throw std::invalid_argument("subset needs a parent space");
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  for (int idx : members)
    if (idx < 0 || idx >= parent->size())
      throw std::invalid_argument("subset member outside parent point set");
  SubsetSelection sel{std::move(parent), std::move(members)};
  if (!sel.contains(sel.parent->base))
    throw std::invalid_argument("subset must contain the base point");
  return sel;
}

QuasiMetricSpace restrict_space(const QuasiMetricSpace& parent,
                                const std::vector<int>& members) {
  QuasiMetricSpace out;
  out.p = parent.p;
  const int k = static_cast<int>(members.size());
  out.dist.resize(k, k);
  out.base = -1;
  for (int a = 0; a < k; ++a) {
    out.names.push_back(parent.names[members[a]]);
    if (members[a] == parent.base) out.base = a;
    for (int b = 0; b < k; ++b) out.dist(a, b) = parent.dist(members[a], members[b]);
  }
  if (out.base < 0)
    throw std::invalid_argument("restriction must contain the base point");
  return out;
}

GridWindow grid_window(int dim, double q, double t, int radius, std::size_t cap) {
  if (dim < 1) throw std::invalid_argument("grid dimension must be positive");
  if (radius < 1) throw std::invalid_argument("grid radius must be positive");
  if (!(t > 0.0)) throw std::invalid_argument("grid scale must be positive");
  if (!(q > 0.0 && q <= 1.0)) throw std::invalid_argument("grid exponent must lie in (0, 1]");
  const int side = 2 * radius + 1;
  double count = 1.0;
  for (int j = 0; j < dim; ++j) count *= side;
  if (static_cast<double>(dim) * count > static_cast<double>(cap))
    throw std::invalid_argument("grid window exceeds the configured size cap");

  GridWindow window;
  window.dim = dim;
  window.radius = radius;
  window.t = t;
  window.q = q;

  const int n = static_cast<int>(count);
  std::vector<Eigen::VectorXi> coords;
  coords.reserve(n);
  Eigen::VectorXi w = Eigen::VectorXi::Constant(dim, -radius);
  for (int it = 0; it < n; ++it) {
    coords.push_back(w);
    for (int j = 0; j < dim; ++j) {
      if (w[j] < radius) {
        w[j]++;
        break;
      }
      w[j] = -radius;
    }
  }

  auto space = std::make_shared<QuasiMetricSpace>();
  space->p = q;
  space->base = -1;
  space->dist.resize(n, n);
  for (int i = 0; i < n; ++i) {
    std::ostringstream name;
    name << "(";
    for (int j = 0; j < dim; ++j) name << (j ? "," : "") << coords[i][j];
    name << ")";
    space->names.push_back(name.str());
    if (coords[i].isZero()) space->base = i;
    for (int j2 = 0; j2 < n; ++j2) {
      int linf = (coords[i] - coords[j2]).cwiseAbs().maxCoeff();
      space->dist(i, j2) = i == j2 ? 0.0 : std::pow(t * linf, 1.0 / q);
    }
  }
  window.space = space;
  window.coords = std::move(coords);
  return window;
}

QuasiMetricSpace grid_space(int dim, double q, double t, int radius, std::size_t cap) {
  return *grid_window(dim, q, t, radius, cap).space;
}

int GridWindow::index_of(const Eigen::VectorXi& w) const {
  if (w.size() != dim || w.cwiseAbs().maxCoeff() > radius) return -1;
  // Row-major over the enumeration order used in grid_window (first axis fastest).
  int idx = 0;
  int stride = 1;
  for (int j = 0; j < dim; ++j) {
    idx += (w[j] + radius) * stride;
    stride *= 2 * radius + 1;
  }
  return idx;
}

QuasiMetricSpace sup_metric_space(const std::vector<Eigen::VectorXd>& points,
                                  double q, int base_index) {
  const int n = static_cast<int>(points.size());
  if (n == 0) throw std::invalid_argument("empty point set");
  if (base_index < 0 || base_index >= n)
    throw std::invalid_argument("base index out of range");
  QuasiMetricSpace out;
  out.p = q;
  out.base = base_index;
  out.dist.resize(n, n);
  for (int i = 0; i < n; ++i) {
    std::ostringstream name;
    name << "(";
    for (int j = 0; j < points[i].size(); ++j) name << (j ? "," : "") << points[i][j];
    name << ")";
    out.names.push_back(name.str());
    for (int j = 0; j < n; ++j) {
      double linf = (points[i] - points[j]).cwiseAbs().maxCoeff();
      out.dist(i, j) = i == j ? 0.0 : std::pow(linf, 1.0 / q);
    }
  }
  return out;
}

}  // namespace freep
