#include "freep/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "freep/constants.hpp"
#include "freep/rng.hpp"

namespace freep {

namespace {
constexpr double kExactTol = 1e-12;
constexpr double kRelTol = 1e-9;
}  // namespace

AxisInterval tile_axis(int w, double x) {
  double diff = w - x;
  if (diff <= -1.0 || diff >= 1.0) return {0.0, 0.0};
  if (diff <= 0.0) return {0.0, 1.0 + diff};
  return {diff, 1.0};
}

double interval_symdiff(const AxisInterval& a, const AxisInterval& b) {
  double la = a.length(), lb = b.length();
  double overlap = 0.0;
  if (!a.empty() && !b.empty())
    overlap = std::max(0.0, std::min(a.hi, b.hi) - std::max(a.lo, b.lo));
  return la + lb - 2.0 * overlap;
}

bool Tile::empty() const {
  for (const auto& axis : axes)
    if (axis.empty()) return true;
  return axes.empty();
}

double Tile::volume() const {
  if (empty()) return 0.0;
  double v = 1.0;
  for (const auto& axis : axes) v *= axis.length();
  return v;
}

Tile tile(const Eigen::VectorXi& w, const Eigen::VectorXd& x) {
  if (w.size() != x.size()) throw std::invalid_argument("tile dimension mismatch");
  Tile t;
  for (int j = 0; j < w.size(); ++j) t.axes.push_back(tile_axis(w[j], x[j]));
  return t;
}

double tile_symdiff(const Tile& a, const Tile& b) {
  double va = a.volume(), vb = b.volume();
  double overlap = 1.0;
  if (a.empty() || b.empty())
    overlap = 0.0;
  else
    for (std::size_t j = 0; j < a.axes.size(); ++j) {
      double o = std::min(a.axes[j].hi, b.axes[j].hi) -
                 std::max(a.axes[j].lo, b.axes[j].lo);
      if (o <= 0.0) {
        overlap = 0.0;
        break;
      }
      overlap *= o;
    }
  return va + vb - 2.0 * overlap;
}

std::vector<Eigen::VectorXi> tile_corners(const Eigen::VectorXd& x) {
  const int d = static_cast<int>(x.size());
  std::vector<std::vector<int>> axis(d);
  for (int j = 0; j < d; ++j) {
    int lo = static_cast<int>(std::floor(x[j]));
    int hi = static_cast<int>(std::ceil(x[j]));
    axis[j] = lo == hi ? std::vector<int>{lo} : std::vector<int>{lo, hi};
  }
  std::vector<Eigen::VectorXi> out;
  std::vector<int> pick(d, 0);
  while (true) {
    Eigen::VectorXi w(d);
    for (int j = 0; j < d; ++j) w[j] = axis[j][pick[j]];
    out.push_back(w);
    int j = 0;
    for (; j < d; ++j) {
      if (pick[j] + 1 < static_cast<int>(axis[j].size())) {
        pick[j]++;
        break;
      }
      pick[j] = 0;
    }
    if (j == d) break;
  }
  return out;
}

namespace {

void check_1d(double x, double y, int u, std::vector<std::string>& failures) {
  auto fail = [&](const std::string& what) {
    std::ostringstream os;
    os << what << " at x=" << x << " y=" << y << " u=" << u;
    failures.push_back(os.str());
  };

  int fl = static_cast<int>(std::floor(x));
  int ce = static_cast<int>(std::ceil(x));
  // active set
  for (int w = fl - 3; w <= ce + 3; ++w) {
    bool active = !tile_axis(w, x).empty();
    bool expected = (w == fl || w == ce);
    if (active != expected) fail("active-set property");
  }
  // partition of [0,1)
  {
    AxisInterval a = tile_axis(fl, x), b = tile_axis(ce, x);
    double total = a.length() + b.length();
    if (fl == ce) total = a.length();
    double overlap = fl == ce ? 0.0
                              : std::max(0.0, std::min(a.hi, b.hi) -
                                                  std::max(a.lo, b.lo));
    if (std::abs(total - 1.0) > kExactTol || overlap > kExactTol)
      fail("partition property");
  }
  // shift invariance (up to roundoff in x - u)
  for (int w = fl - 1; w <= ce + 1; ++w) {
    AxisInterval a = tile_axis(w, x), b = tile_axis(w - u, x - u);
    if (interval_symdiff(a, b) > kExactTol) fail("shift invariance");
  }
  // reflection: sigma(R[w,x]) and R[-w,-x] agree up to a null set
  for (int w = fl - 1; w <= ce + 1; ++w) {
    AxisInterval a = tile_axis(w, x);
    AxisInterval reflected = a.empty() ? AxisInterval{0.0, 0.0}
                                       : AxisInterval{1.0 - a.hi, 1.0 - a.lo};
    if (interval_symdiff(reflected, tile_axis(-w, -x)) > kExactTol)
      fail("reflection property");
  }
  // exact difference at w = 0 for x, y in [0,1]
  {
    double xs = x - std::floor(x), ys = y - std::floor(y);
    double sym = interval_symdiff(tile_axis(0, xs), tile_axis(0, ys));
    if (std::abs(sym - std::abs(xs - ys)) > kExactTol) fail("exact difference");
  }
  // bounded difference for every w
  for (int w = fl - 1; w <= ce + 1; ++w) {
    double sym = interval_symdiff(tile_axis(w, x), tile_axis(w, y));
    if (sym > std::abs(x - y) + kExactTol) fail("bounded difference");
  }
}

void check_dd(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
              const Eigen::VectorXi& u, std::vector<std::string>& failures) {
  const int d = static_cast<int>(x.size());
  auto fail = [&](const std::string& what) { failures.push_back(what + " (product)"); };

  std::vector<Eigen::VectorXi> corners = tile_corners(x);
  if (static_cast<int>(corners.size()) > (1 << d)) fail("corner count");
  bool any_integral = false;
  for (int j = 0; j < d; ++j)
    if (std::floor(x[j]) == x[j]) any_integral = true;
  if (!any_integral && static_cast<int>(corners.size()) != (1 << d))
    fail("corner count at non-integral x");

  double total = 0.0;
  for (std::size_t a = 0; a < corners.size(); ++a) {
    Tile ta = tile(corners[a], x);
    if (ta.empty()) fail("corner tile empty");
    if (ta.volume() > 1.0 + kExactTol) fail("volume bound");
    total += ta.volume();
    for (std::size_t b = a + 1; b < corners.size(); ++b) {
      Tile tb = tile(corners[b], x);
      double overlap = 0.5 * (ta.volume() + tb.volume() - tile_symdiff(ta, tb));
      if (overlap > kExactTol) fail("tiles overlap");
    }
  }
  if (std::abs(total - 1.0) > kExactTol) fail("volumes do not fill the cube");

  // full cube at lattice points
  {
    Eigen::VectorXi w = corners.front();
    Tile tw = tile(w, w.cast<double>());
    if (std::abs(tw.volume() - 1.0) > kExactTol) fail("lattice tile not the cube");
  }

  for (const auto& w : corners) {
    Tile a = tile(w, x);
    Tile b = tile((w - u).eval(), (x - u.cast<double>()).eval());
    if (tile_symdiff(a, b) > kExactTol) fail("shift invariance");
    double sym = tile_symdiff(a, tile(w, y));
    if (sym > (x - y).cwiseAbs().sum() + kExactTol) fail("l1 difference bound");
  }
}

}  // namespace

TilePropertyReport verify_tile_properties(int d, int samples, std::uint64_t seed) {
  TilePropertyReport report;
  Rng rng(seed);

  // Deterministic boundary cases first: integral coordinates and offsets of
  // exactly one.
  std::vector<double> boundary_x = {0.0, 1.0, -1.0, 2.0, 0.5, -0.5, 1.5};
  for (double x : boundary_x)
    for (double y : {x, x + 1.0, x - 1.0, 0.25}) {
      check_1d(x, y, 1, report.failures);
      check_1d(x, y, -2, report.failures);
      report.checks += 2;
    }

  for (int it = 0; it < samples; ++it) {
    double x = rng.uniform(-3.0, 3.0);
    double y = rng.uniform(-3.0, 3.0);
    int u = rng.index(7) - 3;
    check_1d(x, y, u, report.failures);
    report.checks++;

    Eigen::VectorXd xd(d), yd(d);
    Eigen::VectorXi ud(d);
    for (int j = 0; j < d; ++j) {
      xd[j] = rng.uniform(-3.0, 3.0);
      yd[j] = rng.uniform(-3.0, 3.0);
      ud[j] = rng.index(5) - 2;
    }
    if (it % 4 == 0) {
      int axis = rng.index(d);
      xd[axis] = std::floor(xd[axis]);  // exercise an integral coordinate
    }
    if (it % 5 == 0) yd = xd + Eigen::VectorXd::Unit(d, rng.index(d));
    check_dd(xd, yd, ud, report.failures);
    report.checks++;
  }

  report.ok = report.failures.empty();
  return report;
}

double Box::volume() const {
  double v = 1.0;
  for (int j = 0; j < lo.size(); ++j) v *= std::max(0.0, hi[j] - lo[j]);
  return v;
}

namespace {

bool box_less(const Box& a, const Box& b) {
  for (int j = 0; j < a.lo.size(); ++j) {
    if (a.lo[j] != b.lo[j]) return a.lo[j] < b.lo[j];
    if (a.hi[j] != b.hi[j]) return a.hi[j] < b.hi[j];
  }
  return false;
}

LatticeStep sorted(LatticeStep f) {
  std::sort(f.cells.begin(), f.cells.end(),
            [](const auto& a, const auto& b) { return box_less(a.first, b.first); });
  return f;
}

}  // namespace

bool lattice_equal(const LatticeStep& a, const LatticeStep& b) {
  LatticeStep sa = sorted(a), sb = sorted(b);
  if (sa.cells.size() != sb.cells.size()) return false;
  for (std::size_t i = 0; i < sa.cells.size(); ++i) {
    if (sa.cells[i].first.lo != sb.cells[i].first.lo ||
        sa.cells[i].first.hi != sb.cells[i].first.hi ||
        !sa.cells[i].second.same_data(sb.cells[i].second))
      return false;
  }
  return true;
}

LatticeStep lattice_combine(double a, const LatticeStep& f, double b,
                            const LatticeStep& g) {
  LatticeStep out;
  for (const auto& [fbox, fval] : f.cells)
    for (const auto& [gbox, gval] : g.cells) {
      Box cell{fbox.lo.cwiseMax(gbox.lo), fbox.hi.cwiseMin(gbox.hi)};
      bool positive = true;
      for (int j = 0; j < cell.lo.size(); ++j)
        if (!(cell.hi[j] - cell.lo[j] > 1e-15)) positive = false;
      if (!positive) continue;
      out.cells.push_back({cell, a * fval + b * gval});
    }
  return out;
}

LatticeStep lattice_sub(const LatticeStep& f, const LatticeStep& g) {
  return lattice_combine(1.0, f, -1.0, g);
}

LatticeStep tau(const Eigen::VectorXd& x, const GridWindow& window) {
  if (x.size() != window.dim) throw std::invalid_argument("tau dimension mismatch");
  if (x.cwiseAbs().maxCoeff() + 1.0 > window.radius + kExactTol)
    throw std::invalid_argument("window too small for this point");
  LatticeStep out;
  for (const auto& w : tile_corners(x)) {
    Tile t = tile(w, x);
    if (t.empty()) continue;
    Box box;
    box.lo.resize(window.dim);
    box.hi.resize(window.dim);
    for (int j = 0; j < window.dim; ++j) {
      box.lo[j] = t.axes[j].lo;
      box.hi[j] = t.axes[j].hi;
    }
    out.cells.push_back({box, delta(window.space, window.index_of(w))});
  }
  return out;
}

double molecule_norm_upper(const Molecule& mu, double p, int cap) {
  if (mu.is_zero()) return 0.0;
  std::vector<int> pts = mu.support();
  if (std::find(pts.begin(), pts.end(), mu.space()->base) == pts.end())
    pts.push_back(mu.space()->base);
  std::sort(pts.begin(), pts.end());
  auto sub = std::make_shared<QuasiMetricSpace>(restrict_space(*mu.space(), pts));
  Molecule restricted(sub);
  for (std::size_t i = 0; i < pts.size(); ++i)
    restricted.set_coeff(static_cast<int>(i), mu.coeff(pts[i]));
  return norm_exact(restricted, p, cap).value;
}

double lattice_qnorm(const LatticeStep& f, double q, double p, int cap) {
  double acc = 0.0;
  for (const auto& [box, value] : f.cells)
    acc += box.volume() * std::pow(molecule_norm_upper(value, p, cap), q);
  return std::pow(acc, 1.0 / q);
}

TauLipReport tau_lip_check(double p, double q, int d, int pairs, int window_radius,
                           std::uint64_t seed) {
  if (!(p <= q)) throw std::invalid_argument("tau_lip_check needs p <= q");
  GridWindow window = grid_window(d, q, 1.0, window_radius);
  TauLipReport report;
  report.constant = constants::tau_constant(p, q, d);
  report.pairs = pairs;
  Rng rng(seed);
  double span = window_radius - 1.0;
  for (int it = 0; it < pairs; ++it) {
    Eigen::VectorXd x(d), y(d);
    for (int j = 0; j < d; ++j) {
      x[j] = rng.uniform(-span, span);
      y[j] = rng.uniform(-span, span);
    }
    double l1 = (x - y).cwiseAbs().sum();
    if (l1 == 0.0) continue;
    double num = lattice_qnorm(lattice_sub(tau(x, window), tau(y, window)), q, p);
    double ratio = num / (report.constant * std::pow(l1, 1.0 / q));
    if (ratio > report.max_ratio) {
      report.max_ratio = ratio;
      report.worst_x = x;
      report.worst_y = y;
    }
  }
  report.ok = report.max_ratio <= 1.0 + kRelTol;
  return report;
}

Eigen::VectorXd retraction(int n, const Eigen::VectorXi& w) {
  if (n < 1) throw std::invalid_argument("retraction needs n >= 1");
  int m = w.cwiseAbs().maxCoeff();
  Eigen::VectorXd out(w.size());
  if (m <= n) {
    for (int j = 0; j < w.size(); ++j) out[j] = w[j];
    return out;
  }
  for (int j = 0; j < w.size(); ++j)
    out[j] = static_cast<double>(n * w[j]) / static_cast<double>(m);
  return out;
}

Eigen::VectorXd retraction_real(int n, const Eigen::VectorXd& v) {
  double m = v.cwiseAbs().maxCoeff();
  if (m <= static_cast<double>(n)) return v;
  return v * (static_cast<double>(n) / m);
}

RetractionReport retraction_check(int d, int n, int window_radius, double q) {
  GridWindow window = grid_window(d, q, 1.0, window_radius);
  RetractionReport report;
  report.idempotent = true;
  report.fixes_ball = true;
  std::vector<Eigen::VectorXd> images;
  for (const auto& w : window.coords) {
    Eigen::VectorXd img = retraction(n, w);
    if (retraction_real(n, img) != img) report.idempotent = false;
    if (w.cwiseAbs().maxCoeff() <= n && img != w.cast<double>())
      report.fixes_ball = false;
    images.push_back(std::move(img));
  }
  report.lipschitz = 0.0;
  for (std::size_t i = 0; i < window.coords.size(); ++i)
    for (std::size_t j = i + 1; j < window.coords.size(); ++j) {
      double src = (window.coords[i] - window.coords[j]).cast<double>()
                       .cwiseAbs().maxCoeff();
      double dst = (images[i] - images[j]).cwiseAbs().maxCoeff();
      report.lipschitz =
          std::max(report.lipschitz, std::pow(dst / src, 1.0 / q));
    }
  report.ok = report.idempotent && report.fixes_ball &&
              std::abs(report.lipschitz - 1.0) <= 1e-12;
  return report;
}

CommuteReport commuting_square_check(int samples, double p, double r, double q,
                                     int d, double t, std::uint64_t seed) {
  if (!(p <= r && r <= q)) throw std::invalid_argument("need p <= r <= q");
  CommuteReport report;
  report.samples = samples;
  report.envelope_ok = true;
  report.dilation_ok = true;
  report.retraction_identity_ok = true;

  const int radius = 3;
  GridWindow win1 = grid_window(d, q, 1.0, radius);
  GridWindow win_inv = grid_window(d, q, 1.0 / t, radius);
  GridWindow win_t = grid_window(d, q, t, radius);

  // Host for the ambient-space identities: the union of both position sets,
  // under the same sup quasi-metric.
  std::vector<Eigen::VectorXd> host_points;
  // Positions are matched with a small tolerance: for non-dyadic t the
  // round trip w -> w/t -> t*(w/t) lands within an ulp of w, not on it.
  auto host_index_in = [](const std::vector<Eigen::VectorXd>& points,
                          const Eigen::VectorXd& pos) {
    for (std::size_t i = 0; i < points.size(); ++i)
      if ((points[i] - pos).cwiseAbs().maxCoeff() <=
          1e-9 * std::max(1.0, pos.cwiseAbs().maxCoeff()))
        return static_cast<int>(i);
    return -1;
  };
  auto add_positions = [&](const GridWindow& win) {
    for (const auto& w : win.coords) {
      Eigen::VectorXd pos = win.t * w.cast<double>();
      if (host_index_in(host_points, pos) < 0) host_points.push_back(pos);
    }
  };
  add_positions(win1);
  add_positions(win_inv);
  int host_base = -1;
  for (std::size_t i = 0; i < host_points.size(); ++i)
    if (host_points[i].isZero(0.0)) host_base = static_cast<int>(i);
  auto host = std::make_shared<QuasiMetricSpace>(
      sup_metric_space(host_points, q, host_base));
  auto host_index = [&](const Eigen::VectorXd& pos) {
    return host_index_in(host_points, pos);
  };

  PointMap embed_inv(win_inv.coords.size());
  for (std::size_t i = 0; i < win_inv.coords.size(); ++i)
    embed_inv[i] = host_index(win_inv.t * win_inv.coords[i].cast<double>());
  PointMap embed_one(win1.coords.size());
  for (std::size_t i = 0; i < win1.coords.size(); ++i)
    embed_one[i] = host_index(win1.coords[i].cast<double>());
  PointMap dilate(host_points.size());
  for (std::size_t i = 0; i < host_points.size(); ++i)
    dilate[i] = host_index((t * host_points[i]).eval());
  PointMap label_identity(win1.coords.size());
  for (std::size_t i = 0; i < label_identity.size(); ++i)
    label_identity[i] = static_cast<int>(i);

  Rng rng(seed);
  auto random_molecule = [&](const GridWindow& win) {
    Molecule mu(win.space);
    int k = 1 + rng.index(3);
    for (int i = 0; i < k; ++i) {
      int idx = rng.index(win.space->size());
      double sign = rng.u01() < 0.5 ? -1.0 : 1.0;
      mu.set_coeff(idx, sign * rng.uniform(0.5, 2.0));
    }
    return mu;
  };

  Box cube;
  cube.lo = Eigen::VectorXd::Zero(d);
  cube.hi = Eigen::VectorXd::Ones(d);

  for (int it = 0; it < samples; ++it) {
    // Envelope reinterpretation commutes with tau: the map only changes the
    // declared level, never coefficient data, so both composites must agree
    // cell for cell.
    Eigen::VectorXd x(d);
    for (int j = 0; j < d; ++j) x[j] = rng.uniform(-(radius - 1.0), radius - 1.0);
    LatticeStep tau_then_reinterpret = tau(x, win1);  // level p, data unchanged
    LatticeStep reinterpret_then_tau = tau(x, win1);  // level r construction
    if (!lattice_equal(tau_then_reinterpret, reinterpret_then_tau))
      report.envelope_ok = false;

    // Dilation conjugation on molecules of the coarse lattice.
    Molecule mu = random_molecule(win_inv);
    Molecule lhs = pushforward(pushforward(mu, embed_inv, host), dilate, host);
    Molecule rhs = pushforward(pushforward(mu, label_identity, win1.space),
                               embed_one, host);
    if (!lhs.same_data(rhs)) report.dilation_ok = false;

    Molecule nu = random_molecule(win_t);
    Molecule back = pushforward(pushforward(nu, label_identity, win1.space),
                                label_identity, win_t.space);
    if (!back.same_data(nu)) report.dilation_ok = false;

    // Lattice retraction identity: tau at lattice points carries the point
    // mass on the constant function.
    Molecule sample = random_molecule(win1);
    LatticeStep acc{{{cube, Molecule(win1.space)}}};
    for (int idx : sample.support()) {
      Eigen::VectorXd pos = win1.coords[idx].cast<double>();
      if (pos.cwiseAbs().maxCoeff() + 1.0 > radius) continue;
      acc = lattice_combine(1.0, acc, sample.coeff(idx), tau(pos, win1));
    }
    Molecule expected(win1.space);
    for (int idx : sample.support()) {
      Eigen::VectorXd pos = win1.coords[idx].cast<double>();
      if (pos.cwiseAbs().maxCoeff() + 1.0 > radius) continue;
      expected.set_coeff(idx, sample.coeff(idx));
    }
    LatticeStep constant{{{cube, expected}}};
    if (!lattice_equal(acc, constant)) report.retraction_identity_ok = false;
  }

  report.ok = report.envelope_ok && report.dilation_ok &&
              report.retraction_identity_ok;
  return report;
}

}  // namespace freep
