#include "freep/extend.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace freep {

namespace {
constexpr double kBreakTol = 1e-12;
constexpr double kRelTol = 1e-9;
}  // namespace

double ValueSpace::norm(const Eigen::VectorXd& v) const {
  if (v.size() != dim) throw std::invalid_argument("mismatched value dimension");
  if (dim == 1) return std::abs(v[0]);
  double acc = 0.0;
  for (int i = 0; i < dim; ++i) acc += std::pow(std::abs(v[i]), p);
  return std::pow(acc, 1.0 / p);
}

bool StepFunction::valid() const {
  if (breaks.size() < 2 || values.size() + 1 != breaks.size()) return false;
  if (breaks.front() != 0.0 || breaks.back() != 1.0) return false;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
    if (!(breaks[i] < breaks[i + 1])) return false;
  return true;
}

StepFunction constant_step(const Eigen::VectorXd& value) {
  return StepFunction{{0.0, 1.0}, {value}};
}

double step_norm(const StepFunction& f, double p, const ValueSpace& vs) {
  double acc = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i)
    acc += (f.breaks[i + 1] - f.breaks[i]) * std::pow(vs.norm(f.values[i]), p);
  return std::pow(acc, 1.0 / p);
}

StepFunction step_combine(double a, const StepFunction& f, double b,
                          const StepFunction& g) {
  if (!f.valid() || !g.valid())
    throw std::invalid_argument("malformed step function");
  if (f.values.front().size() != g.values.front().size())
    throw std::invalid_argument("mismatched value dimension");

  std::vector<double> merged;
  merged.reserve(f.breaks.size() + g.breaks.size());
  merged.insert(merged.end(), f.breaks.begin(), f.breaks.end());
  merged.insert(merged.end(), g.breaks.begin(), g.breaks.end());
  std::sort(merged.begin(), merged.end());

  StepFunction out;
  out.breaks.push_back(0.0);
  for (double t : merged)
    if (t > out.breaks.back() + kBreakTol) out.breaks.push_back(t);
  out.breaks.back() = 1.0;  // both inputs end at 1, so the snap is within tol

  auto value_at = [](const StepFunction& h, double t) {
    std::size_t i = std::upper_bound(h.breaks.begin(), h.breaks.end(), t) -
                    h.breaks.begin();
    i = std::min(i == 0 ? std::size_t{0} : i - 1, h.values.size() - 1);
    return h.values[i];
  };
  for (std::size_t k = 0; k + 1 < out.breaks.size(); ++k) {
    double mid = 0.5 * (out.breaks[k] + out.breaks[k + 1]);
    out.values.push_back(a * value_at(f, mid) + b * value_at(g, mid));
  }
  return out;
}

StepFunction step_sub(const StepFunction& f, const StepFunction& g) {
  return step_combine(1.0, f, -1.0, g);
}

int IntervalAssignment::v_position(int point) const {
  for (std::size_t i = 0; i < v_points.size(); ++i)
    if (v_points[i] == point) return static_cast<int>(i);
  return -1;
}

IntervalAssignment interval_assignment(const PartitionOfUnity& pou) {
  IntervalAssignment out;
  out.v_points = pou.v_points;
  const int nv = static_cast<int>(pou.v_points.size());
  const int nsets = static_cast<int>(pou.sets.size());
  out.intervals.resize(nv);
  for (int c = 0; c < nv; ++c) {
    double cum = 0.0;
    for (int u = 0; u < nsets; ++u) {
      double w = pou.phi(u, c);
      if (w <= 0.0) continue;
      out.intervals[c].push_back({static_cast<double>(u), cum, cum + w});
      cum += w;
    }
    if (std::abs(cum - 1.0) > kBreakTol)
      throw std::runtime_error("interval assignment does not exhaust [0,1)");
    out.intervals[c].back()[2] = 1.0;
  }
  return out;
}

double lipschitz_constant(const BoundaryMap& f, const QuasiMetricSpace& space,
                          const std::vector<int>& N, const ValueSpace& vs) {
  double worst = 0.0;
  for (std::size_t a = 0; a < N.size(); ++a)
    for (std::size_t b = a + 1; b < N.size(); ++b) {
      double num = vs.norm(f[N[a]] - f[N[b]]);
      worst = std::max(worst, num / space.d(N[a], N[b]));
    }
  return worst;
}

Extension extend(const BoundaryMap& f, const PartitionOfUnity& pou,
                 const IntervalAssignment& assignment,
                 const QuasiMetricSpace& space, const std::vector<int>& N,
                 const ValueSpace& vs) {
  std::vector<bool> in_n(space.size(), false);
  for (int x : N) in_n[x] = true;
  for (int anchor : pou.anchors)
    if (!in_n[anchor]) throw std::invalid_argument("anchor outside N");
  for (int x : N) {
    if (static_cast<int>(f.size()) <= x || f[x].size() != vs.dim)
      throw std::invalid_argument("boundary data missing on N");
  }
  if (vs.norm(f[space.base]) != 0.0)
    throw std::invalid_argument("boundary data must vanish at the base point");

  Extension ext;
  ext.value_space = vs;
  ext.at.resize(space.size());
  for (int x : N) ext.at[x] = constant_step(f[x]);
  for (std::size_t c = 0; c < assignment.v_points.size(); ++c) {
    StepFunction step;
    step.breaks.push_back(0.0);
    for (const auto& iv : assignment.intervals[c]) {
      int u = static_cast<int>(iv[0]);
      step.values.push_back(f[pou.anchors[u]]);
      step.breaks.push_back(iv[2]);
    }
    ext.at[assignment.v_points[c]] = std::move(step);
  }
  return ext;
}

double measured_lip(const Extension& ext, const QuasiMetricSpace& space, double p) {
  double worst = 0.0;
  for (int x = 0; x < space.size(); ++x)
    for (int y = x + 1; y < space.size(); ++y) {
      double num = step_norm(step_sub(ext.at[x], ext.at[y]), p, ext.value_space);
      worst = std::max(worst, num / space.d(x, y));
    }
  return worst;
}

CaseBounds check_case_bounds(const Extension& ext, const QuasiMetricSpace& space,
                             const std::vector<int>& N,
                             const PartitionOfUnity& pou, double lip_f, double p) {
  CaseBounds out;
  const double nu = pou.nu;
  const double mu = pou.mu_const;
  const double gamma = pou.params.gamma;
  const double alpha = pou.params.alpha;
  const double kappa = pou.params.kappa;
  out.c1 = 1.0 + nu;
  out.c2 = (1.0 + nu) * (1.0 + 2.0 * gamma);
  out.c3 = 4.0 * nu * mu * (1.0 + alpha) * (1.0 + 1.0 / alpha) * kappa;

  std::vector<bool> in_n(space.size(), false);
  for (int x : N) in_n[x] = true;

  for (int x = 0; x < space.size(); ++x)
    for (int y = x + 1; y < space.size(); ++y) {
      double num = step_norm(step_sub(ext.at[x], ext.at[y]), p, ext.value_space);
      double constant;
      double* slot;
      std::array<int, 2>* pair;
      if (in_n[x] && in_n[y]) {
        constant = 1.0;
        slot = &out.worst_within_n;
        pair = &out.within_n_pair;
      } else if (in_n[x] || in_n[y]) {
        constant = out.c1;
        slot = &out.worst_boundary;
        pair = &out.boundary_pair;
      } else {
        int cx = pou.v_position(x), cy = pou.v_position(y);
        bool shared = false;
        for (int u = 0; u < pou.phi.rows() && !shared; ++u)
          if (pou.phi(u, cx) > 0.0 && pou.phi(u, cy) > 0.0) shared = true;
        constant = shared ? out.c3 : out.c2;
        slot = shared ? &out.worst_shared : &out.worst_disjoint;
        pair = shared ? &out.shared_pair : &out.disjoint_pair;
      }
      double denom = std::pow(constant, 1.0 / p) * lip_f * space.d(x, y);
      double ratio = denom == 0.0 ? (num == 0.0 ? 0.0 : HUGE_VAL) : num / denom;
      if (ratio > *slot) *pair = {x, y};
      *slot = std::max(*slot, ratio);
    }

  out.ok = out.worst_within_n <= 1.0 + kRelTol &&
           out.worst_boundary <= 1.0 + kRelTol &&
           out.worst_disjoint <= 1.0 + kRelTol && out.worst_shared <= 1.0 + kRelTol;
  return out;
}

}  // namespace freep
