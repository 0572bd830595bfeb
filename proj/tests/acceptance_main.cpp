// Acceptance suite: every quantitative guarantee of the library is exercised
// end to end, one pass/fail line per criterion. Exit status is nonzero when
// any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "freep/campaign.hpp"
#include "freep/constants.hpp"
#include "freep/extend.hpp"
#include "freep/free_norm.hpp"
#include "freep/grid.hpp"
#include "freep/json_io.hpp"
#include "freep/parallel.hpp"
#include "freep/rng.hpp"
#include "freep/whitney.hpp"

using namespace freep;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  std::function<Outcome()> run;
};

QuasiMetricSpace random_line(int m, Rng& rng) {
  std::vector<double> coords{0.0};
  double x = 0.0;
  for (int i = 1; i < m; ++i) {
    x += rng.uniform(0.5, 2.0);
    coords.push_back(x);
  }
  QuasiMetricSpace space;
  space.base = 0;
  space.p = 1.0;
  space.dist.resize(m, m);
  for (int i = 0; i < m; ++i) {
    space.names.push_back(std::to_string(i));
    for (int j = 0; j < m; ++j) space.dist(i, j) = std::abs(coords[i] - coords[j]);
  }
  return space;
}

struct WhitneyInstance {
  SpacePtr space;
  std::vector<int> N;
  NagataProvider provider;
  double R;
  std::string kind;
};

// Lines, random metrics, and skeleton trees with N the leaf set, cycling
// through R in {1.5, 2, 3}.
WhitneyInstance whitney_instance(int index, std::uint64_t seed) {
  const double R_values[3] = {1.5, 2.0, 3.0};
  WhitneyInstance out;
  out.R = R_values[(index / 3) % 3];
  Rng rng = substream(seed, static_cast<std::uint64_t>(index));
  int kind = index % 3;

  if (kind == 0) {
    out.kind = "line";
    int m = 4 + rng.index(3);
    out.space = std::make_shared<QuasiMetricSpace>(random_line(m, rng));
    int extra = rng.index(m - 2);
    out.N = {0};
    for (int i = 0; i < extra; ++i) out.N.push_back(1 + rng.index(m - 2));
    std::sort(out.N.begin(), out.N.end());
    out.N.erase(std::unique(out.N.begin(), out.N.end()), out.N.end());
  } else if (kind == 1) {
    out.kind = "random-metric";
    ExperimentConfig config;
    config.seed = seed ^ 0x9e3779b9;
    config.size = 5 + index % 3;
    config.p = 0.5;
    config.q = 0.5;
    Instance inst = generate_instance(config, index);
    out.space = inst.space;
    out.N = inst.subset_members;
  } else {
    out.kind = "tree-leaves";
    ExperimentConfig config;
    config.seed = seed ^ 0x85ebca6b;
    config.family = InstanceFamily::TreeLeaves;
    config.size = 5 + index % 3;
    config.p = 0.5;
    config.q = 0.5;
    Instance inst = generate_instance(config, index);
    out.space = inst.space;
    out.N = inst.subset_members;
    out.provider = tree_nagata_provider(*inst.tree, *out.space, out.N);
    return out;
  }

  Eigen::MatrixXd rho = out.space->metricized();
  if (out.N.size() == 1) {
    out.provider = trivial_nagata_provider(rho, out.N);
  } else {
    std::vector<double> probes;
    for (auto [j, s] : whitney_scales(*out.space, out.N, out.R)) probes.push_back(s);
    out.provider = greedy_nagata_provider(rho, out.N, probes);
  }
  return out;
}

Outcome criterion_kantorovich() {
  auto start = std::chrono::steady_clock::now();
  ExperimentConfig config;
  config.suite = Suite::Norms;
  config.seed = 1001;
  double worst = 0.0;
  int tested = 0;
  for (int size : {4, 5, 6, 7}) {
    config.size = size;
    for (int i = 0; i < 50; ++i) {
      Instance inst = generate_instance(config, size * 1000 + i);
      double exact = norm_exact(inst.molecule, 1.0).value;
      double dual = dual_lower_bound(inst.molecule, 1.0);
      double rel = std::abs(exact - dual) / std::max(1.0, exact);
      worst = std::max(worst, rel);
      if (dual > exact + 1e-9) worst = std::max(worst, 1.0);
      tested++;
    }
  }
  double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  std::ostringstream os;
  os << tested << " spaces, worst relative gap " << worst << ", " << seconds
     << "s of 60 allowed";
  return {worst <= 1e-7 && seconds < 60.0, os.str()};
}

Outcome criterion_tree_premise() {
  auto start = std::chrono::steady_clock::now();
  ExperimentConfig config;
  config.size = 5;
  config.seed = 2002;
  double worst_improvement = 0.0;
  std::vector<double> improvements(100, 0.0);
  for (int i = 0; i < 100; ++i) {
    for (double p : {0.4, 0.7}) {
      config.p = p;
      config.q = p;
      Instance inst = generate_instance(config, i);
      double exact = norm_exact(inst.molecule, p).value;
      double search = norm_search(inst.molecule, p, 10000, 777 + i).value;
      improvements[i] = std::max(improvements[i], exact - search);
    }
  }
  for (double gap : improvements) worst_improvement = std::max(worst_improvement, gap);
  double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  std::ostringstream os;
  os << "100 spaces x {0.4, 0.7}, 10^4 restarts; max improvement over the tree "
        "minimum "
     << worst_improvement << ", " << seconds << "s of 300 allowed";
  return {worst_improvement <= 1e-7 && seconds < 300.0, os.str()};
}

Outcome criterion_pnorm_axioms() {
  double worst = 0.0;
  int tested = 0;
  for (int i = 0; i < 500; ++i) {
    Rng rng = substream(3003, static_cast<std::uint64_t>(i));
    ExperimentConfig config;
    config.size = 5;
    config.seed = 3003;
    double p = 0.3 + 0.7 * rng.u01();
    config.p = p;
    config.q = p;
    Instance inst = generate_instance(config, i);
    Molecule mu(inst.space), nu(inst.space);
    for (int k = 0; k < 3; ++k) {
      mu.set_coeff(rng.index(inst.space->size()), rng.uniform(-2.0, 2.0));
      nu.set_coeff(rng.index(inst.space->size()), rng.uniform(-2.0, 2.0));
    }
    double c = rng.uniform(-3.0, 3.0);
    double n_mu = norm_exact(mu, p).value;
    double n_nu = norm_exact(nu, p).value;
    double n_scaled = norm_exact(c * mu, p).value;
    double n_sum = norm_exact(mu + nu, p).value;
    worst = std::max(worst, std::abs(n_scaled - std::abs(c) * n_mu));
    worst = std::max(worst,
                     std::pow(n_sum, p) - std::pow(n_mu, p) - std::pow(n_nu, p));
    tested++;
  }
  std::ostringstream os;
  os << tested << " pairs, worst violation " << worst;
  return {worst <= 1e-9, os.str()};
}

Outcome criterion_envelope() {
  double worst = 0.0;
  bool positivity = true;
  for (int i = 0; i < 200; ++i) {
    Rng rng = substream(4004, static_cast<std::uint64_t>(i));
    double p = 0.3 + 0.4 * rng.u01();
    double q = p + (1.0 - p) * rng.u01();
    ExperimentConfig config;
    config.size = 5;
    config.seed = 4004;
    config.suite = Suite::Envelope;
    config.p = p;
    config.q = q;
    Instance inst = generate_instance(config, i);
    auto [at_p, at_q] = envelope_compare(inst.molecule, p, q);
    worst = std::max(worst, at_q.value - at_p.value);
    if (!inst.molecule.is_zero() && (at_p.value <= 0.0 || at_q.value <= 0.0))
      positivity = false;
  }
  std::ostringstream os;
  os << "200 instances, worst q-over-p excess " << worst
     << (positivity ? ", positivity holds" : ", positivity FAILS");
  return {worst <= 1e-9 && positivity, os.str()};
}

Outcome criterion_whitney() {
  int built = 0;
  bool all_ok = true;
  std::string first_failure;
  for (int i = 0; i < 50; ++i) {
    WhitneyInstance inst = whitney_instance(i, 5005);
    WhitneyCover cover = whitney_build(*inst.space, inst.N, inst.R, inst.provider);
    double R = inst.R;
    double n = inst.provider.n;
    double lambda = inst.provider.lambda;
    bool params_ok =
        cover.params.kappa == 3.0 * (n + 1) &&
        cover.params.gamma == R * R / (R - 1.0) &&
        cover.params.beta == 2.0 * (R * R + R - 1.0) * (lambda + 1.0) &&
        cover.params.alpha == R * R + R - 1.0;
    WhitneyReport report = verify_whitney(*inst.space, inst.N, cover);
    bool ok = params_ok && report.ok && report.claim_a_ok && report.claim_b_ok;
    if (!ok && first_failure.empty()) {
      std::ostringstream os;
      os << inst.kind << " instance " << i << ": " << report.violated
         << (params_ok ? "" : " (parameter mismatch)");
      first_failure = os.str();
    }
    all_ok = all_ok && ok;
    built++;
  }
  std::ostringstream os;
  os << built << " covers built and verified";
  if (!first_failure.empty()) os << "; first failure: " << first_failure;
  return {all_ok, os.str()};
}

Outcome criterion_pou() {
  bool all_ok = true;
  double max_b1 = 0.0;
  bool planted_kappa_fails = true;
  bool planted_nu_fails = true;
  for (int i = 0; i < 50; ++i) {
    WhitneyInstance inst = whitney_instance(i, 5005);
    WhitneyCover cover = whitney_build(*inst.space, inst.N, inst.R, inst.provider);
    double nu = (2.0 + cover.params.beta) * 1.2;
    PartitionOfUnity pou = partition_of_unity(*inst.space, inst.N, cover, nu);
    PouReport report = verify_pou(pou, *inst.space, inst.N);
    all_ok = all_ok && report.ok;
    max_b1 = std::max(max_b1, report.worst_b1_ratio);

    // Planted violations: an understated multiplicity always trips B.4, and
    // shrinking nu below the measured anchor ratio trips B.2.
    PartitionOfUnity squeezed = pou;
    squeezed.params.kappa = report.max_support_count - 1;
    if (verify_pou(squeezed, *inst.space, inst.N).b4_ok) planted_kappa_fails = false;
    if (report.worst_b2_ratio > 0.0) {
      PartitionOfUnity shrunk = pou;
      shrunk.nu = nu * report.worst_b2_ratio * 0.5;
      if (verify_pou(shrunk, *inst.space, inst.N).b2_ok) planted_nu_fails = false;
    }
  }

  // Constructed instances carry over an order of magnitude of slack in the
  // sum bound, so the mu/10 plant is exercised on a dedicated fixture whose
  // honest ratio is 0.8: two overlapping sets over a close pair in V.
  QuasiMetricSpace tight;
  tight.names = {"0", "a", "b"};
  tight.base = 0;
  tight.p = 1.0;
  tight.dist.resize(3, 3);
  tight.dist << 0.0, 1.0, 1.1, 1.0, 0.0, 0.1, 1.1, 0.1, 0.0;
  std::vector<int> Nt{0};
  PartitionOfUnity fixture;
  fixture.v_points = {1, 2};
  fixture.sets = {{0, 0, {1, 2}}, {0, 1, {2}}};
  fixture.phi.resize(2, 2);
  fixture.phi << 1.0, 0.6, 0.0, 0.4;
  fixture.anchors = {0, 0};
  fixture.params = {2.0, 1.0, 0.2, 1.2};
  fixture.nu = 3.0;
  fixture.q_psi = std::log(4.0);
  fixture.mu_const = constants::mu_const(2.0, 1.0);
  bool fixture_honest = verify_pou(fixture, tight, Nt).ok;
  PartitionOfUnity planted = fixture;
  planted.mu_const /= 10.0;
  bool planted_b1_fails = !verify_pou(planted, tight, Nt).b1_ok;

  std::ostringstream os;
  os << "50 partitions verified, worst B1 ratio " << max_b1
     << "; planted kappa/nu fixtures "
     << (planted_kappa_fails && planted_nu_fails ? "fail" : "DO NOT fail")
     << "; mu/10 plant on the tight fixture "
     << (planted_b1_fails ? "fails" : "DOES NOT fail");
  return {all_ok && planted_kappa_fails && planted_nu_fails && fixture_honest &&
              planted_b1_fails,
          os.str()};
}

Outcome criterion_extension() {
  bool all_ok = true;
  double worst_margin = std::numeric_limits<double>::infinity();
  std::string failure;
  for (int i = 0; i < 20; ++i) {
    WhitneyInstance inst = whitney_instance(i, 6006);
    WhitneyCover cover = whitney_build(*inst.space, inst.N, inst.R, inst.provider);
    double nu = (2.0 + cover.params.beta) * 1.2;
    PartitionOfUnity pou = partition_of_unity(*inst.space, inst.N, cover, nu);
    IntervalAssignment assignment = interval_assignment(pou);
    double bound = bound_D(inst.space->p, cover.params.kappa, cover.params.gamma,
                           cover.params.beta, cover.params.alpha);
    for (int trial = 0; trial < 5; ++trial) {
      Rng rng = substream(6006 + i, static_cast<std::uint64_t>(trial));
      ValueSpace vs{trial % 2 == 0 ? 1 : 3, inst.space->p};
      BoundaryMap f(inst.space->size());
      for (int x : inst.N) {
        Eigen::VectorXd v(vs.dim);
        for (int j = 0; j < vs.dim; ++j) v[j] = rng.uniform(-1.0, 1.0);
        f[x] = v;
      }
      for (int x : inst.N) f[x] -= f[inst.space->base];
      double lip = lipschitz_constant(f, *inst.space, inst.N, vs);
      if (lip > 0.0)
        for (int x : inst.N) f[x] /= lip;
      lip = lipschitz_constant(f, *inst.space, inst.N, vs);

      Extension ext = extend(f, pou, assignment, *inst.space, inst.N, vs);
      double measured = measured_lip(ext, *inst.space, inst.space->p);
      worst_margin = std::min(worst_margin, bound - measured);

      bool restriction_exact = true;
      for (int x : inst.N)
        if (ext.at[x].breaks != std::vector<double>{0.0, 1.0} ||
            ext.at[x].values[0] != f[x])
          restriction_exact = false;
      CaseBounds cases =
          check_case_bounds(ext, *inst.space, inst.N, pou, lip, inst.space->p);
      bool ok = measured <= bound && restriction_exact && cases.ok;
      if (!ok && failure.empty()) {
        std::ostringstream os;
        os << inst.kind << " instance " << i << " trial " << trial
           << (restriction_exact ? "" : " restriction broken")
           << (cases.ok ? "" : " case bound broken");
        failure = os.str();
      }
      all_ok = all_ok && ok;
    }
  }
  std::ostringstream os;
  os << "20 instances x 5 maps, smallest bound margin " << worst_margin;
  if (!failure.empty()) os << "; first failure: " << failure;
  return {all_ok, os.str()};
}

Outcome criterion_distortion() {
  bool all_ok = true;
  double worst_metric_gap = 0.0;
  double worst_ratio = 0.0;
  // p = 1: the canonical map is an isometry.
  for (int i = 0; i < 50; ++i) {
    ExperimentConfig config;
    config.suite = Suite::Distortion;
    config.size = 6;
    config.seed = 7007;
    config.p = 1.0;
    config.q = 1.0;
    if (i % 2 == 1) config.family = InstanceFamily::TreeLeaves;
    Instance inst = generate_instance(config, i);
    SubsetSelection subset = make_subset(inst.space, inst.subset_members);
    DistortionReport report = distortion(subset, inst.molecule, 1.0);
    worst_metric_gap = std::max(worst_metric_gap, std::abs(report.ratio - 1.0));
    all_ok = all_ok && std::abs(report.ratio - 1.0) <= 1e-7;
  }
  // p < 1: ratios live in [1 - 1e-9, A^(1/p)] with the primitive constant.
  for (double p : {0.4, 0.7}) {
    double bound = std::pow(constants::A_primitive(), 1.0 / p);
    for (int i = 0; i < 50; ++i) {
      ExperimentConfig config;
      config.suite = Suite::Distortion;
      config.size = 6;
      config.seed = 7117;
      config.p = p;
      config.q = p;
      if (i % 2 == 1) config.family = InstanceFamily::TreeLeaves;
      Instance inst = generate_instance(config, i);
      SubsetSelection subset = make_subset(inst.space, inst.subset_members);
      DistortionReport report = distortion(subset, inst.molecule, p, bound);
      if (report.norm_parent > 0.0) worst_ratio = std::max(worst_ratio, report.ratio);
      all_ok = all_ok && report.nonexpansive_ok && report.within_bound;
    }
  }
  std::ostringstream os;
  os << "p=1 worst |ratio-1| " << worst_metric_gap
     << "; p in {0.4, 0.7} worst ratio " << worst_ratio
     << " (regression baseline)";
  return {all_ok, os.str()};
}

Outcome criterion_tiles() {
  bool ok = true;
  std::string failure;
  int checks = 0;
  for (int d : {1, 2, 3}) {
    TilePropertyReport report = verify_tile_properties(d, 10000, 8008 + d);
    checks += report.checks;
    if (!report.ok) {
      ok = false;
      if (failure.empty() && !report.failures.empty()) failure = report.failures[0];
    }
  }
  std::ostringstream os;
  os << checks << " sampled checks across d = 1, 2, 3";
  if (!failure.empty()) os << "; first failure: " << failure;
  return {ok, os.str()};
}

Outcome criterion_grid_embedding() {
  bool ok = true;
  std::ostringstream os;
  struct Tuple {
    double p, q;
    int d;
  };
  for (Tuple t : {Tuple{1.0, 1.0, 1}, Tuple{0.5, 1.0, 2}, Tuple{0.5, 0.5, 2},
                  Tuple{0.5, 0.75, 3}}) {
    TauLipReport report = tau_lip_check(t.p, t.q, t.d, 1000, 4, 9009);
    ok = ok && report.ok;
    os << "(" << t.p << "," << t.q << "," << t.d << ") max ratio "
       << report.max_ratio << "; ";
  }

  // Exact retraction identity at every interior lattice point.
  for (int d : {1, 2}) {
    GridWindow window = grid_window(d, 1.0, 1.0, 3);
    for (const auto& w : window.coords) {
      if (w.cwiseAbs().maxCoeff() + 1 > window.radius) continue;
      LatticeStep step = tau(w.cast<double>(), window);
      Box cube{Eigen::VectorXd::Zero(d), Eigen::VectorXd::Ones(d)};
      LatticeStep expected{{{cube, delta(window.space, window.index_of(w))}}};
      if (!lattice_equal(step, expected)) ok = false;
    }
  }
  os << "lattice identity exact; ";

  // The radial formula is 1-Lipschitz on these windows for every n in one
  // dimension but only for n = 1 in two (at n = 2 the integer pair
  // (3,1), (2,2) maps to (2, 2/3), (2,2), moving 4/3 over a unit gap).
  double worst_lip = 0.0;
  for (double q : {1.0, 0.5}) {
    for (int n : {1, 2, 3}) {
      RetractionReport report = retraction_check(1, n, 3, q);
      worst_lip = std::max(worst_lip, std::abs(report.lipschitz - 1.0));
      ok = ok && report.ok;
    }
    RetractionReport plane = retraction_check(2, 1, 3, q);
    worst_lip = std::max(worst_lip, std::abs(plane.lipschitz - 1.0));
    ok = ok && plane.ok;
  }
  os << "retraction |lip-1| <= " << worst_lip;
  return {ok, os.str()};
}

Outcome criterion_indicator_difference() {
  ValueSpace vs{1, 1.0};
  double worst = 0.0;
  Rng rng(111213);
  for (double p : {0.3, 0.5, 1.0}) {
    for (int it = 0; it < 1000; ++it) {
      double a1 = rng.u01(), b1 = rng.u01(), a2 = rng.u01(), b2 = rng.u01();
      if (b1 < a1) std::swap(a1, b1);
      if (b2 < a2) std::swap(a2, b2);
      StepFunction f1{{0.0, 1.0}, {Eigen::VectorXd::Zero(1)}};
      auto indicator = [](double a, double b) {
        StepFunction f;
        f.breaks = {0.0};
        f.values = {};
        auto push = [&](double t, double v) {
          if (t > f.breaks.back()) {
            f.values.push_back(Eigen::VectorXd::Constant(1, v));
            f.breaks.push_back(t);
          }
        };
        push(a, 0.0);
        push(b, 1.0);
        push(1.0, 0.0);
        if (f.values.empty()) {
          f.values.push_back(Eigen::VectorXd::Zero(1));
          f.breaks = {0.0, 1.0};
        }
        return f;
      };
      double lhs =
          step_norm(step_sub(indicator(a1, b1), indicator(a2, b2)), p, vs);
      double rhs = std::pow(std::abs(a2 - a1) + std::abs(b2 - b1), 1.0 / p);
      worst = std::max(worst, lhs - rhs);
    }
  }
  std::ostringstream os;
  os << "3000 quadruples, worst excess " << worst;
  return {worst <= 1e-9, os.str()};
}

Outcome criterion_constants() {
  constants::AMin amin = constants::A_min();
  bool first_order = std::abs(amin.first_order) < 1e-6 * amin.value;

  auto audits = constants::audit_all(0.5);
  bool quoted_present = false;
  for (const auto& audit : audits)
    if (audit.printed == constants::kQuotedAValue &&
        std::abs(audit.value - amin.value) < 1e-9 * amin.value &&
        audit.ratio > 0.0)
      quoted_present = true;

  double e = std::exp(1.0), ln2 = std::log(2.0);
  double mu61 = constants::mu_const(6.0, 1.0);
  bool mu_ok =
      std::abs(mu61 - 2.0 * e * ln2 * std::log(12.0)) <= 1e-12 * mu61;
  double rat2 = constants::rational_factor(2.0);
  bool rational_ok = std::abs(rat2 - 1036.8) <= 1e-12 * 1036.8;

  std::ostringstream os;
  os << "R* = " << amin.R << ", closed form " << amin.value << ", primitive "
     << amin.primitive << ", quoted " << constants::kQuotedAValue
     << ", first-order residual " << amin.first_order;
  return {first_order && quoted_present && mu_ok && rational_ok, os.str()};
}

}  // namespace

int main() {
  std::vector<Criterion> criteria = {
      {1, "Kantorovich cross-oracle at p = 1", criterion_kantorovich},
      {2, "spanning-tree enumeration premise", criterion_tree_premise},
      {3, "p-norm axioms", criterion_pnorm_axioms},
      {4, "envelope monotonicity", criterion_envelope},
      {5, "Whitney construction", criterion_whitney},
      {6, "partition of unity", criterion_pou},
      {7, "extension bound", criterion_extension},
      {8, "distortion", criterion_distortion},
      {9, "tile properties", criterion_tiles},
      {10, "grid embedding", criterion_grid_embedding},
      {11, "indicator difference bound", criterion_indicator_difference},
      {12, "constants audit", criterion_constants},
  };

  bool all_pass = true;
  for (const auto& criterion : criteria) {
    auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = criterion.run();
    } catch (const std::exception& ex) {
      outcome = {false, std::string("exception: ") + ex.what()};
    }
    double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    std::printf("%s criterion %2d: %s: %s (%.1fs)\n",
                outcome.pass ? "PASS" : "FAIL", criterion.id,
                criterion.name.c_str(), outcome.detail.c_str(), seconds);
    std::fflush(stdout);
    all_pass = all_pass && outcome.pass;
  }
  return all_pass ? 0 : 1;
}
