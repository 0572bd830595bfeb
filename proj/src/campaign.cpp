#include "freep/campaign.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <stdexcept>

#include "freep/constants.hpp"
#include "freep/extend.hpp"
#include "freep/parallel.hpp"
#include "freep/rng.hpp"
#include "freep/whitney.hpp"

namespace freep {

InstanceFamily family_from_name(const std::string& name) {
  if (name == "random-metric") return InstanceFamily::RandomMetric;
  if (name == "snowflake") return InstanceFamily::Snowflake;
  if (name == "tree-leaves") return InstanceFamily::TreeLeaves;
  if (name == "grid") return InstanceFamily::Grid;
  throw std::invalid_argument("unknown instance family: " + name);
}

Suite suite_from_name(const std::string& name) {
  if (name == "norms") return Suite::Norms;
  if (name == "envelope") return Suite::Envelope;
  if (name == "distortion") return Suite::Distortion;
  if (name == "whitney") return Suite::Whitney;
  if (name == "extension") return Suite::Extension;
  throw std::invalid_argument("unknown suite: " + name);
}

void validate_config(const ExperimentConfig& config) {
  if (config.size < 2 || config.size > kNormPointCap)
    throw std::invalid_argument("instance size must lie in [2, 9]");
  if (!(config.p > 0.0 && config.p <= 1.0) || !(config.q > 0.0 && config.q <= 1.0))
    throw std::invalid_argument("exponents must lie in (0, 1]");
  if (config.p > config.q)
    throw std::invalid_argument("config needs p <= q");
  if (!(config.R > 1.0)) throw std::invalid_argument("R must exceed 1");
  if (config.trials < 1) throw std::invalid_argument("trials must be positive");
}

namespace {

double space_exponent(const ExperimentConfig& config) {
  switch (config.suite) {
    case Suite::Norms:
      return 1.0;
    case Suite::Envelope:
      return config.q;
    default:
      return config.p;
  }
}

QuasiMetricSpace random_metric(int m, double exponent, Rng& rng) {
  Eigen::MatrixXd weights(m, m);
  for (int i = 0; i < m; ++i) {
    weights(i, i) = 0.0;
    for (int j = i + 1; j < m; ++j) {
      double w = rng.uniform(0.5, 2.0);
      weights(i, j) = w;
      weights(j, i) = w;
    }
  }
  // Shortest-path completion makes the table a metric.
  for (int k = 0; k < m; ++k)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        weights(i, j) = std::min(weights(i, j), weights(i, k) + weights(k, j));

  QuasiMetricSpace space;
  for (int i = 0; i < m; ++i) space.names.push_back(std::to_string(i));
  space.base = 0;
  space.p = exponent;
  space.dist = weights.array().pow(1.0 / exponent).matrix();
  require_valid(space);
  return space;
}

WeightedTree random_tree(int m, Rng& rng) {
  WeightedTree tree;
  for (int i = 0; i < m; ++i) tree.vertices.push_back(std::to_string(i));
  tree.root = "0";
  // Pruefer decode on random digits.
  std::vector<int> seq(m >= 3 ? m - 2 : 0);
  for (int& digit : seq) digit = rng.index(m);
  std::vector<int> deg(m, 1);
  for (int digit : seq) deg[digit]++;
  std::vector<std::pair<int, int>> edges;
  for (int digit : seq) {
    int leaf = -1;
    for (int v = 0; v < m; ++v)
      if (deg[v] == 1) {
        leaf = v;
        break;
      }
    edges.push_back({leaf, digit});
    deg[leaf] = 0;
    deg[digit]--;
  }
  int u = -1, v = -1;
  for (int w = 0; w < m; ++w)
    if (deg[w] == 1) (u < 0 ? u : v) = w;
  edges.push_back({u, v});
  for (auto [a, b] : edges)
    tree.edges.push_back({static_cast<double>(a), static_cast<double>(b),
                          rng.uniform(0.5, 2.0)});
  return tree;
}

Molecule random_molecule_on(SpacePtr space, const std::vector<int>& allowed,
                            Rng& rng) {
  Molecule mu(space);
  int attempts = 0;
  while (mu.is_zero() && attempts++ < 16) {
    int k = 1 + rng.index(std::min<int>(3, static_cast<int>(allowed.size())));
    for (int i = 0; i < k; ++i) {
      int idx = allowed[rng.index(static_cast<int>(allowed.size()))];
      double sign = rng.u01() < 0.5 ? -1.0 : 1.0;
      mu.set_coeff(idx, sign * rng.uniform(0.5, 2.0));
    }
    mu = Molecule(space, mu.coeffs());  // re-zero the base slot if it was drawn
  }
  return mu;
}

}  // namespace

Instance generate_instance(const ExperimentConfig& config, int index) {
  Rng rng = substream(config.seed, static_cast<std::uint64_t>(index));
  const double exponent = space_exponent(config);
  Instance inst;

  switch (config.family) {
    case InstanceFamily::RandomMetric: {
      inst.space = std::make_shared<QuasiMetricSpace>(
          random_metric(config.size, exponent, rng));
      break;
    }
    case InstanceFamily::Snowflake: {
      QuasiMetricSpace flat = random_metric(config.size, 1.0, rng);
      inst.space =
          std::make_shared<QuasiMetricSpace>(snowflake(flat, 1.0 / exponent));
      break;
    }
    case InstanceFamily::TreeLeaves: {
      for (int attempt = 0; attempt < 64; ++attempt) {
        WeightedTree tree = random_tree(config.size, rng);
        std::vector<std::string> leaf_names = leaves(tree);
        if (leaf_names.size() < tree.vertices.size()) {
          inst.tree = tree;
          inst.space = std::make_shared<QuasiMetricSpace>(
              skeleton_tree_space(tree, exponent));
          for (const auto& name : leaf_names)
            inst.subset_members.push_back(inst.space->index_of(name));
          std::sort(inst.subset_members.begin(), inst.subset_members.end());
          break;
        }
      }
      if (!inst.space)
        throw std::runtime_error("could not draw a tree with an interior vertex");
      break;
    }
    case InstanceFamily::Grid: {
      int radius = std::max(1, (config.size - 1) / 2);
      inst.space = std::make_shared<QuasiMetricSpace>(
          grid_space(1, exponent, 1.0, radius));
      for (int i = 0; i < inst.space->size(); ++i) {
        int coord = i - radius;  // first-axis enumeration order
        if (coord % 2 == 0) inst.subset_members.push_back(i);
      }
      break;
    }
  }

  if (inst.subset_members.empty()) {
    // Random proper subset containing the base point.
    const int m = inst.space->size();
    int k = 1 + rng.index(m - 1);  // members besides base, leaving V nonempty
    std::vector<int> others;
    for (int i = 0; i < m; ++i)
      if (i != inst.space->base) others.push_back(i);
    for (int i = 0; i < k && static_cast<int>(inst.subset_members.size()) < m - 2;
         ++i)
      inst.subset_members.push_back(others[rng.index(static_cast<int>(others.size()))]);
    inst.subset_members.push_back(inst.space->base);
    std::sort(inst.subset_members.begin(), inst.subset_members.end());
    inst.subset_members.erase(
        std::unique(inst.subset_members.begin(), inst.subset_members.end()),
        inst.subset_members.end());
  }

  inst.molecule = random_molecule_on(inst.space, inst.subset_members, rng);
  return inst;
}

std::string instance_digest(const Instance& instance) {
  std::string blob = space_to_json(*instance.space).dump();
  for (int idx : instance.subset_members) blob += "," + std::to_string(idx);
  for (int idx : instance.molecule.support()) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "|%d:%.17g", idx, instance.molecule.coeff(idx));
    blob += buf;
  }
  std::uint64_t hash = 1469598103934665603ULL;
  for (unsigned char c : blob) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  char out[32];
  std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(hash));
  return out;
}

namespace {

NagataProvider pick_provider(const Instance& inst, const QuasiMetricSpace& space,
                             const std::vector<int>& N, double R) {
  if (inst.tree) return tree_nagata_provider(*inst.tree, space, N);
  Eigen::MatrixXd rho = space.metricized();
  if (N.size() == 1) return trivial_nagata_provider(rho, N);
  std::vector<double> probes;
  for (auto [j, s] : whitney_scales(space, N, R)) probes.push_back(s);
  return greedy_nagata_provider(rho, N, probes);
}

TrialRecord run_trial(const ExperimentConfig& config, int index) {
  TrialRecord rec;
  rec.index = index;
  rec.p = config.p;
  rec.q = config.q;

  Instance inst = generate_instance(config, index);
  rec.digest = instance_digest(inst);
  SubsetSelection subset = make_subset(inst.space, inst.subset_members);

  switch (config.suite) {
    case Suite::Norms: {
      rec.p = 1.0;
      rec.q = 1.0;
      rec.value_a = norm_exact(inst.molecule, 1.0).value;
      rec.value_b = dual_lower_bound(inst.molecule, 1.0);
      rec.bound = 1e-7;
      double rel = std::abs(rec.value_a - rec.value_b) /
                   std::max(1.0, std::abs(rec.value_a));
      rec.margin = rec.bound - rel;
      rec.pass = rec.margin >= 0.0 && rec.value_b <= rec.value_a + 1e-9;
      break;
    }
    case Suite::Envelope: {
      auto [at_p, at_q] = envelope_compare(inst.molecule, config.p, config.q);
      rec.value_a = at_p.value;
      rec.value_b = at_q.value;
      rec.bound = at_p.value + 1e-9;
      rec.margin = rec.bound - at_q.value;
      bool positive = inst.molecule.is_zero() || at_p.value > 0.0;
      rec.pass = rec.margin >= 0.0 && positive;
      break;
    }
    case Suite::Distortion: {
      double bound = config.p == 1.0
                         ? 1.0 + 1e-7
                         : std::pow(constants::A_primitive(), 1.0 / config.p);
      DistortionReport rep = distortion(subset, inst.molecule, config.p, bound);
      rec.value_a = rep.norm_subset;
      rec.value_b = rep.norm_parent;
      rec.bound = bound;
      double lower = config.p == 1.0 ? 1.0 - 1e-7 : 1.0 - 1e-9;
      rec.margin = std::min(bound - rep.ratio, rep.ratio - lower);
      rec.pass = rec.margin >= 0.0;
      break;
    }
    case Suite::Whitney: {
      NagataProvider provider =
          pick_provider(inst, *inst.space, inst.subset_members, config.R);
      WhitneyCover cover =
          whitney_build(*inst.space, inst.subset_members, config.R, provider);
      WhitneyReport wrep = verify_whitney(*inst.space, inst.subset_members, cover);
      double nu = (2.0 + cover.params.beta) * 1.25;
      PartitionOfUnity pou =
          partition_of_unity(*inst.space, inst.subset_members, cover, nu);
      PouReport prep = verify_pou(pou, *inst.space, inst.subset_members);
      bool ok = wrep.ok && prep.ok;
      if (config.plant_violation) {
        if (index % 2 == 0) {
          WhitneyCover corrupt = cover;
          corrupt.params.kappa = wrep.max_multiplicity - 1;
          ok = verify_whitney(*inst.space, inst.subset_members, corrupt).ok;
          rec.note = "planted multiplicity violation";
        } else {
          PartitionOfUnity corrupt = pou;
          corrupt.mu_const /= 10.0;
          ok = verify_pou(corrupt, *inst.space, inst.subset_members).ok;
          rec.note = "planted sum-bound violation";
        }
      }
      rec.value_a = wrep.worst_diam_ratio;
      rec.value_b = prep.worst_b1_ratio;
      rec.bound = cover.params.beta;
      rec.margin = cover.params.beta - wrep.worst_diam_ratio;
      rec.pass = ok;
      break;
    }
    case Suite::Extension: {
      NagataProvider provider =
          pick_provider(inst, *inst.space, inst.subset_members, config.R);
      WhitneyCover cover =
          whitney_build(*inst.space, inst.subset_members, config.R, provider);
      double nu = (2.0 + cover.params.beta) * 1.25;
      PartitionOfUnity pou =
          partition_of_unity(*inst.space, inst.subset_members, cover, nu);
      IntervalAssignment assignment = interval_assignment(pou);

      ValueSpace vs{index % 2 == 0 ? 1 : 3, config.p};
      Rng rng = substream(config.seed ^ 0x5bd1e995, static_cast<std::uint64_t>(index));
      BoundaryMap f(inst.space->size());
      for (int x : inst.subset_members) {
        Eigen::VectorXd v(vs.dim);
        for (int j = 0; j < vs.dim; ++j) v[j] = rng.uniform(-1.0, 1.0);
        f[x] = v;
      }
      for (int x : inst.subset_members) f[x] -= f[inst.space->base];
      double lip = lipschitz_constant(f, *inst.space, inst.subset_members, vs);
      if (lip > 0.0)
        for (int x : inst.subset_members) f[x] /= lip;
      lip = lipschitz_constant(f, *inst.space, inst.subset_members, vs);

      Extension ext =
          extend(f, pou, assignment, *inst.space, inst.subset_members, vs);
      rec.value_a = measured_lip(ext, *inst.space, config.p);
      rec.value_b = bound_D(config.p, cover.params.kappa, cover.params.gamma,
                            cover.params.beta, cover.params.alpha);
      rec.bound = rec.value_b;
      rec.margin = rec.value_b - rec.value_a;

      bool restriction_exact = true;
      for (int x : inst.subset_members) {
        const StepFunction& step = ext.at[x];
        if (step.breaks != std::vector<double>{0.0, 1.0} || step.values[0] != f[x])
          restriction_exact = false;
      }
      CaseBounds cases = check_case_bounds(ext, *inst.space, inst.subset_members,
                                           pou, lip, config.p);
      rec.pass = rec.margin >= 0.0 && restriction_exact && cases.ok;
      if (!restriction_exact) rec.note = "restriction not exact";
      break;
    }
  }
  return rec;
}

}  // namespace

Report run_campaign(const ExperimentConfig& config) {
  validate_config(config);
  Report report;
  report.records.resize(config.trials);
  parallel_chunks(config.trials, [&](std::int64_t b, std::int64_t e) {
    for (std::int64_t i = b; i < e; ++i) {
      try {
        report.records[i] = run_trial(config, static_cast<int>(i));
      } catch (const std::exception& ex) {
        report.records[i].index = static_cast<int>(i);
        report.records[i].pass = false;
        report.records[i].note = ex.what();
      }
    }
  });

  report.all_pass = true;
  report.min_margin = std::numeric_limits<double>::infinity();
  report.max_ratio = 0.0;
  for (const TrialRecord& rec : report.records) {
    report.all_pass = report.all_pass && rec.pass;
    report.min_margin = std::min(report.min_margin, rec.margin);
    if (rec.value_b != 0.0)
      report.max_ratio = std::max(report.max_ratio, rec.value_a / rec.value_b);
  }

  if (!config.out.empty()) {
    std::ofstream csv(config.out + ".csv");
    if (!csv) throw std::runtime_error("cannot write " + config.out + ".csv");
    csv << report_to_csv(report);
    write_json_file(config.out + ".json", report_to_json(report));
  }
  return report;
}

std::string report_to_csv(const Report& report) {
  std::string out;
  std::time_t now = std::time(nullptr);
  char stamp[64];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  out += std::string("# generated ") + stamp + "\n";
  out += "instance_digest,p,q,value_a,value_b,bound,margin\n";
  for (const TrialRecord& rec : report.records) {
    char line[320];
    std::snprintf(line, sizeof(line), "%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  rec.digest.c_str(), rec.p, rec.q, rec.value_a, rec.value_b,
                  rec.bound, rec.margin);
    out += line;
  }
  return out;
}

json report_to_json(const Report& report) {
  json records = json::array();
  for (const TrialRecord& rec : report.records)
    records.push_back({{"index", rec.index},
                       {"instance_digest", rec.digest},
                       {"p", rec.p},
                       {"q", rec.q},
                       {"value_a", rec.value_a},
                       {"value_b", rec.value_b},
                       {"bound", rec.bound},
                       {"margin", rec.margin},
                       {"pass", rec.pass},
                       {"note", rec.note}});
  return json{{"records", records},
              {"summary",
               {{"all_pass", report.all_pass},
                {"min_margin", report.min_margin},
                {"max_ratio", report.max_ratio}}}};
}

}  // namespace freep
