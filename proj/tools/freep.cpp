// Command-line laboratory for Lipschitz-free p-space geometry on finite
// quasi-metric spaces: norms, distortion, Whitney covers, partitions of
// unity, Lipschitz extensions, lattice embeddings, constants, campaigns.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "freep/campaign.hpp"
#include "freep/constants.hpp"
#include "freep/extend.hpp"
#include "freep/free_norm.hpp"
#include "freep/grid.hpp"
#include "freep/json_io.hpp"
#include "freep/rng.hpp"
#include "freep/whitney.hpp"

namespace {

using freep::json;

void emit(const json& value, const std::string& out) {
  if (out.empty())
    std::cout << value.dump(2) << "\n";
  else
    freep::write_json_file(out, value);
}

json norm_result_to_json(const freep::NormResult& result,
                         const freep::QuasiMetricSpace& space) {
  json witness = json::array();
  for (const auto& term : result.witness.terms)
    witness.push_back({{"x", space.names[term.x]},
                       {"y", space.names[term.y]},
                       {"a", term.a}});
  const char* method = result.method == freep::NormMethod::Exact    ? "exact"
                       : result.method == freep::NormMethod::Search ? "search"
                                                                    : "dual";
  return json{{"value", result.value},
              {"method", method},
              {"certified", result.certified},
              {"witness", witness}};
}

freep::SpacePtr load_space(const std::string& path) {
  auto space = std::make_shared<freep::QuasiMetricSpace>(
      freep::space_from_json(freep::load_json_file(path)));
  freep::require_valid(*space);
  return space;
}

struct WhitneyInputs {
  freep::SpacePtr space;
  std::vector<int> members;
  std::optional<freep::WeightedTree> tree;
};

WhitneyInputs load_whitney_inputs(const std::string& space_path,
                                  const std::string& subset_path,
                                  const std::string& tree_path) {
  WhitneyInputs in;
  if (!tree_path.empty()) {
    in.tree = freep::tree_from_json(freep::load_json_file(tree_path));
    if (space_path.empty())
      throw std::runtime_error("--tree also needs --space (skeleton space file)");
  }
  in.space = load_space(space_path);
  in.members = freep::subset_from_json(freep::load_json_file(subset_path),
                                       *in.space);
  return in;
}

freep::NagataProvider make_provider(const WhitneyInputs& in,
                                    const std::string& strategy, double R) {
  Eigen::MatrixXd rho = in.space->metricized();
  if (strategy == "tree") {
    if (!in.tree) throw std::runtime_error("tree strategy needs --tree");
    return freep::tree_nagata_provider(*in.tree, *in.space, in.members);
  }
  if (in.members.size() == 1)
    return freep::trivial_nagata_provider(rho, in.members);
  std::vector<double> probes;
  for (auto [j, s] : freep::whitney_scales(*in.space, in.members, R))
    probes.push_back(s);
  if (strategy == "exhaustive")
    return freep::exhaustive_nagata_provider(rho, in.members, probes);
  return freep::greedy_nagata_provider(rho, in.members, probes);
}

json whitney_to_json(const freep::WhitneyCover& cover,
                     const freep::WhitneyReport& report,
                     const freep::QuasiMetricSpace& space) {
  json sets = json::array();
  for (const auto& set : cover.sets) {
    json members = json::array();
    for (int x : set.members) members.push_back(space.names[x]);
    sets.push_back({{"j", set.j}, {"k", set.k}, {"members", members}});
  }
  return json{
      {"params",
       {{"kappa", cover.params.kappa},
        {"gamma", cover.params.gamma},
        {"beta", cover.params.beta},
        {"alpha", cover.params.alpha}}},
      {"R", cover.R},
      {"nagata", {{"n", cover.nagata_n}, {"lambda", cover.nagata_lambda}}},
      {"sets", sets},
      {"report",
       {{"ok", report.ok},
        {"max_multiplicity", report.max_multiplicity},
        {"worst_gamma_ratio", report.worst_gamma_ratio},
        {"worst_diam_ratio", report.worst_diam_ratio},
        {"worst_alpha_ratio", report.worst_alpha_ratio},
        {"claim_a_ok", report.claim_a_ok},
        {"claim_b_ok", report.claim_b_ok}}}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite quasi-metric laboratory for Lipschitz-free p-spaces"};
  app.require_subcommand(1);

  std::string space_path, subset_path, molecule_path, tree_path, f_path, out_path;
  std::string method = "exact", nagata = "greedy", format = "csv";
  std::string family = "random-metric", suite_name = "norms";
  double p = 0.5, q = 1.0, R = 2.0, nu = 0.0, t = 1.0, r_mid = -1.0;
  int trials = 100, restarts = 1000, d = 2, window = 4, pairs = 1000, n_ret = 1;
  int size = 6;
  std::uint64_t seed = 7;
  bool plant = false;

  auto* norm = app.add_subcommand("norm", "free-space norm of a molecule");
  norm->add_option("--space", space_path)->required();
  norm->add_option("--molecule", molecule_path)->required();
  norm->add_option("--p", p)->required();
  norm->add_option("--method", method)->check(CLI::IsMember({"exact", "search", "dual"}));
  norm->add_option("--restarts", restarts);
  norm->add_option("--seed", seed);
  norm->add_option("--out", out_path);

  auto* distortion = app.add_subcommand(
      "distortion", "subset-vs-ambient norm ratios over random molecules");
  distortion->add_option("--space", space_path)->required();
  distortion->add_option("--subset", subset_path)->required();
  distortion->add_option("--p", p)->required();
  distortion->add_option("--trials", trials);
  distortion->add_option("--seed", seed);
  distortion->add_option("--out", out_path);

  auto* whitney = app.add_subcommand("whitney", "build and verify a Whitney cover");
  whitney->add_option("--space", space_path)->required();
  whitney->add_option("--subset", subset_path)->required();
  whitney->add_option("--R", R);
  whitney->add_option("--nagata", nagata)
      ->check(CLI::IsMember({"greedy", "tree", "exhaustive"}));
  whitney->add_option("--tree", tree_path);
  whitney->add_option("--out", out_path);

  auto* pou = app.add_subcommand("pou", "partition of unity over a Whitney cover");
  pou->add_option("--space", space_path)->required();
  pou->add_option("--subset", subset_path)->required();
  pou->add_option("--R", R);
  pou->add_option("--nu", nu);
  pou->add_option("--nagata", nagata)
      ->check(CLI::IsMember({"greedy", "tree", "exhaustive"}));
  pou->add_option("--tree", tree_path);
  pou->add_option("--out", out_path);

  auto* extend_cmd = app.add_subcommand("extend", "extend boundary data and measure");
  extend_cmd->add_option("--space", space_path)->required();
  extend_cmd->add_option("--subset", subset_path)->required();
  extend_cmd->add_option("--f", f_path)->required();
  extend_cmd->add_option("--p", p)->required();
  extend_cmd->add_option("--R", R);
  extend_cmd->add_option("--nu", nu);
  extend_cmd->add_option("--nagata", nagata)
      ->check(CLI::IsMember({"greedy", "tree", "exhaustive"}));
  extend_cmd->add_option("--tree", tree_path);
  extend_cmd->add_option("--out", out_path);

  auto* grid_cmd = app.add_subcommand("grid", "tile properties and lattice embedding");
  grid_cmd->add_option("--d", d);
  grid_cmd->add_option("--p", p);
  grid_cmd->add_option("--q", q);
  grid_cmd->add_option("--r", r_mid);
  grid_cmd->add_option("--t", t);
  grid_cmd->add_option("--pairs", pairs);
  grid_cmd->add_option("--window", window);
  grid_cmd->add_option("--n", n_ret);
  grid_cmd->add_option("--seed", seed);
  grid_cmd->add_option("--out", out_path);

  auto* constants_cmd = app.add_subcommand("constants", "audit the closed-form constants");
  constants_cmd->add_option("--p", p);
  constants_cmd->add_option("--out", out_path);

  auto* campaign = app.add_subcommand("campaign", "seeded experiment campaign");
  campaign->add_option("--suite", suite_name)
      ->check(CLI::IsMember({"norms", "envelope", "distortion", "whitney", "extension"}));
  campaign->add_option("--family", family)
      ->check(CLI::IsMember({"random-metric", "snowflake", "tree-leaves", "grid"}));
  campaign->add_option("--size", size);
  campaign->add_option("--p", p);
  campaign->add_option("--q", q);
  campaign->add_option("--R", R);
  campaign->add_option("--trials", trials);
  campaign->add_option("--seed", seed);
  campaign->add_flag("--plant-violation", plant);
  campaign->add_option("--out", out_path);
  campaign->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (norm->parsed()) {
      freep::SpacePtr space = load_space(space_path);
      freep::Molecule mu = freep::molecule_from_json(
          freep::load_json_file(molecule_path), space);
      freep::NormResult result;
      if (method == "exact")
        result = freep::norm_exact(mu, p);
      else if (method == "search")
        result = freep::norm_search(mu, p, restarts, seed);
      else {
        result.value = freep::dual_lower_bound(mu, p);
        result.method = freep::NormMethod::Dual;
      }
      emit(norm_result_to_json(result, *space), out_path);
    } else if (distortion->parsed()) {
      freep::SpacePtr space = load_space(space_path);
      std::vector<int> members = freep::subset_from_json(
          freep::load_json_file(subset_path), *space);
      freep::SubsetSelection subset = freep::make_subset(space, members);
      std::string csv = "instance_digest,p,q,value_a,value_b,bound,margin\n";
      bool all_ok = true;
      for (int i = 0; i < trials; ++i) {
        freep::Rng rng = freep::substream(seed, i);
        freep::Molecule mu(space);
        for (int draw = 0; draw < 3; ++draw) {
          int idx = members[rng.index(static_cast<int>(members.size()))];
          mu.set_coeff(idx, rng.uniform(-2.0, 2.0));
        }
        freep::Instance inst{space, members, mu, std::nullopt};
        freep::DistortionReport rep = freep::distortion(subset, mu, p);
        all_ok = all_ok && rep.nonexpansive_ok && rep.within_bound;
        char line[256];
        std::snprintf(line, sizeof(line), "%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      freep::instance_digest(inst).c_str(), p, p, rep.norm_subset,
                      rep.norm_parent, rep.bound, rep.bound - rep.ratio);
        csv += line;
      }
      if (out_path.empty())
        std::cout << csv;
      else {
        std::ofstream file(out_path);
        file << csv;
      }
      return all_ok ? 0 : 1;
    } else if (whitney->parsed() || pou->parsed() || extend_cmd->parsed()) {
      WhitneyInputs in = load_whitney_inputs(space_path, subset_path, tree_path);
      if (extend_cmd->parsed() && p != in.space->p) {
        // The cover, the partition and the extension must all live at the
        // same level; re-declare the space at the requested exponent (valid
        // whenever p does not exceed the stored one).
        auto redeclared = std::make_shared<freep::QuasiMetricSpace>(*in.space);
        redeclared->p = p;
        freep::require_valid(*redeclared);
        in.space = redeclared;
      }
      freep::NagataProvider provider = make_provider(in, nagata, R);
      freep::WhitneyCover cover =
          freep::whitney_build(*in.space, in.members, R, provider);
      freep::WhitneyReport report = freep::verify_whitney(*in.space, in.members, cover);
      if (whitney->parsed()) {
        emit(whitney_to_json(cover, report, *in.space), out_path);
        return report.ok ? 0 : 1;
      }
      double nu_used = nu > 0.0 ? nu : (2.0 + cover.params.beta) * 1.25;
      freep::PartitionOfUnity part =
          freep::partition_of_unity(*in.space, in.members, cover, nu_used);
      freep::PouReport prep = freep::verify_pou(part, *in.space, in.members);
      if (pou->parsed()) {
        json phi = json::object();
        for (std::size_t c = 0; c < part.v_points.size(); ++c) {
          json column = json::array();
          for (int u = 0; u < part.phi.rows(); ++u)
            column.push_back(part.phi(u, static_cast<int>(c)));
          phi[in.space->names[part.v_points[c]]] = column;
        }
        emit(json{{"phi", phi},
                  {"nu", part.nu},
                  {"mu", part.mu_const},
                  {"q_psi", part.q_psi},
                  {"anchors",
                   [&] {
                     json anchors = json::array();
                     for (int a : part.anchors) anchors.push_back(in.space->names[a]);
                     return anchors;
                   }()},
                  {"report",
                   {{"ok", prep.ok},
                    {"worst_b1_ratio", prep.worst_b1_ratio},
                    {"worst_b2_ratio", prep.worst_b2_ratio},
                    {"worst_b3_ratio", prep.worst_b3_ratio},
                    {"max_support_count", prep.max_support_count}}}},
             out_path);
        return prep.ok ? 0 : 1;
      }
      freep::ValueSpace vs{1, p};
      json fjson = freep::load_json_file(f_path);
      for (const auto& item : fjson.items())
        if (item.value().is_array()) vs.dim = static_cast<int>(item.value().size());
      vs.p = p;
      freep::BoundaryMap f = freep::boundary_from_json(fjson, *in.space, vs.dim);
      double lip = freep::lipschitz_constant(f, *in.space, in.members, vs);
      freep::IntervalAssignment assignment = freep::interval_assignment(part);
      freep::Extension ext =
          freep::extend(f, part, assignment, *in.space, in.members, vs);
      double measured = freep::measured_lip(ext, *in.space, p);
      double bound = freep::bound_D(p, cover.params.kappa, cover.params.gamma,
                                    cover.params.beta, cover.params.alpha);
      freep::CaseBounds cases =
          freep::check_case_bounds(ext, *in.space, in.members, part, lip, p);
      auto pair_names = [&](const std::array<int, 2>& pr) {
        json names = json::array();
        if (pr[0] >= 0) {
          names.push_back(in.space->names[pr[0]]);
          names.push_back(in.space->names[pr[1]]);
        }
        return names;
      };
      emit(json{{"lip_f", lip},
                {"measured_lip", measured},
                {"bound_D", bound},
                {"margin", bound - measured},
                {"cases",
                 {{"c1", cases.c1},
                  {"c2", cases.c2},
                  {"c3", cases.c3},
                  {"worst_boundary", cases.worst_boundary},
                  {"worst_boundary_pair", pair_names(cases.boundary_pair)},
                  {"worst_disjoint", cases.worst_disjoint},
                  {"worst_disjoint_pair", pair_names(cases.disjoint_pair)},
                  {"worst_shared", cases.worst_shared},
                  {"worst_shared_pair", pair_names(cases.shared_pair)},
                  {"ok", cases.ok}}}},
           out_path);
      return (measured <= bound && cases.ok) ? 0 : 1;
    } else if (grid_cmd->parsed()) {
      freep::TilePropertyReport tiles = freep::verify_tile_properties(d, 2000, seed);
      freep::TauLipReport tau_rep = freep::tau_lip_check(p, q, d, pairs, window, seed);
      freep::RetractionReport ret = freep::retraction_check(d, n_ret, window, q);
      double mid = r_mid > 0.0 ? r_mid : p;
      freep::CommuteReport commute =
          freep::commuting_square_check(50, p, mid, q, d, t, seed);
      emit(json{{"tiles", {{"ok", tiles.ok}, {"checks", tiles.checks}}},
                {"tau",
                 {{"ok", tau_rep.ok},
                  {"max_ratio", tau_rep.max_ratio},
                  {"bound", tau_rep.constant},
                  {"pairs", tau_rep.pairs}}},
                {"retraction",
                 {{"ok", ret.ok},
                  {"lipschitz", ret.lipschitz},
                  {"idempotent", ret.idempotent},
                  {"fixes_ball", ret.fixes_ball}}},
                {"commute",
                 {{"ok", commute.ok},
                  {"envelope", commute.envelope_ok},
                  {"dilation", commute.dilation_ok},
                  {"retraction_identity", commute.retraction_identity_ok}}}},
           out_path);
      return (tiles.ok && tau_rep.ok && ret.ok && commute.ok) ? 0 : 1;
    } else if (constants_cmd->parsed()) {
      json audits = json::array();
      for (const auto& audit : freep::constants::audit_all(p))
        audits.push_back({{"name", audit.name},
                          {"value", audit.value},
                          {"printed", audit.printed},
                          {"ratio", audit.ratio},
                          {"notes", audit.notes}});
      freep::constants::AMin amin = freep::constants::A_min();
      emit(json{{"audits", audits},
                {"A_min",
                 {{"R", amin.R},
                  {"rational", amin.rational},
                  {"value", amin.value},
                  {"primitive", amin.primitive},
                  {"first_order", amin.first_order}}}},
           out_path);
    } else if (campaign->parsed()) {
      freep::ExperimentConfig config;
      config.seed = seed;
      config.family = freep::family_from_name(family);
      config.suite = freep::suite_from_name(suite_name);
      config.size = size;
      config.p = p;
      config.q = q;
      config.R = R;
      config.trials = trials;
      config.plant_violation = plant;
      config.out = out_path;
      freep::Report report = freep::run_campaign(config);
      if (format == "csv")
        std::cout << freep::report_to_csv(report);
      else
        std::cout << freep::report_to_json(report).dump(2) << "\n";
      return report.all_pass ? 0 : 1;
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  }
  return 0;
}
