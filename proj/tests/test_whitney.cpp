#include <doctest.h>

#include <cmath>

#include "freep/constants.hpp"
#include "freep/whitney.hpp"
#include "helpers.hpp"

using namespace freep;

TEST_CASE("nagata verification on hand-built covers") {
  QuasiMetricSpace space = test::line_space({0.0, 10.0, 20.0, 30.0});
  Eigen::MatrixXd rho = space.metricized();
  std::vector<int> N{0, 1, 2, 3};

  // Points pairwise farther than s: singletons work with n = 0, lambda = 1.
  NagataCover singles{1.0, 0, 1.0, {{0}, {1}, {2}, {3}}};
  CHECK(verify_nagata(rho, N, singles).ok);

  // The whole set needs diam(N) <= lambda * s.
  NagataCover whole{1.0, 0, 1.0, {{0, 1, 2, 3}}};
  NagataReport report = verify_nagata(rho, N, whole);
  CHECK(!report.ok);
  CHECK(!report.diam_ok);
  whole.s = 30.0;
  CHECK(verify_nagata(rho, N, whole).ok);

  // Understating n breaks the multiplicity condition.
  NagataCover crowded{25.0, 0, 1.0, {{0, 1}, {1, 2}, {2, 3}}};
  NagataReport crowded_report = verify_nagata(rho, N, crowded);
  CHECK(!crowded_report.multiplicity_ok);
}

TEST_CASE("band covers of a path tree have the (1, 6) property") {
  WeightedTree tree = test::path_tree(8);
  QuasiMetricSpace space = skeleton_tree_space(tree, 1.0);
  std::vector<int> all;
  for (int i = 0; i < space.size(); ++i) all.push_back(i);
  NagataProvider provider = tree_nagata_provider(tree, space, all);
  CHECK(provider.n == 1);
  CHECK(provider.lambda == doctest::Approx(6.0));
  for (double s : {0.4, 1.0, 3.0}) {
    NagataCover cover = provider.build(s);
    CHECK(verify_nagata(space.metricized(), all, cover).ok);
  }
}

TEST_CASE("band covers work on bushier trees and restrict to leaf sets") {
  WeightedTree tree;
  tree.vertices = {"0", "a", "b", "c", "d", "e", "f"};
  tree.root = "0";
  tree.edges = {{0, 1, 1.0}, {1, 2, 0.5}, {1, 3, 2.0},
                {3, 4, 1.0}, {0, 5, 3.0}, {5, 6, 0.25}};
  QuasiMetricSpace space = skeleton_tree_space(tree, 1.0);
  std::vector<int> leaf_set;
  for (const auto& name : leaves(tree)) leaf_set.push_back(space.index_of(name));
  std::sort(leaf_set.begin(), leaf_set.end());
  NagataProvider provider = tree_nagata_provider(tree, space, leaf_set);
  for (double s : {0.3, 0.9, 2.5, 7.0}) {
    NagataCover cover = provider.build(s);
    CHECK(verify_nagata(space.metricized(), leaf_set, cover).ok);
  }
}

TEST_CASE("nagata_cover falls back until something verifies") {
  QuasiMetricSpace space = test::line_space({0.0, 1.0, 2.0, 3.0});
  Eigen::MatrixXd rho = space.metricized();
  std::vector<int> N{0, 1, 2, 3};
  NagataCover cover = nagata_cover(rho, N, 1.0, 3, 2.0);
  CHECK(verify_nagata(rho, N, cover).ok);
  // Impossible target: n = 0 forces disjoint covers at lambda below separation.
  CHECK_THROWS(nagata_cover(rho, N, 10.0, 0, 0.01));
}

TEST_CASE("explicit strategies build verified covers") {
  WeightedTree tree = test::path_tree(5);
  QuasiMetricSpace space = skeleton_tree_space(tree, 1.0);
  TreeContext ctx = make_tree_context(tree, space);
  std::vector<int> all;
  for (int i = 0; i < space.size(); ++i) all.push_back(i);
  Eigen::MatrixXd rho = space.metricized();
  NagataCover banded =
      nagata_cover(rho, all, 0.8, 1, 6.0, NagataStrategy::TreeBand, &ctx);
  CHECK(verify_nagata(rho, all, banded).ok);
  CHECK_THROWS(nagata_cover(rho, all, 0.8, 1, 6.0, NagataStrategy::TreeBand));

  QuasiMetricSpace line = test::line_space({0.0, 1.0, 2.0, 3.0});
  Eigen::MatrixXd rho_line = line.metricized();
  std::vector<int> N{0, 1, 2, 3};
  NagataCover blocks =
      nagata_cover(rho_line, N, 1.5, 1, 2.0, NagataStrategy::Exhaustive);
  CHECK(verify_nagata(rho_line, N, blocks).ok);
}

TEST_CASE("the exhaustive provider settles on a feasible target") {
  QuasiMetricSpace line = test::line_space({0.0, 1.0, 2.0, 3.0, 7.0});
  std::vector<int> N{0, 1, 4};
  std::vector<double> probes;
  for (auto [j, s] : whitney_scales(line, N, 2.0)) probes.push_back(s);
  Eigen::MatrixXd rho = line.metricized();
  NagataProvider provider = exhaustive_nagata_provider(rho, N, probes);
  for (double s : probes)
    CHECK(verify_nagata(rho, N, provider.build(s)).ok);
  WhitneyCover cover = whitney_build(line, N, 2.0, provider);
  CHECK(verify_whitney(line, N, cover).ok);
}

TEST_CASE("the scale ladder spans the data range") {
  QuasiMetricSpace line = test::line_space({0.0, 1.0, 2.0, 9.0});
  std::vector<int> N{0};
  auto scales = whitney_scales(line, N, 2.0);
  REQUIRE(!scales.empty());
  // every complement point's band index appears in the ladder
  for (double rho : {1.0, 2.0, 9.0}) {
    int j = static_cast<int>(std::floor(std::log2(rho)));
    bool found = false;
    for (auto [jj, s] : scales) found = found || jj == j;
    CHECK(found);
  }
}

TEST_CASE("whitney_build on the four-point line matches the closed forms") {
  QuasiMetricSpace space = test::line_space({0.0, 1.0, 2.0, 4.0});
  std::vector<int> N{0};
  NagataProvider provider = trivial_nagata_provider(space.metricized(), N);
  CHECK(provider.n == 0);
  WhitneyCover cover = whitney_build(space, N, 2.0, provider);
  CHECK(cover.params.kappa == doctest::Approx(3.0));
  CHECK(cover.params.gamma == doctest::Approx(4.0));
  CHECK(cover.params.beta == doctest::Approx(20.0));
  CHECK(cover.params.alpha == doctest::Approx(5.0));
  WhitneyReport report = verify_whitney(space, N, cover);
  CHECK(report.ok);
  CHECK(report.claim_a_ok);
  CHECK(report.claim_b_ok);
}

TEST_CASE("whitney_build refuses an empty complement") {
  QuasiMetricSpace space = test::line_space({0.0, 1.0});
  std::vector<int> N{0, 1};
  NagataProvider provider = trivial_nagata_provider(space.metricized(), N);
  CHECK_THROWS(whitney_build(space, N, 2.0, provider));
}

TEST_CASE("whitney cover over tree leaves uses kappa = 6") {
  WeightedTree tree;
  tree.vertices = {"0", "a", "b", "c", "d"};
  tree.root = "0";
  tree.edges = {{0, 1, 1.0}, {1, 2, 1.0}, {1, 3, 0.5}, {3, 4, 1.5}};
  QuasiMetricSpace space = skeleton_tree_space(tree, 0.5);
  std::vector<int> N;
  for (const auto& name : leaves(tree)) N.push_back(space.index_of(name));
  std::sort(N.begin(), N.end());
  NagataProvider provider = tree_nagata_provider(tree, space, N);
  WhitneyCover cover = whitney_build(space, N, 2.0, provider);
  CHECK(cover.params.kappa == doctest::Approx(6.0));
  CHECK(verify_whitney(space, N, cover).ok);
}

TEST_CASE("planted violations are caught by verify_whitney") {
  QuasiMetricSpace space = test::line_space({0.0, 1.0, 2.0, 4.0});
  std::vector<int> N{0};
  NagataProvider provider = trivial_nagata_provider(space.metricized(), N);
  WhitneyCover cover = whitney_build(space, N, 2.0, provider);

  WhitneyCover understated = cover;
  WhitneyReport honest = verify_whitney(space, N, cover);
  understated.params.kappa = honest.max_multiplicity - 1;
  CHECK(!verify_whitney(space, N, understated).multiplicity_ok);

  WhitneyCover widened = cover;
  // Planting a far point inside a set breaks the comparability condition.
  widened.sets.front().members.push_back(3);
  widened.params.alpha = 1.0001;
  CHECK(!verify_whitney(space, N, widened).alpha_ok);
}

TEST_CASE("partition of unity on a single-set cover is identically one") {
  QuasiMetricSpace space = test::line_space({0.0, 1.0, 1.5});
  std::vector<int> N{0};
  WhitneyCover cover;
  cover.R = 2.0;
  cover.params = {2.0, 4.0, 1.0, 2.0};
  cover.sets = {{0, 0, {1, 2}}};
  PartitionOfUnity pou = partition_of_unity(space, N, cover, 8.0);
  for (int c = 0; c < pou.phi.cols(); ++c)
    CHECK(pou.phi(0, c) == doctest::Approx(1.0));
  CHECK(pou.anchors[0] == 0);  // the nearest boundary point
}

TEST_CASE("symmetric overlapping sets split the unit evenly") {
  QuasiMetricSpace space = test::line_space({0.0, 1.0, 2.0});
  std::vector<int> N{0};
  WhitneyCover cover;
  cover.R = 2.0;
  cover.params = {2.0, 4.0, 1.0, 2.0};
  cover.sets = {{0, 0, {1, 2}}, {0, 1, {1, 2}}};
  PartitionOfUnity pou = partition_of_unity(space, N, cover, 8.0);
  CHECK(pou.phi(0, 0) == doctest::Approx(0.5));
  CHECK(pou.phi(1, 0) == doctest::Approx(0.5));
}

TEST_CASE("verify_pou on constructed instances") {
  QuasiMetricSpace space = test::line_space({0.0, 1.0, 2.0, 4.0});
  std::vector<int> N{0};
  NagataProvider provider = trivial_nagata_provider(space.metricized(), N);
  WhitneyCover cover = whitney_build(space, N, 2.0, provider);
  double nu = (2.0 + cover.params.beta) * 1.25;
  PartitionOfUnity pou = partition_of_unity(space, N, cover, nu);
  PouReport report = verify_pou(pou, space, N);
  CHECK(report.ok);
  CHECK(report.sums_to_one);
  CHECK(report.support_matches_sets);

  // Pipeline-built instances carry a structural slack of well over a factor
  // ten in the sum bound, so the mu/10 plant needs a fixture whose honest
  // ratio is large: two sets over a close pair of points deep in V.
  QuasiMetricSpace tight = test::line_space({0.0, 1.0, 1.1});
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
  PouReport honest = verify_pou(fixture, tight, Nt);
  CHECK(honest.ok);
  CHECK(honest.worst_b1_ratio > 0.1);
  PartitionOfUnity planted = fixture;
  planted.mu_const /= 10.0;
  CHECK(!verify_pou(planted, tight, Nt).b1_ok);
}

TEST_CASE("verify_pou is trivial when V is a single point") {
  QuasiMetricSpace space = test::line_space({0.0, 1.0});
  std::vector<int> N{0};
  WhitneyCover cover;
  cover.params = {2.0, 4.0, 1.0, 2.0};
  cover.sets = {{0, 0, {1}}};
  PartitionOfUnity pou = partition_of_unity(space, N, cover, 8.0);
  CHECK(verify_pou(pou, space, N).ok);
}

TEST_CASE("partition of unity guards its preconditions") {
  QuasiMetricSpace space = test::line_space({0.0, 1.0, 2.0});
  std::vector<int> N{0};
  WhitneyCover cover;
  cover.params = {1.0, 4.0, 1.0, 2.0};  // kappa below the required floor of 2
  cover.sets = {{0, 0, {1, 2}}};
  CHECK_THROWS_AS(partition_of_unity(space, N, cover, 8.0), std::invalid_argument);

  cover.params.kappa = 2.0;
  CHECK_THROWS_AS(partition_of_unity(space, N, cover, 2.5),  // nu <= 2 + beta
                  std::invalid_argument);

  // A set whose diameter dwarfs its distance to N kills the anchor inequality
  // at this nu.
  QuasiMetricSpace wide = test::line_space({0.0, 0.1, 40.0});
  WhitneyCover bad;
  bad.params = {2.0, 4.0, 300.0, 350.0};
  bad.sets = {{0, 0, {1, 2}}};
  CHECK_THROWS_AS(partition_of_unity(wide, N, bad, 302.5), std::runtime_error);
}
