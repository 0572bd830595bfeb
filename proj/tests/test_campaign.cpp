#include <doctest.h>

#include <string>

#include "freep/campaign.hpp"
#include "freep/space.hpp"

using namespace freep;

namespace {

std::string strip_header(const std::string& csv) {
  auto pos = csv.find('\n');
  return csv.substr(pos + 1);
}

}  // namespace

TEST_CASE("instances are seed-deterministic") {
  ExperimentConfig config;
  config.seed = 7;
  config.size = 6;
  Instance a = generate_instance(config, 0);
  Instance b = generate_instance(config, 0);
  CHECK(instance_digest(a) == instance_digest(b));
  Instance c = generate_instance(config, 1);
  CHECK(instance_digest(a) != instance_digest(c));
}

TEST_CASE("tree-leaves instances select exactly the leaf set") {
  ExperimentConfig config;
  config.family = InstanceFamily::TreeLeaves;
  config.seed = 13;
  config.size = 6;
  for (int i = 0; i < 5; ++i) {
    Instance inst = generate_instance(config, i);
    REQUIRE(inst.tree.has_value());
    std::vector<int> expected;
    for (const auto& name : leaves(*inst.tree))
      expected.push_back(inst.space->index_of(name));
    std::sort(expected.begin(), expected.end());
    CHECK(inst.subset_members == expected);
  }
}

TEST_CASE("generated quasi-metric spaces always validate") {
  ExperimentConfig config;
  config.suite = Suite::Distortion;  // instances at exponent p
  config.seed = 29;
  config.size = 6;
  config.p = 0.5;
  config.q = 0.5;
  for (auto family : {InstanceFamily::RandomMetric, InstanceFamily::Snowflake,
                      InstanceFamily::TreeLeaves, InstanceFamily::Grid}) {
    config.family = family;
    for (int i = 0; i < 5; ++i) {
      Instance inst = generate_instance(config, i);
      CHECK(validate(*inst.space).ok);
      CHECK(inst.space->p == doctest::Approx(0.5));
    }
  }
}

TEST_CASE("campaign reports are byte-stable modulo the timestamp header") {
  ExperimentConfig config;
  config.suite = Suite::Envelope;
  config.trials = 6;
  config.size = 5;
  config.seed = 101;
  config.p = 0.5;
  config.q = 1.0;
  Report a = run_campaign(config);
  Report b = run_campaign(config);
  CHECK(strip_header(report_to_csv(a)) == strip_header(report_to_csv(b)));
  CHECK(a.all_pass);
}

TEST_CASE("kantorovich campaign passes and exits clean") {
  ExperimentConfig config;
  config.suite = Suite::Norms;
  config.trials = 10;
  config.size = 5;
  config.seed = 3;
  config.p = 1.0;
  config.q = 1.0;
  Report report = run_campaign(config);
  CHECK(report.all_pass);
  for (const auto& rec : report.records) CHECK(rec.margin >= 0.0);
}

TEST_CASE("planted violations poison the summary") {
  ExperimentConfig config;
  config.suite = Suite::Whitney;
  config.trials = 4;
  config.size = 5;
  config.seed = 19;
  config.p = 0.5;
  config.q = 0.5;
  Report honest = run_campaign(config);
  CHECK(honest.all_pass);
  config.plant_violation = true;
  Report planted = run_campaign(config);
  CHECK(!planted.all_pass);
  for (const auto& rec : planted.records) CHECK(!rec.digest.empty());
}

TEST_CASE("config validation enforces the global caps") {
  ExperimentConfig config;
  config.size = 12;
  CHECK_THROWS(validate_config(config));
  config.size = 6;
  config.p = 0.8;
  config.q = 0.5;  // p > q
  CHECK_THROWS(validate_config(config));
}
