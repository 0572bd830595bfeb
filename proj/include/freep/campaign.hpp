#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "freep/free_norm.hpp"
#include "freep/json_io.hpp"
#include "freep/space.hpp"

namespace freep {

enum class InstanceFamily { RandomMetric, Snowflake, TreeLeaves, Grid };
enum class Suite { Norms, Envelope, Distortion, Whitney, Extension };

InstanceFamily family_from_name(const std::string& name);
Suite suite_from_name(const std::string& name);

struct ExperimentConfig {
  std::uint64_t seed = 7;
  InstanceFamily family = InstanceFamily::RandomMetric;
  Suite suite = Suite::Norms;
  int size = 6;  // points per instance; capped so certified norms stay feasible
  double p = 0.5;
  double q = 1.0;
  double R = 2.0;
  int trials = 20;
  bool plant_violation = false;  // corrupt verified objects to exercise failure paths
  std::string out;               // base path; empty writes nothing
};

/// Throws when the configuration breaks a global cap.
void validate_config(const ExperimentConfig& config);

struct Instance {
  SpacePtr space;
  std::vector<int> subset_members;
  Molecule molecule;  // on the ambient space, supported in the subset
  std::optional<WeightedTree> tree;
};

/// Deterministic per (seed, index); the same pair always reproduces the same
/// instance bit for bit.
Instance generate_instance(const ExperimentConfig& config, int index);

struct TrialRecord {
  int index = 0;
  std::string digest;
  double p = 0.0;
  double q = 0.0;
  double value_a = 0.0;
  double value_b = 0.0;
  double bound = 0.0;
  double margin = 0.0;
  bool pass = false;
  std::string note;
};

struct Report {
  std::vector<TrialRecord> records;
  bool all_pass = false;
  double min_margin = 0.0;
  double max_ratio = 0.0;
};

/// Runs the configured suite over `trials` instances (concurrently; records
/// are index-ordered regardless of thread count) and writes <out>.csv and
/// <out>.json when an output base is configured.
Report run_campaign(const ExperimentConfig& config);

std::string instance_digest(const Instance& instance);

/// Fixed columns: instance_digest, p, q, value_a, value_b, bound, margin.
/// The first line is a timestamp comment; everything below it is
/// byte-reproducible for a fixed configuration.
std::string report_to_csv(const Report& report);

json report_to_json(const Report& report);

}  // namespace freep
