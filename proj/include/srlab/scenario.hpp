#pragma once

#include "srlab/config.hpp"
#include "srlab/domain.hpp"
#include "srlab/sampling.hpp"

#include <json.hpp>

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace srlab {

using Json = nlohmann::ordered_json;

// model ids: round-sphere(d), heisenberg(d), carnot-step2(<spec file>), martinet,
// chf(d), qhf(d), spherical-band(eps)
std::shared_ptr<Model> make_model(const std::string& id, const std::string& base_dir = ".");

extern const std::vector<std::string> kKnownChecks;

struct ScenarioParams {
  double t_max = 0.0;
  double flow_rtol = 1e-11;
  std::size_t flow_max_steps = 500000;
  // reduction
  std::size_t reduction_samples = 200;
  double reduction_tol = 1e-9;
  bool expect_reduction = true;
  // santalo
  std::size_t santalo_samples = 20000;
  std::vector<std::string> santalo_functions{"one"};
  bool expect_balance = true;
  int half_fiber_axis = -1;  // -1: first non-polar chart axis
  // visibility
  std::size_t visibility_points = 16;
  std::size_t visibility_fiber = 64;
  bool expect_full_visibility = false;
  // hardy
  std::size_t hardy_samples = 20000;
  std::string test_function = "cos_delta";
  double bump_radius = 0.7;
  std::vector<double> bump_center;
  std::vector<double> p_values{2.0};
  // lambda1
  std::size_t lambda1_samples = 2000;
  double lambda1_l_tol = 1e-4;
  // isoperimetric
  std::size_t iso_boundary = 4000;
  std::size_t iso_points = 16;
  std::size_t iso_fiber = 64;
  // spectral
  std::string spectral_case;
  int spectral_d = 0;
  int spectral_grid = 4096;
  // carnot
  std::size_t carnot_samples = 400;
  std::size_t carnot_boundary = 4000;
  // radii export
  std::size_t radii_points = 8;
  double radii_p = 2.0;
};

struct Scenario {
  std::string name;
  std::string model_id;
  std::string domain_kind;
  std::vector<std::string> checks;
  std::uint64_t seed = 1;
  ScenarioParams params;
  std::shared_ptr<Model> model;
  std::shared_ptr<Domain> domain;  // null for domain = none
  Json config;                     // echo of the parsed keys
};

// validates keys, check names and the model/domain combination; ConfigError on problems
Scenario build_scenario(const Config& cfg, const std::string& base_dir = ".");
Scenario load_scenario(const std::string& path);

struct RunOptions {
  std::optional<std::uint64_t> seed;
  int threads = 0;
  Execution exec = Execution::Parallel;
  std::string out_dir;  // empty: no files written
};

struct RunOutcome {
  Json report;
  bool pass = true;
  bool numeric_error = false;
  std::vector<std::string> files;
};

RunOutcome run_scenario(const Scenario& sc, const RunOptions& opts);

// report serialization without the run_info section, used for comparisons
std::string canonical_dump(const Json& report);

}  // namespace srlab
