#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "abcweight/adapt.hpp"
#include "abcweight/models.hpp"

namespace abcweight {

enum class Method { adaptive, uniform, scaled, semiauto, subset };

Method method_from_string(const std::string& name);
std::string to_string(Method method);

// Raised on malformed or invalid configuration; the message names the field.
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  ModelId model = ModelId::toy;
  int n_observations = 10;  // toy: number of draws r
  Eigen::VectorXi initial_state;  // death: [A(0)]; dimerization: [S1,S2,S3]
  double final_time = 0.0;        // unused by the toy model
  Eigen::VectorXd theta_star;
  int num_simulations = 1000;  // N candidates per generation
  double alpha_accept = 0.05;
  int repeats = 1;
  double proposal_sd = 0.25;
  Eigen::VectorXd prior_lo;
  Eigen::VectorXd prior_hi;
  int generations = 1;
  Method method = Method::adaptive;
  int knn_k = 4;
  OptimizerConfig optimizer;
  std::uint64_t seed = 1;
  ObservationSchedule::Spacing spacing = ObservationSchedule::Spacing::linear;
  int voxels = 8;  // diffusion only
  std::uint64_t event_cap = kDefaultEventCap;
  bool exponent_dim = true;
  bool toy_sorted = true;
  bool resample_posterior_for_estimate = false;
  int n_ref = 1000;  // reference sample size for the Hellinger metric
  double subset_threshold = 0.05;

  int parameter_dim() const { return static_cast<int>(theta_star.size()); }
  int num_kept() const;  // floor(alpha_accept * num_simulations)
  ObservationSchedule schedule() const;
  PriorSpec prior() const;
  KernelSpec kernel() const;
};

// Strict flat key = value file (TOML-flavoured: quoted strings, [..] arrays,
// true/false, # comments). Unknown keys are errors.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& text, const std::string& origin = "<string>");

// Canonical serialization: fixed key order, round-trip exact numbers.
std::string serialize_config(const ExperimentConfig& config);
void save_config(const ExperimentConfig& config, const std::filesystem::path& path);

// FNV-1a digest of the canonical serialization.
std::string config_digest(const ExperimentConfig& config);

// Built-in experiment presets; names list the test problem and scale.
ExperimentConfig preset(const std::string& name);
std::vector<std::string> preset_names();

void validate(const ExperimentConfig& config);

}  // namespace abcweight
