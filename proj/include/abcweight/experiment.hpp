#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "abcweight/adapt.hpp"
#include "abcweight/baselines.hpp"
#include "abcweight/config.hpp"
#include "abcweight/metrics.hpp"

namespace abcweight {

inline constexpr const char* kVersion = "0.1.0";

struct RunMetrics {
  double hellinger = 0.0;
  double mean_bias = 0.0;
  double mode_bias = 0.0;
  double simulation_seconds = 0.0;
  double search_seconds = 0.0;
  double total_seconds = 0.0;
};

// One complete inference run, before any artifact is written.
struct RunResult {
  ExperimentConfig config;
  SummaryVector observed_summary;
  std::vector<Population> populations;
  std::vector<Eigen::VectorXd> generation_weights;  // distance weights used per generation
  std::vector<WeightTraceRow> trace;                // adaptive only
  std::optional<WeightObjectiveContext> final_context;
  std::optional<ProjectionMatrix> projection;  // semiauto only
  std::vector<Eigen::Index> subset;            // subset only
  RunMetrics metrics;
};

// Builds theta -> summary for the configured model (event-cap failures
// propagate as simulation_cap_error for the SMC engine to absorb).
SimulateFn make_simulator(const ExperimentConfig& config);

// The fixed synthetic observed dataset of the experiment, generated from
// theta_star under a dedicated derived stream.
SummaryVector simulate_observed(const ExperimentConfig& config);

RunResult run_inference(const ExperimentConfig& config, int threads = 1);

struct RunArtifacts {
  std::filesystem::path dir;
  RunMetrics metrics;
  std::string manifest_json;
};

// Runs the experiment and persists particle CSVs, weight traces, metrics and
// a digest-bearing manifest, atomically (temp dir then rename). Fails if
// out_dir already exists.
RunArtifacts run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                            int threads = 1);

// Re-reads a manifest and verifies every recorded file digest.
void verify_artifacts(const std::filesystem::path& dir);

enum class Scale { desk, full };

struct TableCell {
  std::string problem;
  std::string method;
  double hellinger = 0.0;
  double mean_bias = 0.0;
  double mode_bias = 0.0;
  bool failed = false;
  std::string error;
};

struct TableReport {
  int table_id = 0;
  std::vector<TableCell> cells;  // averaged over repeats
  std::vector<TableCell> raw;    // one row per repeat
};

// Table 1: equal-compute comparison. Per problem, runs the adaptive search at
// (N1, a1), converts its measured search time into extra simulations for a
// uniform-weights run at (N2, a2) with the particle count held equal, plus the
// uniform baseline at (N1, a1). Table 2: single-generation rejection
// comparison of adaptive / subset / semiauto. Per-cell failures are reported
// in the cell, not thrown.
TableReport reproduce_table(int table_id, Scale scale, std::uint64_t seed, int threads = 1,
                            int repeats_override = 0,
                            const std::vector<std::string>& problems = {});

struct ConsistencyResult {
  Eigen::MatrixXd weights;              // runs x kappa, final-generation optimum per run
  Eigen::VectorXd mean_trace;           // per-statistic mean over runs
  Eigen::VectorXd mean_centered_trace;  // per-run mean subtracted, then averaged
};

// Repeated adaptive runs under distinct derived seeds (the Figure 5 protocol).
ConsistencyResult consistency_study(const ExperimentConfig& config, int runs, int threads = 1);

}  // namespace abcweight
