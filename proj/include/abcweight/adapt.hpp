#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "abcweight/divergence.hpp"
#include "abcweight/rng.hpp"
#include "abcweight/smc.hpp"
#include "abcweight/summaries.hpp"

namespace abcweight {

// Inputs of the per-generation weight objective
//   L(w) = 1 - D_hat_{1/2}(prior samples || M closest candidates under w).
// prior_samples are fresh prior draws in log10 coordinates, fixed for the
// generation so L is deterministic during the search.
struct WeightObjectiveContext {
  Eigen::MatrixXd prior_samples;           // M x p (log10)
  Eigen::MatrixXd candidate_log10_thetas;  // N x p (log10)
  Eigen::MatrixXd candidate_summaries;     // N x kappa; +inf rows mark failures
  SummaryVector observed_summary;
  double alpha_accept = 0.0;  // M = floor(alpha * N)
  int k = 4;
  bool exponent_dim = true;

  // Sensitivity-study knob: deterministically (systematic) resample the
  // selected candidates by their importance weights before estimation instead
  // of feeding them in unweighted.
  Eigen::VectorXd candidate_raw_v;  // size 0 when unused
  bool resample_by_importance = false;

  Eigen::Index num_candidates() const { return candidate_summaries.rows(); }
  Eigen::Index num_selected() const;  // floor(alpha * N)
};

// Precomputes the squared-residual matrix so repeated evaluations during the
// search cost one mat-vec, a selection, and one divergence estimate.
class PreparedObjective {
 public:
  explicit PreparedObjective(const WeightObjectiveContext& ctx);

  // Raw (pre-normalization) weights; scale-invariant by ranking invariance.
  double operator()(const Eigen::VectorXd& raw_weights) const;
  std::vector<Eigen::Index> selected_indices(const Eigen::VectorXd& raw_weights) const;

 private:
  const WeightObjectiveContext& ctx_;
  Eigen::MatrixXd residual_sq_;  // N x kappa, failed rows zeroed
  std::vector<char> failed_;
  Eigen::Index m_;
};

double objective_L(const Eigen::VectorXd& raw_weights, const WeightObjectiveContext& ctx);

struct OptimizerConfig {
  // Total number of starts; 0 disables the search (uniform weights pass
  // through untouched). Starts are uniform, the 1/sigma scaling, the previous
  // generation's optimum when available, then random Dirichlet draws.
  int restarts = 6;
  int max_evaluations = 200;        // objective evaluations per restart
  double initial_simplex_scale = 0.25;
  double weight_floor = 0.0;        // proposals clamp here; 0 permits exact zeros
};

struct RestartResult {
  Eigen::VectorXd weights;  // normalized
  double objective;
  int evaluations;
};

struct OptimizeResult {
  WeightVector weights;
  double objective;
  int best_restart;
  std::vector<RestartResult> restarts;
};

// Multi-start Nelder-Mead maximization of L over the weight simplex. The
// objective is piecewise constant in w, so this is plateau search: diverse
// starts matter more than local polish. The result is never below the
// uniform-weights objective (uniform is always evaluated).
OptimizeResult optimize_weights(const WeightObjectiveContext& ctx, const OptimizerConfig& config,
                                RngEngine& rng,
                                const std::optional<Eigen::VectorXd>& previous_best = std::nullopt);

struct ScanPoint {
  double r = 0.0;
  double objective = 0.0;
  bool valid = false;  // false when the line leaves the nonnegative orthant
};

// Profile of L along w = w_star + 1e-4 * r * eta with eta ~ N(0, I), r spread
// evenly over [-radius, radius]. Exposes the plateau structure of L.
std::vector<ScanPoint> scan_line(const WeightVector& w_star, const WeightObjectiveContext& ctx,
                                 double radius, int n_points, RngEngine& rng);

struct WeightTraceRow {
  int generation;
  int restart;
  Eigen::VectorXd weights;  // normalized
  double objective;
};

struct AdaptiveOptions {
  SmcOptions smc;
  int k = 4;
  bool exponent_dim = true;
  OptimizerConfig optimizer;
  bool resample_by_importance = false;
};

struct AdaptiveResult {
  std::vector<Population> populations;
  std::vector<WeightTraceRow> trace;
  std::vector<Eigen::VectorXd> chosen_weights;        // per generation, normalized
  std::vector<WeightObjectiveContext> final_context;  // last generation's ctx (for scans)
  double weight_search_seconds = 0.0;                 // wall clock spent optimizing
};

// Algorithm-1 flow with per-generation weight optimization: simulate N
// candidates, draw M fresh prior reference samples, maximize L, select under
// the optimum, importance-weight as usual.
AdaptiveResult run_adaptive_smc(const AdaptiveOptions& options, const PriorSpec& prior,
                                const KernelSpec& kernel, const SimulateFn& simulate,
                                const SummaryVector& observed_summary);

}  // namespace abcweight
