#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "abcweight/rng.hpp"
#include "abcweight/summaries.hpp"

namespace abcweight {

// Prior flat in log10 of each parameter over [lo_i, hi_i] (natural units).
class PriorSpec {
 public:
  PriorSpec(Eigen::VectorXd lo, Eigen::VectorXd hi);

  int dim() const { return static_cast<int>(lo_.size()); }
  const Eigen::VectorXd& lo() const { return lo_; }
  const Eigen::VectorXd& hi() const { return hi_; }
  const Eigen::VectorXd& log10_lo() const { return log10_lo_; }
  const Eigen::VectorXd& log10_hi() const { return log10_hi_; }

  bool contains_log10(const Eigen::VectorXd& u) const;
  // Constant prior density in log10 coordinates (zero outside the support).
  double density_log10(const Eigen::VectorXd& u) const;

 private:
  Eigen::VectorXd lo_, hi_, log10_lo_, log10_hi_;
  double density_inside_;
};

// Independent Gaussian perturbation kernel in log10 parameter space.
struct KernelSpec {
  Eigen::VectorXd sd_log10;

  explicit KernelSpec(Eigen::VectorXd sd);
  static KernelSpec isotropic(int dim, double sd);

  // Kernel density K(u_from -> u_to) in log10 coordinates.
  double density_log10(const Eigen::VectorXd& u_from, const Eigen::VectorXd& u_to) const;
};

struct Particle {
  Eigen::VectorXd theta;        // natural units
  Eigen::VectorXd log10_theta;  // canonical coordinates for kernel and metrics
  double raw_v = 1.0;           // importance weight before per-population normalization
  double v = 0.0;               // normalized weight
  SummaryVector summary;
  double distance = 0.0;        // +inf marks a failed simulation
  std::int64_t candidate_index = -1;
};

struct Population {
  int generation = 0;  // 1-based
  std::vector<Particle> particles;

  Eigen::MatrixXd log10_thetas() const;  // M x p
  Eigen::VectorXd weights() const;       // normalized v
};

// Draw log10(theta) uniformly over the prior box.
Eigen::VectorXd sample_prior_log10(const PriorSpec& prior, RngEngine& rng);

// One Gaussian jitter of u in log10 space, retried until the proposal lands in
// prior support. Throws after 10^6 consecutive rejections.
Eigen::VectorXd perturb_log10(const Eigen::VectorXd& u, const KernelSpec& kernel,
                              const PriorSpec& prior, RngEngine& rng);

// v = pi(theta) / sum_j v_prev_j K(u_prev_j -> u), densities in log10 space.
double importance_weight(const Eigen::VectorXd& log10_theta, const Population& prev,
                         const KernelSpec& kernel, const PriorSpec& prior);

// Indices of the floor(alpha*N) smallest distances; boundary ties break toward
// the smaller index. Returned sorted ascending.
std::vector<Eigen::Index> select_closest(const std::vector<double>& distances, double alpha_accept);

// Everything a per-generation weight strategy may look at.
struct GenerationView {
  int generation;
  const Eigen::MatrixXd& log10_thetas;   // N x p candidate parameters
  const Eigen::MatrixXd& summaries;      // N x kappa (+inf rows mark failures)
  const SummaryVector& observed_summary;
  const std::vector<double>& raw_importance_weights;  // pre-normalization v
};

using WeightStrategy = std::function<WeightVector(const GenerationView&, RngEngine&)>;

// theta (natural units) -> summary vector; may throw simulation_cap_error,
// which the engine converts into an automatic rejection (+inf distance).
using SimulateFn = std::function<SummaryVector(const Eigen::VectorXd& theta, RngEngine&)>;

struct SmcOptions {
  int num_candidates = 0;  // N per generation
  double alpha_accept = 0.0;
  int generations = 1;
  std::uint64_t root_seed = 1;
  int threads = 1;
};

// ABC-SMC: generation 1 samples the prior; later generations resample the
// previous population, perturb in log10 space, and importance-weight. Each
// generation simulates exactly N candidates and keeps the M = floor(alpha*N)
// closest under that generation's summary weights.
std::vector<Population> run_abc_smc(const SmcOptions& options, const PriorSpec& prior,
                                    const KernelSpec& kernel, const SimulateFn& simulate,
                                    const SummaryVector& observed_summary,
                                    const WeightStrategy& strategy);

}  // namespace abcweight
