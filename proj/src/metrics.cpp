#include "abcweight/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "abcweight/divergence.hpp"

namespace abcweight {

namespace {

std::vector<double> weight_cdf(const Population& pop) {
  std::vector<double> cdf;
  cdf.reserve(pop.particles.size());
  double acc = 0.0;
  for (const Particle& p : pop.particles) {
    acc += p.v;
    cdf.push_back(acc);
  }
  return cdf;
}

}  // namespace

double metric_hellinger_prior_posterior(const Population& pop, const PriorSpec& prior, int n_ref,
                                        int k, RngEngine& rng, bool exponent_dim) {
  if (pop.particles.empty()) throw std::invalid_argument("metric: empty population");
  if (n_ref < k + 1) throw std::invalid_argument("metric: n_ref must be at least k+1");
  const int p = prior.dim();

  Eigen::MatrixXd prior_set(n_ref, p);
  for (int i = 0; i < n_ref; ++i) prior_set.row(i) = sample_prior_log10(prior, rng);

  const std::vector<double> cdf = weight_cdf(pop);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::MatrixXd posterior_set(n_ref, p);
  for (int i = 0; i < n_ref; ++i) {
    const double u = unif(rng);
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()),
                                           pop.particles.size() - 1);
    posterior_set.row(i) = pop.particles[idx].log10_theta;
  }
  return estimate_hellinger(prior_set, posterior_set, k, exponent_dim).value;
}

BiasMetrics metric_bias(const Population& pop, const Eigen::VectorXd& theta_star) {
  if (pop.particles.empty()) throw std::invalid_argument("metric_bias: empty population");
  const Eigen::Index p = theta_star.size();
  if (pop.particles.front().log10_theta.size() != p) {
    throw std::invalid_argument("metric_bias: dimension mismatch");
  }
  const Eigen::VectorXd target = theta_star.array().log10();
  const auto m = static_cast<Eigen::Index>(pop.particles.size());

  Eigen::VectorXd mean = Eigen::VectorXd::Zero(p);
  for (const Particle& particle : pop.particles) mean += particle.v * particle.log10_theta;

  BiasMetrics out;
  out.mean_bias = (mean - target).norm();

  // Weighted per-dimension variance for the Silverman bandwidths.
  Eigen::VectorXd var = Eigen::VectorXd::Zero(p);
  for (const Particle& particle : pop.particles) {
    var += particle.v * (particle.log10_theta - mean).array().square().matrix();
  }
  const double silverman =
      std::pow(4.0 / ((static_cast<double>(p) + 2.0) * static_cast<double>(m)),
               1.0 / (static_cast<double>(p) + 4.0));
  Eigen::VectorXd bandwidth = var.array().sqrt() * silverman;

  Eigen::Index mode_index = 0;
  double best_density = -1.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::VectorXd& x = pop.particles[static_cast<std::size_t>(i)].log10_theta;
    double density = 0.0;
    for (const Particle& particle : pop.particles) {
      double kernel = particle.v;
      for (Eigen::Index j = 0; j < p; ++j) {
        const double h = bandwidth[j];
        if (h <= 0.0) continue;  // degenerate dimension: all mass at one value
        const double z = (x[j] - particle.log10_theta[j]) / h;
        kernel *= std::exp(-0.5 * z * z) / h;
      }
      density += kernel;
    }
    if (density > best_density) {
      best_density = density;
      mode_index = i;
    }
  }
  out.mode_bias = (pop.particles[static_cast<std::size_t>(mode_index)].log10_theta - target).norm();
  return out;
}

std::pair<double, double> weighted_central_interval(const Population& pop, int dim,
                                                    double coverage) {
  if (pop.particles.empty()) throw std::invalid_argument("interval: empty population");
  if (!(coverage > 0.0) || coverage >= 1.0) {
    throw std::invalid_argument("interval: coverage must lie in (0, 1)");
  }
  std::vector<std::pair<double, double>> points;  // (value, weight)
  points.reserve(pop.particles.size());
  for (const Particle& p : pop.particles) points.emplace_back(p.log10_theta[dim], p.v);
  std::sort(points.begin(), points.end());

  const double tail = (1.0 - coverage) / 2.0;
  auto quantile = [&points](double q) {
    double acc = 0.0;
    for (const auto& [value, weight] : points) {
      acc += weight;
      if (acc >= q) return value;
    }
    return points.back().first;
  };
  return {quantile(tail), quantile(1.0 - tail)};
}

}  // namespace abcweight
