#pragma once

#include <Eigen/Core>

#include "abcweight/rng.hpp"
#include "abcweight/smc.hpp"

namespace abcweight {

// Estimated Hellinger distance between the prior and the population, both as
// n_ref-point samples in log10 parameter coordinates. The population is
// resampled by its importance weights to equally weighted points.
double metric_hellinger_prior_posterior(const Population& pop, const PriorSpec& prior, int n_ref,
                                        int k, RngEngine& rng, bool exponent_dim = true);

struct BiasMetrics {
  double mean_bias = 0.0;  // |E_w[log10 theta] - log10 theta*|
  double mode_bias = 0.0;  // same distance to the KDE mode estimate
};

// Both biases are Euclidean distances in log10 parameter space. The mode is
// the argmax over particle locations of an importance-weighted Gaussian
// product KDE with per-dimension Silverman bandwidths.
BiasMetrics metric_bias(const Population& pop, const Eigen::VectorXd& theta_star);

// Central interval [lo, hi] of one marginal in log10 coordinates at the given
// coverage (e.g. 0.9), from the weighted empirical quantiles.
std::pair<double, double> weighted_central_interval(const Population& pop, int dim,
                                                    double coverage);

}  // namespace abcweight
