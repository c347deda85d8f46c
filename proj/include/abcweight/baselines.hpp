#pragma once

#include <vector>

#include <Eigen/Core>

#include "abcweight/adapt.hpp"
#include "abcweight/rng.hpp"
#include "abcweight/summaries.hpp"

namespace abcweight {

// w_i = 1 for all i (normalized; selection behavior identical either way).
WeightVector uniform_weights(Eigen::Index kappa);

// w_i = 1 / sd(column i) over a pilot pool of simulated summaries; columns
// with zero variance get weight zero.
WeightVector scaled_weights(const Eigen::MatrixXd& pilot_summaries);

// Per-parameter least-squares fit of the regression target on the polynomial
// expansion [1, s, s^2, s^3, s^4] of the summaries. Projecting a summary
// yields the vector of fitted values, one per parameter.
struct ProjectionMatrix {
  Eigen::MatrixXd coefficients;  // p x (1 + 4*kappa)
  bool ridge_used = false;

  Eigen::VectorXd project(const SummaryVector& summary) const;
};

ProjectionMatrix semiauto_project(const Eigen::MatrixXd& pilot_log10_thetas,
                                  const Eigen::MatrixXd& pilot_summaries);

// Greedy forward selection of summary indices in a seed-fixed random order:
// a statistic stays when adding it moves the single-generation rejection
// posterior by more than `threshold` in estimated Hellinger distance. Never
// returns empty; if nothing clears the threshold the single most influential
// statistic is retained.
std::vector<Eigen::Index> subset_select(const WeightObjectiveContext& ctx, double threshold,
                                        RngEngine& rng);

}  // namespace abcweight
