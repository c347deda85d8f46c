#pragma once

#include <vector>

#include <Eigen/Core>

#include "abcweight/models.hpp"

namespace abcweight {

using SummaryVector = Eigen::VectorXd;

// Nonnegative per-summary weights of the ABC distance, stored normalized to
// the unit simplex. Normalizing loses no generality: candidate rankings under
// w and c*w are identical for any c > 0.
class WeightVector {
 public:
  explicit WeightVector(Eigen::VectorXd raw);

  const Eigen::VectorXd& values() const { return w_; }
  Eigen::Index size() const { return w_.size(); }
  double operator[](Eigen::Index i) const { return w_[i]; }

 private:
  Eigen::VectorXd w_;
};

// Sum_i w_i (a_i - b_i)^2 over the raw (not necessarily normalized) weights.
// Zero-weight coordinates are masked entirely, so a +inf sentinel summary
// (failed simulation) still yields a +inf distance rather than NaN.
double weighted_sq_distance(const Eigen::VectorXd& weights, const SummaryVector& a,
                            const SummaryVector& b);

inline double weighted_sq_distance(const WeightVector& weights, const SummaryVector& a,
                                   const SummaryVector& b) {
  return weighted_sq_distance(weights.values(), a, b);
}

// One simulated dataset; either a trajectory (SSA models) or raw draws (toy).
struct Dataset {
  ModelId model;
  Trajectory trajectory;
  std::vector<double> toy_draws;
};

// Flattens a dataset into the summary vector used by the ABC distance:
//   toy           -> the r draws, sorted ascending when toy_sorted
//   death         -> the n+1 counts then z            (kappa = n+2)
//   dimerization  -> S1, S2, S3 series concatenated   (kappa = 3(n+1))
//   diffusion     -> per-voxel series concatenated    (kappa = m(n+1))
SummaryVector summarize(const Dataset& dataset, bool toy_sorted = true);

}  // namespace abcweight
