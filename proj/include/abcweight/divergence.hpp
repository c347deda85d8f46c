#pragma once

#include <Eigen/Core>

namespace abcweight {

// An n x d matrix of points, one sample per row.
using SampleSet = Eigen::MatrixXd;

struct DivergenceEstimate {
  double value = 0.0;
  double alpha = 0.0;
  int k = 0;
  Eigen::Index n_x = 0;
  Eigen::Index n_y = 0;
  bool clamped = false;
};

// B_{k,alpha} = Gamma(k)^2 / (Gamma(k-alpha+1) * Gamma(k+alpha-1)),
// evaluated through log-gamma so large k stays finite.
double b_constant(int k, double alpha);

// Euclidean distance from set.row(query_index) to its k-th nearest neighbour
// in `set` (nondecreasing distance order, so ties resolve to the k-th sorted
// element). With exclude_self the query row itself is not a candidate.
double knn_distance(const SampleSet& set, Eigen::Index query_index, int k, bool exclude_self);

// k-th nearest neighbour distance from an arbitrary query point into `set`.
double knn_distance_to(const SampleSet& set, const Eigen::RowVectorXd& query, int k);

// Nearest-neighbour estimator of the alpha-divergence D_alpha(X || Y):
//   (1/n_x) * sum_i ((n_x-1) rho_k(i)^e / (n_y nu_k(i)^e))^(1-alpha) * B_{k,alpha}
// rho_k: k-th NN distance of X_i within X (self excluded); nu_k: k-th NN
// distance of X_i into Y. e = d when exponent_dim, else 1 (the two agree for
// d = 1). nu distances of zero (duplicate points across sets) are floored at
// 1e-12. The estimator is intentionally asymmetric in X and Y.
DivergenceEstimate estimate_alpha_divergence(const SampleSet& x, const SampleSet& y, int k,
                                             double alpha, bool exponent_dim = true);

// Hellinger distance estimate 1 - D_{1/2}(X || Y), clamped to [0,1] with the
// clamped flag set when clamping occurred.
DivergenceEstimate estimate_hellinger(const SampleSet& x, const SampleSet& y, int k,
                                      bool exponent_dim = true);

}  // namespace abcweight
