#include "abcweight/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace abcweight {

namespace {

constexpr double kNuFloor = 1e-12;

void check_finite(const SampleSet& s, const char* name) {
  if (!s.allFinite()) {
    throw std::invalid_argument(std::string(name) + ": sample set contains non-finite entries");
  }
}

// k-th smallest of the squared distances from `query` to the rows of `set`,
// skipping `exclude` when nonnegative. Keeps a small insertion-sorted buffer;
// k is tiny compared to n here.
double kth_sq_distance(const SampleSet& set, const Eigen::RowVectorXd& query, int k,
                       Eigen::Index exclude) {
  const Eigen::Index n = set.rows();
  std::vector<double> best(static_cast<std::size_t>(k), std::numeric_limits<double>::infinity());
  Eigen::Index eligible = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (j == exclude) continue;
    ++eligible;
    const double d2 = (set.row(j) - query).squaredNorm();
    if (d2 < best.back()) {
      auto pos = std::upper_bound(best.begin(), best.end(), d2);
      best.pop_back();
      best.insert(pos, d2);
    }
  }
  if (eligible < k) {
    throw std::invalid_argument("knn_distance: fewer than k eligible neighbours (" +
                                std::to_string(eligible) + " < " + std::to_string(k) + ")");
  }
  return best.back();
}

}  // namespace

double b_constant(int k, double alpha) {
  if (k < 2) {
    throw std::invalid_argument("b_constant: k must be >= 2, got " + std::to_string(k));
  }
  const double a1 = static_cast<double>(k) - alpha + 1.0;
  const double a2 = static_cast<double>(k) + alpha - 1.0;
  if (a1 <= 0.0 || a2 <= 0.0) {
    throw std::domain_error("b_constant: gamma argument nonpositive for k=" + std::to_string(k) +
                            ", alpha=" + std::to_string(alpha));
  }
  return std::exp(2.0 * std::lgamma(static_cast<double>(k)) - std::lgamma(a1) - std::lgamma(a2));
}

double knn_distance(const SampleSet& set, Eigen::Index query_index, int k, bool exclude_self) {
  if (k < 1) throw std::invalid_argument("knn_distance: k must be >= 1");
  if (query_index < 0 || query_index >= set.rows()) {
    throw std::invalid_argument("knn_distance: query index out of range");
  }
  check_finite(set, "knn_distance");
  const Eigen::RowVectorXd query = set.row(query_index);
  return std::sqrt(kth_sq_distance(set, query, k, exclude_self ? query_index : Eigen::Index{-1}));
}

double knn_distance_to(const SampleSet& set, const Eigen::RowVectorXd& query, int k) {
  if (k < 1) throw std::invalid_argument("knn_distance_to: k must be >= 1");
  if (query.size() != set.cols()) {
    throw std::invalid_argument("knn_distance_to: query dimension mismatch");
  }
  return std::sqrt(kth_sq_distance(set, query, k, Eigen::Index{-1}));
}

DivergenceEstimate estimate_alpha_divergence(const SampleSet& x, const SampleSet& y, int k,
                                             double alpha, bool exponent_dim) {
  if (x.cols() != y.cols() || x.cols() < 1) {
    throw std::invalid_argument("estimate_alpha_divergence: dimension mismatch (" +
                                std::to_string(x.cols()) + " vs " + std::to_string(y.cols()) + ")");
  }
  if (k < 2) throw std::invalid_argument("estimate_alpha_divergence: k must be >= 2");
  if (x.rows() < k + 1) {
    throw std::invalid_argument("estimate_alpha_divergence: need at least k+1 samples in X");
  }
  if (y.rows() < k) {
    throw std::invalid_argument("estimate_alpha_divergence: need at least k samples in Y");
  }
  check_finite(x, "estimate_alpha_divergence(X)");
  check_finite(y, "estimate_alpha_divergence(Y)");

  const double b = b_constant(k, alpha);
  const auto n_x = x.rows();
  const auto n_y = y.rows();
  const double e = exponent_dim ? static_cast<double>(x.cols()) : 1.0;
  const double expnt = 1.0 - alpha;

  // Per-point terms collected first, then reduced in index order so the
  // result does not depend on evaluation order.
  std::vector<double> terms(static_cast<std::size_t>(n_x));
  for (Eigen::Index i = 0; i < n_x; ++i) {
    const Eigen::RowVectorXd query = x.row(i);
    const double rho = std::sqrt(kth_sq_distance(x, query, k, i));
    double nu = std::sqrt(kth_sq_distance(y, query, k, Eigen::Index{-1}));
    if (nu < kNuFloor) nu = kNuFloor;
    const double ratio =
        (static_cast<double>(n_x - 1) * std::pow(rho, e)) / (static_cast<double>(n_y) * std::pow(nu, e));
    terms[static_cast<std::size_t>(i)] = std::pow(ratio, expnt);
  }
  double sum = 0.0;
  for (double t : terms) sum += t;

  DivergenceEstimate est;
  est.value = sum / static_cast<double>(n_x) * b;
  est.alpha = alpha;
  est.k = k;
  est.n_x = n_x;
  est.n_y = n_y;
  est.clamped = false;
  return est;
}

DivergenceEstimate estimate_hellinger(const SampleSet& x, const SampleSet& y, int k,
                                      bool exponent_dim) {
  DivergenceEstimate est = estimate_alpha_divergence(x, y, k, 0.5, exponent_dim);
  est.value = 1.0 - est.value;
  if (est.value < 0.0) {
    est.value = 0.0;
    est.clamped = true;
  } else if (est.value > 1.0) {
    est.value = 1.0;
    est.clamped = true;
  }
  return est;
}

}  // namespace abcweight
