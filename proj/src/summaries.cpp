#include "abcweight/summaries.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace abcweight {

WeightVector::WeightVector(Eigen::VectorXd raw) : w_(std::move(raw)) {
  if (w_.size() < 1) throw std::invalid_argument("WeightVector: empty weight vector");
  if (!w_.allFinite() || (w_.array() < 0.0).any()) {
    throw std::invalid_argument("WeightVector: weights must be finite and nonnegative");
  }
  const double total = w_.sum();
  if (total <= 0.0) {
    throw std::invalid_argument("WeightVector: at least one weight must be strictly positive");
  }
  w_ /= total;
}

double weighted_sq_distance(const Eigen::VectorXd& weights, const SummaryVector& a,
                            const SummaryVector& b) {
  if (a.size() != b.size() || weights.size() != a.size()) {
    throw std::invalid_argument("weighted_sq_distance: length mismatch");
  }
  double d = 0.0;
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    const double w = weights[i];
    if (w == 0.0) continue;
    const double diff = a[i] - b[i];
    d += w * diff * diff;
  }
  return d;
}

SummaryVector summarize(const Dataset& dataset, bool toy_sorted) {
  if (dataset.model == ModelId::toy) {
    if (dataset.toy_draws.empty()) throw std::invalid_argument("summarize: toy dataset is empty");
    SummaryVector s(static_cast<Eigen::Index>(dataset.toy_draws.size()));
    std::vector<double> draws = dataset.toy_draws;
    if (toy_sorted) std::sort(draws.begin(), draws.end());
    for (std::size_t i = 0; i < draws.size(); ++i) s[static_cast<Eigen::Index>(i)] = draws[i];
    return s;
  }

  const auto& states = dataset.trajectory.states;
  const Eigen::Index rows = states.rows();
  const Eigen::Index species = states.cols();
  if (rows < 1 || species < 1) throw std::invalid_argument("summarize: empty trajectory");

  switch (dataset.model) {
    case ModelId::death: {
      if (species != 1 || !dataset.trajectory.aux.has_value()) {
        throw std::invalid_argument("summarize: death trajectory needs one species and aux z");
      }
      SummaryVector s(rows + 1);
      for (Eigen::Index j = 0; j < rows; ++j) s[j] = static_cast<double>(states(j, 0));
      s[rows] = *dataset.trajectory.aux;
      return s;
    }
    case ModelId::dimerization:
    case ModelId::diffusion: {
      // Species-major concatenation: full time series of species 1, then 2, ...
      SummaryVector s(rows * species);
      Eigen::Index out = 0;
      for (Eigen::Index sp = 0; sp < species; ++sp) {
        for (Eigen::Index j = 0; j < rows; ++j) s[out++] = static_cast<double>(states(j, sp));
      }
      return s;
    }
    default:
      throw std::invalid_argument("summarize: unsupported model");
  }
}

}  // namespace abcweight
