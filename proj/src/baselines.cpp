#include "abcweight/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include "abcweight/divergence.hpp"

namespace abcweight {

WeightVector uniform_weights(Eigen::Index kappa) {
  if (kappa < 1) throw std::invalid_argument("uniform_weights: kappa must be >= 1");
  return WeightVector(Eigen::VectorXd::Ones(kappa));
}

WeightVector scaled_weights(const Eigen::MatrixXd& pilot_summaries) {
  const Eigen::Index n = pilot_summaries.rows();
  const Eigen::Index kappa = pilot_summaries.cols();
  if (n < 2) throw std::invalid_argument("scaled_weights: need at least two pilot rows");
  if (!pilot_summaries.allFinite()) {
    throw std::invalid_argument("scaled_weights: pilot pool contains non-finite entries");
  }
  Eigen::VectorXd w(kappa);
  for (Eigen::Index j = 0; j < kappa; ++j) {
    const double mean = pilot_summaries.col(j).mean();
    const double ss = (pilot_summaries.col(j).array() - mean).square().sum();
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    w[j] = (sd > 0.0) ? 1.0 / sd : 0.0;
  }
  if (!(w.sum() > 0.0)) {
    throw std::invalid_argument("scaled_weights: every summary column has zero variance");
  }
  return WeightVector(std::move(w));
}

namespace {

Eigen::MatrixXd polynomial_design(const Eigen::MatrixXd& summaries) {
  const Eigen::Index m = summaries.rows();
  const Eigen::Index kappa = summaries.cols();
  Eigen::MatrixXd design(m, 1 + 4 * kappa);
  design.col(0).setOnes();
  for (int power = 1; power <= 4; ++power) {
    design.block(0, 1 + (power - 1) * kappa, m, kappa) =
        summaries.array().pow(static_cast<double>(power));
  }
  return design;
}

}  // namespace

Eigen::VectorXd ProjectionMatrix::project(const SummaryVector& summary) const {
  const Eigen::Index kappa = summary.size();
  if (coefficients.cols() != 1 + 4 * kappa) {
    throw std::invalid_argument("ProjectionMatrix: summary length mismatch");
  }
  Eigen::MatrixXd row(1, kappa);
  row.row(0) = summary;
  const Eigen::MatrixXd design = polynomial_design(row);
  return coefficients * design.row(0).transpose();
}

ProjectionMatrix semiauto_project(const Eigen::MatrixXd& pilot_log10_thetas,
                                  const Eigen::MatrixXd& pilot_summaries) {
  const Eigen::Index m = pilot_summaries.rows();
  const Eigen::Index p = pilot_log10_thetas.cols();
  if (pilot_log10_thetas.rows() != m || m < 2 || p < 1) {
    throw std::invalid_argument("semiauto_project: pilot shape mismatch");
  }
  if (!pilot_summaries.allFinite() || !pilot_log10_thetas.allFinite()) {
    throw std::invalid_argument("semiauto_project: pilot contains non-finite entries");
  }
  const Eigen::MatrixXd design = polynomial_design(pilot_summaries);
  const Eigen::Index cols = design.cols();

  ProjectionMatrix proj;
  proj.coefficients.resize(p, cols);

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  const bool full_rank = (m >= cols) && (qr.rank() == cols);
  if (full_rank) {
    for (Eigen::Index j = 0; j < p; ++j) {
      proj.coefficients.row(j) = qr.solve(pilot_log10_thetas.col(j)).transpose();
    }
    proj.ridge_used = false;
  } else {
    // Rank-deficient or underdetermined design: ridge on the Gram diagonal.
    const double lambda = 1e-8;
    Eigen::MatrixXd gram = design.transpose() * design;
    gram.diagonal().array() += lambda;
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    for (Eigen::Index j = 0; j < p; ++j) {
      proj.coefficients.row(j) =
          ldlt.solve(design.transpose() * pilot_log10_thetas.col(j)).transpose();
    }
    proj.ridge_used = true;
  }
  return proj;
}

namespace {

// Single-generation rejection selection under an indicator subset of the
// summaries. An empty subset gives zero distance everywhere, so the tie rule
// keeps the first M non-failed candidates.
std::vector<Eigen::Index> subset_selection(const WeightObjectiveContext& ctx,
                                           const std::vector<char>& included) {
  const Eigen::Index n = ctx.candidate_summaries.rows();
  const Eigen::Index kappa = ctx.candidate_summaries.cols();
  std::vector<double> distances(static_cast<std::size_t>(n), 0.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!ctx.candidate_summaries.row(i).allFinite()) {
      distances[static_cast<std::size_t>(i)] = std::numeric_limits<double>::infinity();
      continue;
    }
    double d = 0.0;
    for (Eigen::Index j = 0; j < kappa; ++j) {
      if (!included[static_cast<std::size_t>(j)]) continue;
      const double diff = ctx.candidate_summaries(i, j) - ctx.observed_summary[j];
      d += diff * diff;
    }
    distances[static_cast<std::size_t>(i)] = d;
  }
  return select_closest(distances, ctx.alpha_accept);
}

Eigen::MatrixXd gather_thetas(const WeightObjectiveContext& ctx,
                              const std::vector<Eigen::Index>& rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), ctx.candidate_log10_thetas.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = ctx.candidate_log10_thetas.row(rows[i]);
  }
  return out;
}

}  // namespace

std::vector<Eigen::Index> subset_select(const WeightObjectiveContext& ctx, double threshold,
                                        RngEngine& rng) {
  if (!(threshold > 0.0) || !(threshold < 1.0)) {
    throw std::invalid_argument("subset_select: threshold must lie in (0, 1)");
  }
  const Eigen::Index kappa = ctx.candidate_summaries.cols();
  if (kappa == 1) return {0};

  std::vector<Eigen::Index> order(static_cast<std::size_t>(kappa));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<char> accepted(static_cast<std::size_t>(kappa), 0);
  std::vector<Eigen::Index> current_selection = subset_selection(ctx, accepted);
  Eigen::MatrixXd current_thetas = gather_thetas(ctx, current_selection);

  Eigen::Index fallback = order.front();
  double fallback_change = -1.0;
  bool any_accepted = false;

  for (Eigen::Index candidate : order) {
    accepted[static_cast<std::size_t>(candidate)] = 1;
    const std::vector<Eigen::Index> trial_selection = subset_selection(ctx, accepted);
    const Eigen::MatrixXd trial_thetas = gather_thetas(ctx, trial_selection);
    const double change =
        estimate_hellinger(current_thetas, trial_thetas, ctx.k, ctx.exponent_dim).value;
    if (change > threshold) {
      any_accepted = true;
      current_selection = trial_selection;
      current_thetas = trial_thetas;
    } else {
      accepted[static_cast<std::size_t>(candidate)] = 0;
      if (change > fallback_change) {
        fallback_change = change;
        fallback = candidate;
      }
    }
  }

  std::vector<Eigen::Index> subset;
  if (any_accepted) {
    for (Eigen::Index j = 0; j < kappa; ++j) {
      if (accepted[static_cast<std::size_t>(j)]) subset.push_back(j);
    }
  } else {
    subset.push_back(fallback);
  }
  return subset;
}

}  // namespace abcweight
