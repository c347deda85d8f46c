#include "abcweight/adapt.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "abcweight/baselines.hpp"

namespace abcweight {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::VectorXd dirichlet_uniform(Eigen::Index kappa, RngEngine& rng) {
  std::exponential_distribution<double> expo(1.0);
  Eigen::VectorXd w(kappa);
  for (Eigen::Index i = 0; i < kappa; ++i) w[i] = expo(rng);
  return w / w.sum();
}

// Systematic resampling: deterministic given the weights, which keeps the
// objective free of hidden randomness when the importance-resample knob is on.
std::vector<Eigen::Index> systematic_resample(const std::vector<Eigen::Index>& indices,
                                              const Eigen::VectorXd& raw_v) {
  const std::size_t m = indices.size();
  double total = 0.0;
  for (Eigen::Index idx : indices) total += raw_v[idx];
  if (!(total > 0.0)) throw std::runtime_error("systematic_resample: weights do not normalize");
  std::vector<Eigen::Index> out;
  out.reserve(m);
  double acc = 0.0;
  std::size_t j = 0;
  for (std::size_t slot = 0; slot < m; ++slot) {
    const double target = (static_cast<double>(slot) + 0.5) / static_cast<double>(m) * total;
    while (j + 1 < m && acc + raw_v[indices[j]] < target) {
      acc += raw_v[indices[j]];
      ++j;
    }
    out.push_back(indices[j]);
  }
  return out;
}

struct NmOutcome {
  Eigen::VectorXd x;
  double value = -kInf;
  int evaluations = 0;
};

// Nelder-Mead maximization with an evaluation budget. The objective here is
// piecewise constant, so this is plateau-hopping rather than convergence; the
// budget, not a tolerance, ends the search.
template <typename F>
NmOutcome nelder_mead_maximize(const F& f, const Eigen::VectorXd& x0, double scale,
                               int max_evaluations) {
  const Eigen::Index dim = x0.size();
  NmOutcome best;
  best.x = x0;
  int evals = 0;
  auto eval = [&](const Eigen::VectorXd& x) {
    const double v = f(x);
    ++evals;
    if (v > best.value) {
      best.value = v;
      best.x = x;
    }
    return v;
  };

  std::vector<Eigen::VectorXd> vertex;
  std::vector<double> value;
  vertex.reserve(static_cast<std::size_t>(dim) + 1);
  vertex.push_back(x0);
  value.push_back(eval(x0));
  for (Eigen::Index i = 0; i < dim && evals < max_evaluations; ++i) {
    Eigen::VectorXd v = x0;
    const double step = (v[i] != 0.0) ? scale * v[i] : scale / static_cast<double>(dim);
    v[i] += step;
    vertex.push_back(v);
    value.push_back(eval(v));
  }

  const std::size_t n_vert = vertex.size();
  if (n_vert < 2) {
    best.evaluations = evals;
    return best;
  }
  std::vector<std::size_t> order(n_vert);

  while (evals < max_evaluations) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&value](std::size_t a, std::size_t b) { return value[a] > value[b]; });
    const std::size_t worst = order.back();
    const std::size_t second_worst = order[n_vert - 2];
    const std::size_t first = order.front();

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(dim);
    for (std::size_t i = 0; i + 1 < n_vert; ++i) centroid += vertex[order[i]];
    centroid /= static_cast<double>(n_vert - 1);

    const Eigen::VectorXd reflected = centroid + (centroid - vertex[worst]);
    const double f_reflected = eval(reflected);

    if (f_reflected > value[first]) {
      if (evals >= max_evaluations) {
        vertex[worst] = reflected;
        value[worst] = f_reflected;
        break;
      }
      const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - vertex[worst]);
      const double f_expanded = eval(expanded);
      if (f_expanded > f_reflected) {
        vertex[worst] = expanded;
        value[worst] = f_expanded;
      } else {
        vertex[worst] = reflected;
        value[worst] = f_reflected;
      }
    } else if (f_reflected > value[second_worst]) {
      vertex[worst] = reflected;
      value[worst] = f_reflected;
    } else {
      if (evals >= max_evaluations) break;
      const Eigen::VectorXd toward =
          (f_reflected > value[worst]) ? reflected : vertex[worst];
      const Eigen::VectorXd contracted = centroid + 0.5 * (toward - centroid);
      const double f_contracted = eval(contracted);
      if (f_contracted > std::max(f_reflected, value[worst])) {
        vertex[worst] = contracted;
        value[worst] = f_contracted;
      } else {
        for (std::size_t i = 1; i < n_vert && evals < max_evaluations; ++i) {
          vertex[order[i]] = vertex[first] + 0.5 * (vertex[order[i]] - vertex[first]);
          value[order[i]] = eval(vertex[order[i]]);
        }
      }
    }
  }
  best.evaluations = evals;
  return best;
}

}  // namespace

Eigen::Index WeightObjectiveContext::num_selected() const {
  const auto m = static_cast<Eigen::Index>(
      std::floor(alpha_accept * static_cast<double>(num_candidates())));
  return m;
}

PreparedObjective::PreparedObjective(const WeightObjectiveContext& ctx) : ctx_(ctx) {
  const Eigen::Index n = ctx.candidate_summaries.rows();
  const Eigen::Index kappa = ctx.candidate_summaries.cols();
  if (n < 1 || kappa < 1) throw std::invalid_argument("objective: empty candidate pool");
  if (ctx.observed_summary.size() != kappa) {
    throw std::invalid_argument("objective: observed summary length mismatch");
  }
  if (ctx.candidate_log10_thetas.rows() != n) {
    throw std::invalid_argument("objective: candidate theta/summary row mismatch");
  }
  m_ = ctx.num_selected();
  if (m_ < 1) throw std::invalid_argument("objective: floor(alpha*N) must be >= 1");
  if (ctx.prior_samples.rows() != m_) {
    throw std::invalid_argument("objective: prior reference sample must have floor(alpha*N) rows");
  }
  if (ctx.prior_samples.cols() != ctx.candidate_log10_thetas.cols()) {
    throw std::invalid_argument("objective: prior/candidate dimension mismatch");
  }
  if (ctx.resample_by_importance && ctx.candidate_raw_v.size() != n) {
    throw std::invalid_argument("objective: importance weights length mismatch");
  }

  failed_.assign(static_cast<std::size_t>(n), 0);
  residual_sq_.resize(n, kappa);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!ctx.candidate_summaries.row(i).allFinite()) {
      failed_[static_cast<std::size_t>(i)] = 1;
      residual_sq_.row(i).setZero();
    } else {
      residual_sq_.row(i) =
          (ctx.candidate_summaries.row(i) - ctx.observed_summary.transpose()).array().square();
    }
  }
}

std::vector<Eigen::Index> PreparedObjective::selected_indices(
    const Eigen::VectorXd& raw_weights) const {
  if (raw_weights.size() != residual_sq_.cols()) {
    throw std::invalid_argument("objective: weight length mismatch");
  }
  if (!raw_weights.allFinite() || (raw_weights.array() < 0.0).any() || !(raw_weights.sum() > 0.0)) {
    throw std::invalid_argument("objective: weights must be nonnegative with a positive entry");
  }
  Eigen::VectorXd distances = residual_sq_ * raw_weights;
  std::vector<double> d(distances.data(), distances.data() + distances.size());
  for (std::size_t i = 0; i < failed_.size(); ++i) {
    if (failed_[i]) d[i] = kInf;
  }
  return select_closest(d, ctx_.alpha_accept);
}

double PreparedObjective::operator()(const Eigen::VectorXd& raw_weights) const {
  std::vector<Eigen::Index> selected = selected_indices(raw_weights);
  if (ctx_.resample_by_importance) {
    selected = systematic_resample(selected, ctx_.candidate_raw_v);
  }
  Eigen::MatrixXd posterior(static_cast<Eigen::Index>(selected.size()),
                            ctx_.candidate_log10_thetas.cols());
  for (std::size_t i = 0; i < selected.size(); ++i) {
    posterior.row(static_cast<Eigen::Index>(i)) = ctx_.candidate_log10_thetas.row(selected[i]);
  }
  const DivergenceEstimate est =
      estimate_alpha_divergence(ctx_.prior_samples, posterior, ctx_.k, 0.5, ctx_.exponent_dim);
  return 1.0 - est.value;
}

double objective_L(const Eigen::VectorXd& raw_weights, const WeightObjectiveContext& ctx) {
  return PreparedObjective(ctx)(raw_weights);
}

OptimizeResult optimize_weights(const WeightObjectiveContext& ctx, const OptimizerConfig& config,
                                RngEngine& rng,
                                const std::optional<Eigen::VectorXd>& previous_best) {
  if (config.restarts < 0) throw std::invalid_argument("optimize_weights: restarts must be >= 0");
  if (config.weight_floor < 0.0) {
    throw std::invalid_argument("optimize_weights: weight floor must be >= 0");
  }
  const Eigen::Index kappa = ctx.candidate_summaries.cols();
  const PreparedObjective prepared(ctx);
  const Eigen::VectorXd uniform = Eigen::VectorXd::Constant(kappa, 1.0 / static_cast<double>(kappa));

  const auto clamped_objective = [&](const Eigen::VectorXd& w) -> double {
    const Eigen::VectorXd c = w.cwiseMax(config.weight_floor);
    if (!c.allFinite() || !(c.sum() > 0.0)) return -kInf;
    try {
      return prepared(c);
    } catch (const std::invalid_argument&) {
      return -kInf;
    }
  };

  if (config.restarts == 0) {
    // Optimizer disabled: uniform weights pass through, value reported once.
    OptimizeResult result{WeightVector(uniform), prepared(uniform), -1, {}};
    return result;
  }

  std::vector<Eigen::VectorXd> starts;
  starts.push_back(uniform);
  // 1/sigma scaling over the finite candidate rows, when usable.
  {
    std::vector<Eigen::Index> finite_rows;
    for (Eigen::Index i = 0; i < ctx.candidate_summaries.rows(); ++i) {
      if (ctx.candidate_summaries.row(i).allFinite()) finite_rows.push_back(i);
    }
    if (finite_rows.size() >= 2) {
      Eigen::MatrixXd pool(static_cast<Eigen::Index>(finite_rows.size()), kappa);
      for (std::size_t i = 0; i < finite_rows.size(); ++i) {
        pool.row(static_cast<Eigen::Index>(i)) = ctx.candidate_summaries.row(finite_rows[i]);
      }
      try {
        starts.push_back(scaled_weights(pool).values());
      } catch (const std::invalid_argument&) {
        // all columns degenerate; skip this start
      }
    }
  }
  if (previous_best.has_value() && previous_best->size() == kappa) {
    starts.push_back(*previous_best);
  }
  while (static_cast<int>(starts.size()) < config.restarts) {
    starts.push_back(dirichlet_uniform(kappa, rng));
  }
  if (static_cast<int>(starts.size()) > config.restarts) {
    starts.resize(static_cast<std::size_t>(config.restarts));
  }

  OptimizeResult result{WeightVector(uniform), -kInf, 0, {}};
  result.restarts.reserve(starts.size());
  for (std::size_t r = 0; r < starts.size(); ++r) {
    const NmOutcome outcome = nelder_mead_maximize(clamped_objective, starts[r],
                                                   config.initial_simplex_scale,
                                                   std::max(1, config.max_evaluations));
    Eigen::VectorXd w = outcome.x.cwiseMax(config.weight_floor);
    if (!(w.sum() > 0.0)) w = starts[r];
    const WeightVector normalized{w};
    result.restarts.push_back(
        {normalized.values(), outcome.value, outcome.evaluations});
    if (outcome.value > result.objective) {
      result.objective = outcome.value;
      result.weights = normalized;
      result.best_restart = static_cast<int>(r);
    }
  }
  return result;
}

std::vector<ScanPoint> scan_line(const WeightVector& w_star, const WeightObjectiveContext& ctx,
                                 double radius, int n_points, RngEngine& rng) {
  if (n_points < 1) throw std::invalid_argument("scan_line: need at least one point");
  if (radius < 0.0) throw std::invalid_argument("scan_line: radius must be nonnegative");
  const Eigen::Index kappa = w_star.size();
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd eta(kappa);
  for (Eigen::Index i = 0; i < kappa; ++i) eta[i] = normal(rng);

  const PreparedObjective prepared(ctx);
  std::vector<ScanPoint> profile;
  profile.reserve(static_cast<std::size_t>(n_points));
  for (int j = 0; j < n_points; ++j) {
    ScanPoint point;
    point.r = (n_points == 1)
                  ? 0.0
                  : -radius + 2.0 * radius * static_cast<double>(j) / static_cast<double>(n_points - 1);
    const Eigen::VectorXd w = w_star.values() + 1e-4 * point.r * eta;
    if ((w.array() < 0.0).any() || !(w.sum() > 0.0)) {
      point.valid = false;
      point.objective = std::numeric_limits<double>::quiet_NaN();
    } else {
      point.valid = true;
      point.objective = prepared(w);
    }
    profile.push_back(point);
  }
  return profile;
}

AdaptiveResult run_adaptive_smc(const AdaptiveOptions& options, const PriorSpec& prior,
                                const KernelSpec& kernel, const SimulateFn& simulate,
                                const SummaryVector& observed_summary) {
  AdaptiveResult result;
  std::optional<Eigen::VectorXd> previous_best;

  const WeightStrategy strategy = [&](const GenerationView& view, RngEngine&) -> WeightVector {
    const auto search_start = std::chrono::steady_clock::now();
    const auto t = static_cast<std::uint64_t>(view.generation);
    const auto m = static_cast<Eigen::Index>(
        std::floor(options.smc.alpha_accept * static_cast<double>(view.summaries.rows())));

    RngEngine xi_rng = make_stream(options.smc.root_seed, Stream::prior_reference, t);
    Eigen::MatrixXd xi(m, prior.dim());
    for (Eigen::Index i = 0; i < m; ++i) xi.row(i) = sample_prior_log10(prior, xi_rng);

    WeightObjectiveContext ctx;
    ctx.prior_samples = std::move(xi);
    ctx.candidate_log10_thetas = view.log10_thetas;
    ctx.candidate_summaries = view.summaries;
    ctx.observed_summary = view.observed_summary;
    ctx.alpha_accept = options.smc.alpha_accept;
    ctx.k = options.k;
    ctx.exponent_dim = options.exponent_dim;
    if (options.resample_by_importance) {
      ctx.candidate_raw_v = Eigen::Map<const Eigen::VectorXd>(
          view.raw_importance_weights.data(),
          static_cast<Eigen::Index>(view.raw_importance_weights.size()));
      ctx.resample_by_importance = true;
    }

    RngEngine opt_rng = make_stream(options.smc.root_seed, Stream::optimizer, t);
    const OptimizeResult opt = optimize_weights(ctx, options.optimizer, opt_rng, previous_best);

    for (std::size_t r = 0; r < opt.restarts.size(); ++r) {
      result.trace.push_back({view.generation, static_cast<int>(r), opt.restarts[r].weights,
                              opt.restarts[r].objective});
    }
    result.chosen_weights.push_back(opt.weights.values());
    previous_best = opt.weights.values();
    if (view.generation == options.smc.generations) {
      result.final_context.clear();
      result.final_context.push_back(std::move(ctx));
    }
    result.weight_search_seconds +=
        std::chrono::duration<double>(std::chrono::steady_clock::now() - search_start).count();
    return opt.weights;
  };

  result.populations =
      run_abc_smc(options.smc, prior, kernel, simulate, observed_summary, strategy);
  return result;
}

}  // namespace abcweight
