#include "abcweight/smc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "abcweight/models.hpp"
#include "abcweight/parallel.hpp"

namespace abcweight {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::VectorXd pow10(const Eigen::VectorXd& u) {
  return u.unaryExpr([](double x) { return std::pow(10.0, x); });
}

}  // namespace

PriorSpec::PriorSpec(Eigen::VectorXd lo, Eigen::VectorXd hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (lo_.size() != hi_.size() || lo_.size() < 1) {
    throw std::invalid_argument("PriorSpec: lo/hi dimension mismatch");
  }
  for (Eigen::Index i = 0; i < lo_.size(); ++i) {
    if (!(lo_[i] > 0.0) || !(lo_[i] < hi_[i]) || !std::isfinite(hi_[i])) {
      throw std::invalid_argument("PriorSpec: intervals must satisfy 0 < lo < hi (dimension " +
                                  std::to_string(i + 1) + ")");
    }
  }
  log10_lo_ = lo_.array().log10();
  log10_hi_ = hi_.array().log10();
  density_inside_ = 1.0 / (log10_hi_ - log10_lo_).prod();
}

bool PriorSpec::contains_log10(const Eigen::VectorXd& u) const {
  if (u.size() != lo_.size()) throw std::invalid_argument("PriorSpec: point dimension mismatch");
  return (u.array() >= log10_lo_.array()).all() && (u.array() <= log10_hi_.array()).all();
}

double PriorSpec::density_log10(const Eigen::VectorXd& u) const {
  return contains_log10(u) ? density_inside_ : 0.0;
}

KernelSpec::KernelSpec(Eigen::VectorXd sd) : sd_log10(std::move(sd)) {
  if (sd_log10.size() < 1 || (sd_log10.array() <= 0.0).any() || !sd_log10.allFinite()) {
    throw std::invalid_argument("KernelSpec: standard deviations must be positive and finite");
  }
}

KernelSpec KernelSpec::isotropic(int dim, double sd) {
  return KernelSpec(Eigen::VectorXd::Constant(dim, sd));
}

double KernelSpec::density_log10(const Eigen::VectorXd& u_from, const Eigen::VectorXd& u_to) const {
  if (u_from.size() != sd_log10.size() || u_to.size() != sd_log10.size()) {
    throw std::invalid_argument("KernelSpec: dimension mismatch");
  }
  double density = 1.0;
  for (Eigen::Index i = 0; i < sd_log10.size(); ++i) {
    const double sd = sd_log10[i];
    const double z = (u_to[i] - u_from[i]) / sd;
    density *= std::exp(-0.5 * z * z) / (sd * std::numbers::sqrt2 * std::sqrt(std::numbers::pi));
  }
  return density;
}

Eigen::MatrixXd Population::log10_thetas() const {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(particles.size()),
                    particles.empty() ? 0 : particles.front().log10_theta.size());
  for (std::size_t i = 0; i < particles.size(); ++i) {
    m.row(static_cast<Eigen::Index>(i)) = particles[i].log10_theta;
  }
  return m;
}

Eigen::VectorXd Population::weights() const {
  Eigen::VectorXd w(static_cast<Eigen::Index>(particles.size()));
  for (std::size_t i = 0; i < particles.size(); ++i) w[static_cast<Eigen::Index>(i)] = particles[i].v;
  return w;
}

Eigen::VectorXd sample_prior_log10(const PriorSpec& prior, RngEngine& rng) {
  Eigen::VectorXd u(prior.dim());
  for (int i = 0; i < prior.dim(); ++i) {
    std::uniform_real_distribution<double> unif(prior.log10_lo()[i], prior.log10_hi()[i]);
    u[i] = unif(rng);
  }
  return u;
}

Eigen::VectorXd perturb_log10(const Eigen::VectorXd& u, const KernelSpec& kernel,
                              const PriorSpec& prior, RngEngine& rng) {
  if (u.size() != kernel.sd_log10.size()) throw std::invalid_argument("perturb_log10: dimension mismatch");
  std::normal_distribution<double> normal(0.0, 1.0);
  constexpr int kMaxRetries = 1'000'000;
  Eigen::VectorXd proposal(u.size());
  for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      proposal[i] = u[i] + kernel.sd_log10[i] * normal(rng);
    }
    if (prior.contains_log10(proposal)) return proposal;
  }
  throw std::runtime_error("perturb_log10: exceeded retry limit; kernel incompatible with prior");
}

double importance_weight(const Eigen::VectorXd& log10_theta, const Population& prev,
                         const KernelSpec& kernel, const PriorSpec& prior) {
  if (prev.particles.empty()) throw std::invalid_argument("importance_weight: empty previous population");
  double denom = 0.0;
  for (const Particle& p : prev.particles) {
    denom += p.v * kernel.density_log10(p.log10_theta, log10_theta);
  }
  if (denom <= 0.0) {
    throw std::runtime_error("importance_weight: kernel mixture underflowed to zero");
  }
  return prior.density_log10(log10_theta) / denom;
}

std::vector<Eigen::Index> select_closest(const std::vector<double>& distances, double alpha_accept) {
  const auto n = static_cast<Eigen::Index>(distances.size());
  if (n < 1) throw std::invalid_argument("select_closest: empty distance vector");
  if (!(alpha_accept > 0.0) || alpha_accept > 1.0) {
    throw std::invalid_argument("select_closest: alpha_accept must lie in (0, 1]");
  }
  const auto m = static_cast<Eigen::Index>(std::floor(alpha_accept * static_cast<double>(n)));
  if (m < 1) {
    throw std::invalid_argument("select_closest: floor(alpha*N) = 0; increase alpha_accept or N");
  }
  for (double d : distances) {
    if (std::isnan(d)) throw std::invalid_argument("select_closest: NaN distance");
  }
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  const auto by_distance_then_index = [&distances](Eigen::Index a, Eigen::Index b) {
    const double da = distances[static_cast<std::size_t>(a)];
    const double db = distances[static_cast<std::size_t>(b)];
    return da < db || (da == db && a < b);
  };
  std::nth_element(idx.begin(), idx.begin() + (m - 1), idx.end(), by_distance_then_index);
  idx.resize(static_cast<std::size_t>(m));
  std::sort(idx.begin(), idx.end());
  return idx;
}

std::vector<Population> run_abc_smc(const SmcOptions& options, const PriorSpec& prior,
                                    const KernelSpec& kernel, const SimulateFn& simulate,
                                    const SummaryVector& observed_summary,
                                    const WeightStrategy& strategy) {
  const int n = options.num_candidates;
  if (n < 1) throw std::invalid_argument("run_abc_smc: num_candidates must be >= 1");
  if (!(options.alpha_accept > 0.0) || options.alpha_accept > 1.0 ||
      static_cast<int>(std::floor(options.alpha_accept * n)) < 1) {
    throw std::invalid_argument("run_abc_smc: alpha_accept must give floor(alpha*N) >= 1");
  }
  if (options.generations < 1) throw std::invalid_argument("run_abc_smc: generations must be >= 1");
  const Eigen::Index kappa = observed_summary.size();
  const int p = prior.dim();

  std::vector<Population> populations;
  populations.reserve(static_cast<std::size_t>(options.generations));

  for (int t = 1; t <= options.generations; ++t) {
    Eigen::MatrixXd log10_thetas(n, p);
    Eigen::MatrixXd thetas(n, p);
    Eigen::MatrixXd summaries(n, kappa);
    std::vector<double> raw_v(static_cast<std::size_t>(n));
    const Population* prev = populations.empty() ? nullptr : &populations.back();

    // CDF of the previous population's normalized weights, for resampling.
    std::vector<double> cdf;
    if (prev != nullptr) {
      cdf.reserve(prev->particles.size());
      double acc = 0.0;
      for (const Particle& particle : prev->particles) {
        acc += particle.v;
        cdf.push_back(acc);
      }
    }

    parallel_for(n, options.threads, [&](std::int64_t i) {
      RngEngine rng = make_stream(options.root_seed,
                                  {static_cast<std::uint64_t>(Stream::candidate),
                                   static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(i)});
      Eigen::VectorXd u;
      if (t == 1) {
        u = sample_prior_log10(prior, rng);
        raw_v[static_cast<std::size_t>(i)] = 1.0;
      } else {
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        const double pick = unif(rng);
        auto it = std::upper_bound(cdf.begin(), cdf.end(), pick);
        const auto parent = std::min<std::size_t>(
            static_cast<std::size_t>(it - cdf.begin()), prev->particles.size() - 1);
        u = perturb_log10(prev->particles[parent].log10_theta, kernel, prior, rng);
        raw_v[static_cast<std::size_t>(i)] = importance_weight(u, *prev, kernel, prior);
      }
      const Eigen::VectorXd theta = pow10(u);
      log10_thetas.row(i) = u;
      thetas.row(i) = theta;
      try {
        const SummaryVector s = simulate(theta, rng);
        if (s.size() != kappa) {
          throw std::invalid_argument("run_abc_smc: simulator returned summary of length " +
                                      std::to_string(s.size()) + ", expected " +
                                      std::to_string(kappa));
        }
        summaries.row(i) = s;
      } catch (const simulation_cap_error&) {
        summaries.row(i).setConstant(kInf);
      }
    });

    const GenerationView view{t, log10_thetas, summaries, observed_summary, raw_v};
    RngEngine strategy_rng =
        make_stream(options.root_seed, Stream::strategy, static_cast<std::uint64_t>(t));
    const WeightVector w = strategy(view, strategy_rng);
    if (w.size() != kappa) {
      throw std::invalid_argument("run_abc_smc: weight strategy returned wrong length");
    }

    std::vector<double> distances(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
      distances[static_cast<std::size_t>(i)] =
          summaries.row(i).allFinite()
              ? weighted_sq_distance(w.values(), summaries.row(i).transpose(), observed_summary)
              : kInf;
    }
    const std::vector<Eigen::Index> selected = select_closest(distances, options.alpha_accept);

    double v_total = 0.0;
    for (Eigen::Index idx : selected) v_total += raw_v[static_cast<std::size_t>(idx)];
    if (!(v_total > 0.0) || !std::isfinite(v_total)) {
      throw std::runtime_error("run_abc_smc: selected importance weights do not normalize");
    }

    Population pop;
    pop.generation = t;
    pop.particles.reserve(selected.size());
    for (Eigen::Index idx : selected) {
      Particle particle;
      particle.theta = thetas.row(idx);
      particle.log10_theta = log10_thetas.row(idx);
      particle.raw_v = raw_v[static_cast<std::size_t>(idx)];
      particle.v = particle.raw_v / v_total;
      particle.summary = summaries.row(idx);
      particle.distance = distances[static_cast<std::size_t>(idx)];
      particle.candidate_index = idx;
      pop.particles.push_back(std::move(particle));
    }
    populations.push_back(std::move(pop));
  }
  return populations;
}

}  // namespace abcweight
