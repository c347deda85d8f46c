#include "abcweight/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "abcweight/csv.hpp"
#include "abcweight/digest.hpp"
#include "abcweight/parallel.hpp"

namespace abcweight {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

SimulateFn make_simulator(const ExperimentConfig& config) {
  switch (config.model) {
    case ModelId::toy: {
      const int r = config.n_observations;
      const bool sorted = config.toy_sorted;
      return [r, sorted](const Eigen::VectorXd& theta, RngEngine& rng) {
        Dataset d;
        d.model = ModelId::toy;
        d.toy_draws = simulate_toy(theta[0], r, rng);
        return summarize(d, sorted);
      };
    }
    case ModelId::death: {
      const ObservationSchedule schedule = config.schedule();
      const int a0 = config.initial_state[0];
      const std::uint64_t cap = config.event_cap;
      return [schedule, a0, cap](const Eigen::VectorXd& theta, RngEngine& rng) {
        Dataset d;
        d.model = ModelId::death;
        d.trajectory = simulate_death(theta[0], theta[1], a0, schedule, rng, cap);
        return summarize(d);
      };
    }
    case ModelId::dimerization: {
      const ObservationSchedule schedule = config.schedule();
      const Eigen::VectorXi init = config.initial_state;
      const std::uint64_t cap = config.event_cap;
      return [schedule, init, cap](const Eigen::VectorXd& theta, RngEngine& rng) {
        Dataset d;
        d.model = ModelId::dimerization;
        d.trajectory = simulate_dimerization(theta, init, schedule, rng, cap);
        return summarize(d);
      };
    }
    case ModelId::diffusion: {
      const ObservationSchedule schedule = config.schedule();
      const int voxels = config.voxels;
      const std::uint64_t cap = config.event_cap;
      return [schedule, voxels, cap](const Eigen::VectorXd& theta, RngEngine& rng) {
        Dataset d;
        d.model = ModelId::diffusion;
        d.trajectory = simulate_diffusion(theta[0], voxels, schedule, rng, cap);
        return summarize(d);
      };
    }
  }
  throw std::logic_error("unreachable model id");
}

SummaryVector simulate_observed(const ExperimentConfig& config) {
  RngEngine rng = make_stream(config.seed, Stream::observed_data);
  return make_simulator(config)(config.theta_star, rng);
}

namespace {

struct PilotPool {
  Eigen::MatrixXd log10_thetas;  // N x p
  Eigen::MatrixXd summaries;     // N x kappa (+inf rows mark failures)
};

// Prior-sampled candidate pool under its own seed stream, used by the subset
// and semiauto pilot phases.
PilotPool build_pilot_pool(const ExperimentConfig& config, const SimulateFn& simulate,
                           Eigen::Index kappa, std::uint64_t pilot_root, int threads) {
  const PriorSpec prior = config.prior();
  const int n = config.num_simulations;
  PilotPool pool;
  pool.log10_thetas.resize(n, prior.dim());
  pool.summaries.resize(n, kappa);
  parallel_for(n, threads, [&](std::int64_t i) {
    RngEngine rng = make_stream(pilot_root, {static_cast<std::uint64_t>(Stream::candidate), 1,
                                             static_cast<std::uint64_t>(i)});
    const Eigen::VectorXd u = sample_prior_log10(prior, rng);
    const Eigen::VectorXd theta = u.unaryExpr([](double x) { return std::pow(10.0, x); });
    pool.log10_thetas.row(i) = u;
    try {
      pool.summaries.row(i) = simulate(theta, rng);
    } catch (const simulation_cap_error&) {
      pool.summaries.row(i).setConstant(std::numeric_limits<double>::infinity());
    }
  });
  return pool;
}

}  // namespace

RunResult run_inference(const ExperimentConfig& config, int threads) {
  validate(config);
  const auto start = Clock::now();

  RunResult result;
  result.config = config;
  const PriorSpec prior = config.prior();
  const KernelSpec kernel = config.kernel();

  auto sim_nanos = std::make_shared<std::atomic<std::int64_t>>(0);
  const SimulateFn base_simulate = make_simulator(config);
  const SimulateFn simulate = [base_simulate, sim_nanos](const Eigen::VectorXd& theta,
                                                         RngEngine& rng) {
    const auto t0 = Clock::now();
    try {
      SummaryVector s = base_simulate(theta, rng);
      sim_nanos->fetch_add(
          std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - t0).count());
      return s;
    } catch (...) {
      sim_nanos->fetch_add(
          std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - t0).count());
      throw;
    }
  };

  result.observed_summary = simulate_observed(config);
  const Eigen::Index kappa = result.observed_summary.size();

  SmcOptions smc;
  smc.num_candidates = config.num_simulations;
  smc.alpha_accept = config.alpha_accept;
  smc.generations = config.generations;
  smc.root_seed = config.seed;
  smc.threads = threads;

  switch (config.method) {
    case Method::uniform: {
      const WeightStrategy strategy = [&result](const GenerationView& view,
                                                RngEngine&) -> WeightVector {
        WeightVector w = uniform_weights(view.summaries.cols());
        result.generation_weights.push_back(w.values());
        return w;
      };
      result.populations =
          run_abc_smc(smc, prior, kernel, simulate, result.observed_summary, strategy);
      break;
    }
    case Method::scaled: {
      const WeightStrategy strategy = [&result](const GenerationView& view,
                                                RngEngine&) -> WeightVector {
        std::vector<Eigen::Index> finite_rows;
        for (Eigen::Index i = 0; i < view.summaries.rows(); ++i) {
          if (view.summaries.row(i).allFinite()) finite_rows.push_back(i);
        }
        Eigen::MatrixXd pool(static_cast<Eigen::Index>(finite_rows.size()), view.summaries.cols());
        for (std::size_t i = 0; i < finite_rows.size(); ++i) {
          pool.row(static_cast<Eigen::Index>(i)) = view.summaries.row(finite_rows[i]);
        }
        WeightVector w = scaled_weights(pool);
        result.generation_weights.push_back(w.values());
        return w;
      };
      result.populations =
          run_abc_smc(smc, prior, kernel, simulate, result.observed_summary, strategy);
      break;
    }
    case Method::adaptive: {
      AdaptiveOptions options;
      options.smc = smc;
      options.k = config.knn_k;
      options.exponent_dim = config.exponent_dim;
      options.optimizer = config.optimizer;
      options.resample_by_importance = config.resample_posterior_for_estimate;
      AdaptiveResult adaptive =
          run_adaptive_smc(options, prior, kernel, simulate, result.observed_summary);
      result.populations = std::move(adaptive.populations);
      result.trace = std::move(adaptive.trace);
      result.generation_weights = std::move(adaptive.chosen_weights);
      if (!adaptive.final_context.empty()) {
        result.final_context = std::move(adaptive.final_context.front());
      }
      result.metrics.search_seconds = adaptive.weight_search_seconds;
      break;
    }
    case Method::semiauto: {
      // Pilot: single-generation rejection with uniform weights on its own
      // stream; the regression trains on the accepted particles only.
      const auto search_start = Clock::now();
      ExperimentConfig pilot_config = config;
      pilot_config.method = Method::uniform;
      pilot_config.generations = 1;
      SmcOptions pilot_smc = smc;
      pilot_smc.generations = 1;
      pilot_smc.root_seed = derive_seed(config.seed, {static_cast<std::uint64_t>(Stream::pilot)});
      const WeightStrategy pilot_strategy = [](const GenerationView& view,
                                               RngEngine&) -> WeightVector {
        return uniform_weights(view.summaries.cols());
      };
      const std::vector<Population> pilot = run_abc_smc(pilot_smc, prior, kernel, simulate,
                                                        result.observed_summary, pilot_strategy);
      const auto& accepted = pilot.front().particles;
      Eigen::MatrixXd pilot_thetas(static_cast<Eigen::Index>(accepted.size()), prior.dim());
      Eigen::MatrixXd pilot_summaries(static_cast<Eigen::Index>(accepted.size()), kappa);
      for (std::size_t i = 0; i < accepted.size(); ++i) {
        pilot_thetas.row(static_cast<Eigen::Index>(i)) = accepted[i].log10_theta;
        pilot_summaries.row(static_cast<Eigen::Index>(i)) = accepted[i].summary;
      }
      const ProjectionMatrix projection = semiauto_project(pilot_thetas, pilot_summaries);
      result.projection = projection;
      result.metrics.search_seconds = seconds_since(search_start);

      const SimulateFn projected_simulate = [simulate, projection](const Eigen::VectorXd& theta,
                                                                   RngEngine& rng) {
        return projection.project(simulate(theta, rng));
      };
      const SummaryVector projected_observed = projection.project(result.observed_summary);
      const WeightStrategy strategy = [&result](const GenerationView& view,
                                                RngEngine&) -> WeightVector {
        WeightVector w = uniform_weights(view.summaries.cols());
        result.generation_weights.push_back(w.values());
        return w;
      };
      result.populations =
          run_abc_smc(smc, prior, kernel, projected_simulate, projected_observed, strategy);
      break;
    }
    case Method::subset: {
      // Pilot pool for the greedy sufficiency pass, then a fresh run with the
      // selected subset as an indicator weight vector.
      const auto search_start = Clock::now();
      const std::uint64_t pilot_root =
          derive_seed(config.seed, {static_cast<std::uint64_t>(Stream::pilot)});
      const PilotPool pool = build_pilot_pool(config, simulate, kappa, pilot_root, threads);

      WeightObjectiveContext ctx;
      const Eigen::Index m = config.num_kept();
      RngEngine xi_rng = make_stream(pilot_root, Stream::prior_reference, 1);
      ctx.prior_samples.resize(m, prior.dim());
      for (Eigen::Index i = 0; i < m; ++i) ctx.prior_samples.row(i) = sample_prior_log10(prior, xi_rng);
      ctx.candidate_log10_thetas = pool.log10_thetas;
      ctx.candidate_summaries = pool.summaries;
      ctx.observed_summary = result.observed_summary;
      ctx.alpha_accept = config.alpha_accept;
      ctx.k = config.knn_k;
      ctx.exponent_dim = config.exponent_dim;

      RngEngine order_rng = make_stream(pilot_root, Stream::strategy, 1);
      result.subset = subset_select(ctx, config.subset_threshold, order_rng);
      result.metrics.search_seconds = seconds_since(search_start);

      Eigen::VectorXd indicator = Eigen::VectorXd::Zero(kappa);
      for (Eigen::Index j : result.subset) indicator[j] = 1.0;
      const WeightVector subset_weights{indicator};
      const WeightStrategy strategy = [&result, &subset_weights](const GenerationView&,
                                                                 RngEngine&) -> WeightVector {
        result.generation_weights.push_back(subset_weights.values());
        return subset_weights;
      };
      result.populations =
          run_abc_smc(smc, prior, kernel, simulate, result.observed_summary, strategy);
      break;
    }
  }

  RngEngine metric_rng = make_stream(config.seed, Stream::metric);
  const Population& final_pop = result.populations.back();
  result.metrics.hellinger = metric_hellinger_prior_posterior(
      final_pop, prior, config.n_ref, config.knn_k, metric_rng, config.exponent_dim);
  const BiasMetrics bias = metric_bias(final_pop, config.theta_star);
  result.metrics.mean_bias = bias.mean_bias;
  result.metrics.mode_bias = bias.mode_bias;
  result.metrics.simulation_seconds =
      static_cast<double>(sim_nanos->load()) * 1e-9;
  result.metrics.total_seconds = seconds_since(start);
  return result;
}

namespace {

void write_population_csv(const std::filesystem::path& path, const Population& pop) {
  CsvWriter csv(path);
  const Eigen::Index p = pop.particles.empty() ? 0 : pop.particles.front().theta.size();
  std::vector<std::string> header{"particle_id"};
  for (Eigen::Index j = 0; j < p; ++j) header.push_back("theta_" + std::to_string(j + 1));
  header.push_back("v");
  header.push_back("distance");
  csv.write_row(header);
  for (const Particle& particle : pop.particles) {
    std::vector<std::string> row{std::to_string(particle.candidate_index)};
    for (Eigen::Index j = 0; j < p; ++j) row.push_back(format_double(particle.theta[j]));
    row.push_back(format_double(particle.v));
    row.push_back(format_double(particle.distance));
    csv.write_row(row);
  }
  csv.close();
}

void write_weights_csv(const std::filesystem::path& path,
                       const std::vector<Eigen::VectorXd>& weights) {
  CsvWriter csv(path);
  const Eigen::Index kappa = weights.empty() ? 0 : weights.front().size();
  std::vector<std::string> header{"generation"};
  for (Eigen::Index j = 0; j < kappa; ++j) header.push_back("w_" + std::to_string(j + 1));
  csv.write_row(header);
  for (std::size_t t = 0; t < weights.size(); ++t) {
    std::vector<std::string> row{std::to_string(t + 1)};
    for (Eigen::Index j = 0; j < weights[t].size(); ++j) {
      row.push_back(format_double(weights[t][j]));
    }
    csv.write_row(row);
  }
  csv.close();
}

void write_trace_csv(const std::filesystem::path& path, const std::vector<WeightTraceRow>& trace) {
  CsvWriter csv(path);
  const Eigen::Index kappa = trace.empty() ? 0 : trace.front().weights.size();
  std::vector<std::string> header{"generation", "restart"};
  for (Eigen::Index j = 0; j < kappa; ++j) header.push_back("w_" + std::to_string(j + 1));
  header.push_back("L");
  csv.write_row(header);
  for (const WeightTraceRow& row : trace) {
    std::vector<std::string> out{std::to_string(row.generation), std::to_string(row.restart)};
    for (Eigen::Index j = 0; j < row.weights.size(); ++j) {
      out.push_back(format_double(row.weights[j]));
    }
    out.push_back(format_double(row.objective));
    csv.write_row(out);
  }
  csv.close();
}

void write_metrics_csv(const std::filesystem::path& path, const RunMetrics& m) {
  CsvWriter csv(path);
  csv.write_row({"hellinger", "mean_bias", "mode_bias", "simulation_seconds", "search_seconds",
                 "total_seconds"});
  csv.write_row({format_double(m.hellinger), format_double(m.mean_bias),
                 format_double(m.mode_bias), format_double(m.simulation_seconds),
                 format_double(m.search_seconds), format_double(m.total_seconds)});
  csv.close();
}

}  // namespace

RunArtifacts run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                            int threads) {
  namespace fs = std::filesystem;
  if (fs::exists(out_dir)) {
    throw std::runtime_error("run_experiment: output directory already exists: " +
                             out_dir.string());
  }

  const RunResult result = run_inference(config, threads);

  const auto ticks = std::chrono::steady_clock::now().time_since_epoch().count();
  const fs::path tmp = out_dir.string() + ".tmp-" + hex64(fnv1a64(std::to_string(ticks)));
  fs::create_directories(tmp);
  try {
    save_config(config, tmp / "config.toml");
    std::vector<std::string> files{"config.toml"};

    for (const Population& pop : result.populations) {
      const std::string name = "generation_" + std::to_string(pop.generation) + ".csv";
      write_population_csv(tmp / name, pop);
      files.push_back(name);
    }
    write_weights_csv(tmp / "weights.csv", result.generation_weights);
    files.push_back("weights.csv");
    if (!result.trace.empty()) {
      write_trace_csv(tmp / "weight_trace.csv", result.trace);
      files.push_back("weight_trace.csv");
    }
    write_csv_matrix(tmp / "observed_summary.csv", result.observed_summary.transpose());
    files.push_back("observed_summary.csv");
    write_metrics_csv(tmp / "metrics.csv", result.metrics);
    files.push_back("metrics.csv");

    json manifest;
    manifest["tool"] = "abcweight";
    manifest["version"] = kVersion;
    manifest["model"] = to_string(config.model);
    manifest["method"] = to_string(config.method);
    manifest["seed"] = config.seed;
    manifest["derived_seeds"] = {
        {"observed", derive_seed(config.seed, {static_cast<std::uint64_t>(Stream::observed_data)})},
        {"metric", derive_seed(config.seed, {static_cast<std::uint64_t>(Stream::metric)})},
        {"pilot", derive_seed(config.seed, {static_cast<std::uint64_t>(Stream::pilot)})}};
    manifest["config"] = serialize_config(config);
    manifest["config_digest"] = config_digest(config);
    manifest["metric_space"] = "log10";
    if (config.model != ModelId::toy) {
      manifest["schedule_times"] = config.schedule().times;
    }
    {
      json weights = json::array();
      for (const Eigen::VectorXd& w : result.generation_weights) {
        weights.push_back(std::vector<double>(w.data(), w.data() + w.size()));
      }
      manifest["generation_weights"] = std::move(weights);
    }
    if (!result.subset.empty()) {
      std::vector<std::int64_t> subset;
      for (Eigen::Index j : result.subset) subset.push_back(j + 1);  // 1-based statistic ids
      manifest["subset"] = subset;
    }
    if (result.projection.has_value()) {
      json proj;
      proj["ridge_used"] = result.projection->ridge_used;
      json rows = json::array();
      for (Eigen::Index i = 0; i < result.projection->coefficients.rows(); ++i) {
        const auto& c = result.projection->coefficients;
        rows.push_back(std::vector<double>(c.row(i).begin(), c.row(i).end()));
      }
      proj["coefficients"] = std::move(rows);
      manifest["projection"] = std::move(proj);
    }
    manifest["metrics"] = {{"hellinger", result.metrics.hellinger},
                           {"mean_bias", result.metrics.mean_bias},
                           {"mode_bias", result.metrics.mode_bias},
                           {"simulation_seconds", result.metrics.simulation_seconds},
                           {"search_seconds", result.metrics.search_seconds},
                           {"total_seconds", result.metrics.total_seconds}};
    json digests;
    for (const std::string& name : files) digests[name] = file_digest(tmp / name);
    manifest["files"] = std::move(digests);

    const std::string manifest_text = manifest.dump(2) + "\n";
    {
      std::ofstream out(tmp / "manifest.json");
      out << manifest_text;
      if (!out) throw std::runtime_error("write failed: manifest.json");
    }
    fs::rename(tmp, out_dir);

    RunArtifacts artifacts;
    artifacts.dir = out_dir;
    artifacts.metrics = result.metrics;
    artifacts.manifest_json = manifest_text;
    return artifacts;
  } catch (...) {
    std::error_code ec;
    fs::remove_all(tmp, ec);
    throw;
  }
}

void verify_artifacts(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw std::runtime_error("verify_artifacts: no manifest in " + dir.string());
  json manifest = json::parse(in);
  for (const auto& [name, digest] : manifest.at("files").items()) {
    const std::string actual = file_digest(dir / name);
    if (actual != digest.get<std::string>()) {
      throw std::runtime_error("verify_artifacts: digest mismatch for " + name);
    }
  }
  const ExperimentConfig config = load_config(dir / "config.toml");
  if (config_digest(config) != manifest.at("config_digest").get<std::string>()) {
    throw std::runtime_error("verify_artifacts: config digest mismatch");
  }
}

namespace {

std::string preset_for_problem(const std::string& problem, Scale scale) {
  if (problem == "toy") return "toy";
  if (scale == Scale::desk) return problem + "_desk";
  return problem + "_full";
}

TableCell average_cells(const std::vector<TableCell>& raw, const std::string& problem,
                        const std::string& method) {
  TableCell avg;
  avg.problem = problem;
  avg.method = method;
  int count = 0;
  for (const TableCell& cell : raw) {
    if (cell.problem != problem || cell.method != method) continue;
    if (cell.failed) {
      avg.failed = true;
      avg.error = cell.error;
      continue;
    }
    avg.hellinger += cell.hellinger;
    avg.mean_bias += cell.mean_bias;
    avg.mode_bias += cell.mode_bias;
    ++count;
  }
  if (count > 0) {
    avg.hellinger /= count;
    avg.mean_bias /= count;
    avg.mode_bias /= count;
    avg.failed = false;
    avg.error.clear();
  }
  return avg;
}

}  // namespace

TableReport reproduce_table(int table_id, Scale scale, std::uint64_t seed, int threads,
                            int repeats_override, const std::vector<std::string>& problems) {
  if (table_id != 1 && table_id != 2) {
    throw std::invalid_argument("reproduce_table: table_id must be 1 or 2");
  }
  const std::vector<std::string> all =
      problems.empty() ? std::vector<std::string>{"toy", "death", "dimerization", "diffusion"}
                       : problems;

  TableReport report;
  report.table_id = table_id;
  std::vector<std::string> methods;

  for (std::size_t pi = 0; pi < all.size(); ++pi) {
    const ExperimentConfig base = preset(preset_for_problem(all[pi], scale));
    const int repeats = repeats_override > 0 ? repeats_override : base.repeats;

    for (int r = 0; r < repeats; ++r) {
      ExperimentConfig cfg = base;
      cfg.seed = derive_seed(seed, {static_cast<std::uint64_t>(Stream::repeat),
                                    static_cast<std::uint64_t>(pi), static_cast<std::uint64_t>(r)});

      auto run_cell = [&](const ExperimentConfig& c, const std::string& method_label) {
        TableCell cell;
        cell.problem = all[pi];
        cell.method = method_label;
        try {
          const RunResult run = run_inference(c, threads);
          cell.hellinger = run.metrics.hellinger;
          cell.mean_bias = run.metrics.mean_bias;
          cell.mode_bias = run.metrics.mode_bias;
          report.raw.push_back(cell);
          return run.metrics;
        } catch (const std::exception& e) {
          cell.failed = true;
          cell.error = e.what();
          report.raw.push_back(cell);
          return RunMetrics{};
        }
      };

      if (table_id == 1) {
        methods = {"adaptive", "uniform", "uniform_equal_compute"};
        ExperimentConfig adaptive_cfg = cfg;
        adaptive_cfg.method = Method::adaptive;
        const RunMetrics adaptive_metrics = run_cell(adaptive_cfg, "adaptive");

        ExperimentConfig uniform_cfg = cfg;
        uniform_cfg.method = Method::uniform;
        run_cell(uniform_cfg, "uniform");

        // Convert the measured weight-search time into extra simulations at
        // the adaptive run's observed simulation rate; hold the particle
        // count fixed through alpha.
        ExperimentConfig equal_cfg = cfg;
        equal_cfg.method = Method::uniform;
        const double total_sims =
            static_cast<double>(cfg.num_simulations) * cfg.generations;
        const int m1 = cfg.num_kept();
        int n2 = cfg.num_simulations;
        if (adaptive_metrics.simulation_seconds > 0.0 && adaptive_metrics.search_seconds > 0.0) {
          const double rate = total_sims / adaptive_metrics.simulation_seconds;
          const double extra_total = adaptive_metrics.search_seconds * rate;
          n2 = cfg.num_simulations + static_cast<int>(extra_total / cfg.generations);
        }
        equal_cfg.num_simulations = n2;
        equal_cfg.alpha_accept = (static_cast<double>(m1) + 0.5) / static_cast<double>(n2);
        run_cell(equal_cfg, "uniform_equal_compute");
      } else {
        methods = {"adaptive", "subset", "semiauto"};
        for (const std::string& method_label : methods) {
          ExperimentConfig c = cfg;
          c.method = method_from_string(method_label);
          c.generations = 1;  // rejection-sampling comparison
          run_cell(c, method_label);
        }
      }
    }
    for (const std::string& method_label : methods) {
      report.cells.push_back(average_cells(report.raw, all[pi], method_label));
    }
  }
  return report;
}

ConsistencyResult consistency_study(const ExperimentConfig& config, int runs, int threads) {
  if (runs < 2) throw std::invalid_argument("consistency_study: need at least 2 runs");
  ExperimentConfig cfg = config;
  cfg.method = Method::adaptive;

  ConsistencyResult out;
  for (int r = 0; r < runs; ++r) {
    cfg.seed = derive_seed(config.seed, {static_cast<std::uint64_t>(Stream::repeat),
                                         static_cast<std::uint64_t>(r)});
    const RunResult run = run_inference(cfg, threads);
    const Eigen::VectorXd& w = run.generation_weights.back();
    if (r == 0) out.weights.resize(runs, w.size());
    out.weights.row(r) = w;
  }
  out.mean_trace = out.weights.colwise().mean();
  Eigen::MatrixXd centered = out.weights;
  for (int r = 0; r < runs; ++r) centered.row(r).array() -= out.weights.row(r).mean();
  out.mean_centered_trace = centered.colwise().mean();
  return out;
}

}  // namespace abcweight
