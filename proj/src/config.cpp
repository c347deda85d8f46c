#include "abcweight/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "abcweight/csv.hpp"
#include "abcweight/digest.hpp"

namespace abcweight {

Method method_from_string(const std::string& name) {
  if (name == "adaptive") return Method::adaptive;
  if (name == "uniform") return Method::uniform;
  if (name == "scaled") return Method::scaled;
  if (name == "semiauto") return Method::semiauto;
  if (name == "subset") return Method::subset;
  throw config_error("method: unknown value '" + name + "'");
}

std::string to_string(Method method) {
  switch (method) {
    case Method::adaptive: return "adaptive";
    case Method::uniform: return "uniform";
    case Method::scaled: return "scaled";
    case Method::semiauto: return "semiauto";
    case Method::subset: return "subset";
  }
  throw std::logic_error("unreachable method");
}

int ExperimentConfig::num_kept() const {
  return static_cast<int>(std::floor(alpha_accept * static_cast<double>(num_simulations)));
}

ObservationSchedule ExperimentConfig::schedule() const {
  if (spacing == ObservationSchedule::Spacing::geometric) {
    return ObservationSchedule::geometric(final_time, n_observations);
  }
  return ObservationSchedule::linear(final_time, n_observations);
}

PriorSpec ExperimentConfig::prior() const { return PriorSpec(prior_lo, prior_hi); }

KernelSpec ExperimentConfig::kernel() const {
  return KernelSpec::isotropic(parameter_dim(), proposal_sd);
}

namespace {

struct RawValue {
  std::string text;
  int line = 0;
};

using RawConfig = std::map<std::string, RawValue>;

std::string strip(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

RawConfig tokenize(const std::string& text, const std::string& origin) {
  RawConfig raw;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    // Comments start at '#' outside quotes.
    bool in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') in_quotes = !in_quotes;
      else if (line[i] == '#' && !in_quotes) {
        line.resize(i);
        break;
      }
    }
    const std::string trimmed = strip(line);
    if (trimmed.empty()) continue;
    const std::size_t eq = trimmed.find('=');
    if (eq == std::string::npos) {
      throw config_error(origin + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = strip(trimmed.substr(0, eq));
    const std::string value = strip(trimmed.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw config_error(origin + ":" + std::to_string(line_no) + ": empty key or value");
    }
    if (raw.count(key)) {
      throw config_error(origin + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
    raw[key] = {value, line_no};
  }
  return raw;
}

class Schema {
 public:
  Schema(RawConfig raw, std::string origin) : raw_(std::move(raw)), origin_(std::move(origin)) {}

  bool has(const std::string& key) const { return raw_.count(key) > 0; }

  std::string take_string(const std::string& key) {
    const std::string v = take(key);
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
    return v;
  }

  double take_double(const std::string& key) { return parse_double(key, take(key)); }

  std::int64_t take_int(const std::string& key) {
    const std::string v = take(key);
    try {
      std::size_t used = 0;
      const std::int64_t n = std::stoll(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
      return n;
    } catch (const std::exception&) {
      throw config_error(key + ": expected an integer, got '" + v + "'");
    }
  }

  std::uint64_t take_uint(const std::string& key) {
    const std::int64_t n = take_int(key);
    if (n < 0) throw config_error(key + ": expected a nonnegative integer");
    return static_cast<std::uint64_t>(n);
  }

  bool take_bool(const std::string& key) {
    const std::string v = take(key);
    if (v == "true") return true;
    if (v == "false") return false;
    throw config_error(key + ": expected true or false, got '" + v + "'");
  }

  std::vector<double> take_double_array(const std::string& key) {
    const std::string v = take(key);
    if (v.size() < 2 || v.front() != '[' || v.back() != ']') {
      throw config_error(key + ": expected an array like [a, b, c]");
    }
    std::vector<double> out;
    std::stringstream ss(v.substr(1, v.size() - 2));
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      const std::string c = strip(cell);
      if (c.empty()) throw config_error(key + ": empty array element");
      out.push_back(parse_double(key, c));
    }
    if (out.empty()) throw config_error(key + ": empty array");
    return out;
  }

  void finish() const {
    if (!raw_.empty()) {
      throw config_error(origin_ + ":" + std::to_string(raw_.begin()->second.line) +
                         ": unknown key '" + raw_.begin()->first + "'");
    }
  }

 private:
  std::string take(const std::string& key) {
    auto it = raw_.find(key);
    if (it == raw_.end()) throw config_error(key + ": missing required key");
    std::string v = it->second.text;
    raw_.erase(it);
    return v;
  }

  double parse_double(const std::string& key, const std::string& v) {
    try {
      std::size_t used = 0;
      const double d = std::stod(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
      return d;
    } catch (const std::exception&) {
      throw config_error(key + ": expected a number, got '" + v + "'");
    }
  }

  RawConfig raw_;
  std::string origin_;
};

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

int expected_parameter_dim(ModelId model) {
  switch (model) {
    case ModelId::toy: return 1;
    case ModelId::death: return 2;
    case ModelId::dimerization: return 4;
    case ModelId::diffusion: return 1;
  }
  return 0;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& origin) {
  Schema schema(tokenize(text, origin), origin);
  ExperimentConfig c;

  try {
    c.model = model_from_string(schema.take_string("model"));
  } catch (const std::invalid_argument& e) {
    throw config_error(std::string("model: ") + e.what());
  }
  c.n_observations = static_cast<int>(schema.take_int("n"));
  if (schema.has("initial_state")) {
    const auto vals = schema.take_double_array("initial_state");
    c.initial_state.resize(static_cast<Eigen::Index>(vals.size()));
    for (std::size_t i = 0; i < vals.size(); ++i) {
      if (vals[i] != std::floor(vals[i]) || vals[i] < 0) {
        throw config_error("initial_state: entries must be nonnegative integers");
      }
      c.initial_state[static_cast<Eigen::Index>(i)] = static_cast<int>(vals[i]);
    }
  }
  if (schema.has("final_time")) c.final_time = schema.take_double("final_time");
  c.theta_star = to_vector(schema.take_double_array("theta_star"));
  c.num_simulations = static_cast<int>(schema.take_int("num_simulations"));
  c.alpha_accept = schema.take_double("alpha_accept");
  c.repeats = static_cast<int>(schema.take_int("repeats"));
  c.proposal_sd = schema.take_double("proposal_sd");
  c.prior_lo = to_vector(schema.take_double_array("prior_lo"));
  c.prior_hi = to_vector(schema.take_double_array("prior_hi"));
  c.generations = static_cast<int>(schema.take_int("generations"));
  c.method = method_from_string(schema.take_string("method"));
  if (schema.has("knn_k")) c.knn_k = static_cast<int>(schema.take_int("knn_k"));
  if (schema.has("optimizer_restarts")) {
    c.optimizer.restarts = static_cast<int>(schema.take_int("optimizer_restarts"));
  }
  if (schema.has("optimizer_max_evaluations")) {
    c.optimizer.max_evaluations = static_cast<int>(schema.take_int("optimizer_max_evaluations"));
  }
  if (schema.has("optimizer_simplex_scale")) {
    c.optimizer.initial_simplex_scale = schema.take_double("optimizer_simplex_scale");
  }
  if (schema.has("weight_floor")) c.optimizer.weight_floor = schema.take_double("weight_floor");
  if (schema.has("seed")) c.seed = schema.take_uint("seed");
  if (schema.has("schedule_spacing")) {
    const std::string s = schema.take_string("schedule_spacing");
    if (s == "linear") c.spacing = ObservationSchedule::Spacing::linear;
    else if (s == "geometric") c.spacing = ObservationSchedule::Spacing::geometric;
    else throw config_error("schedule_spacing: expected linear or geometric, got '" + s + "'");
  }
  if (schema.has("voxels")) c.voxels = static_cast<int>(schema.take_int("voxels"));
  if (schema.has("event_cap")) c.event_cap = schema.take_uint("event_cap");
  if (schema.has("exponent_dim")) c.exponent_dim = schema.take_bool("exponent_dim");
  if (schema.has("toy_sorted")) c.toy_sorted = schema.take_bool("toy_sorted");
  if (schema.has("resample_posterior_for_estimate")) {
    c.resample_posterior_for_estimate = schema.take_bool("resample_posterior_for_estimate");
  }
  if (schema.has("n_ref")) c.n_ref = static_cast<int>(schema.take_int("n_ref"));
  if (schema.has("subset_threshold")) c.subset_threshold = schema.take_double("subset_threshold");

  schema.finish();
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

void validate(const ExperimentConfig& c) {
  const int p = expected_parameter_dim(c.model);
  if (c.theta_star.size() != p) {
    throw config_error("theta_star: expected " + std::to_string(p) + " entries for model " +
                       to_string(c.model));
  }
  if (c.prior_lo.size() != p || c.prior_hi.size() != p) {
    throw config_error("prior_lo/prior_hi: expected " + std::to_string(p) + " entries");
  }
  for (Eigen::Index i = 0; i < p; ++i) {
    if (!(c.prior_lo[i] > 0.0) || !(c.prior_lo[i] < c.prior_hi[i])) {
      throw config_error("prior_lo/prior_hi: need 0 < lo < hi in dimension " +
                         std::to_string(i + 1));
    }
  }
  if (c.n_observations < 1) throw config_error("n: must be >= 1");
  if (c.num_simulations < 1) throw config_error("num_simulations: must be >= 1");
  if (!(c.alpha_accept > 0.0) || c.alpha_accept > 1.0) {
    throw config_error("alpha_accept: must lie in (0, 1]");
  }
  if (c.num_kept() < 1) {
    throw config_error("alpha_accept: floor(alpha_accept * num_simulations) = 0");
  }
  if (c.repeats < 1) throw config_error("repeats: must be >= 1");
  if (!(c.proposal_sd > 0.0)) throw config_error("proposal_sd: must be positive");
  if (c.generations < 1) throw config_error("generations: must be >= 1");
  if (c.knn_k < 2) throw config_error("knn_k: must be >= 2");
  if (c.optimizer.restarts < 0) throw config_error("optimizer_restarts: must be >= 0");
  if (c.optimizer.max_evaluations < 1) throw config_error("optimizer_max_evaluations: must be >= 1");
  if (!(c.optimizer.initial_simplex_scale > 0.0)) {
    throw config_error("optimizer_simplex_scale: must be positive");
  }
  if (c.optimizer.weight_floor < 0.0) throw config_error("weight_floor: must be >= 0");
  if (c.n_ref < c.knn_k + 1) throw config_error("n_ref: must be at least knn_k + 1");
  if (!(c.subset_threshold > 0.0) || !(c.subset_threshold < 1.0)) {
    throw config_error("subset_threshold: must lie in (0, 1)");
  }

  switch (c.model) {
    case ModelId::toy:
      break;
    case ModelId::death:
      if (c.initial_state.size() != 1 || c.initial_state[0] < 1) {
        throw config_error("initial_state: death model needs [A0] with A0 >= 1");
      }
      if (!(c.final_time > 0.0)) throw config_error("final_time: must be positive");
      break;
    case ModelId::dimerization:
      if (c.initial_state.size() != 3) {
        throw config_error("initial_state: dimerization model needs [S1, S2, S3]");
      }
      if (!(c.final_time > 0.0)) throw config_error("final_time: must be positive");
      break;
    case ModelId::diffusion:
      if (c.voxels < 2 || c.voxels % 2 != 0) {
        throw config_error("voxels: must be even and >= 2");
      }
      if (!(c.final_time > 0.0)) throw config_error("final_time: must be positive");
      break;
  }

  if (c.method == Method::adaptive || c.method == Method::subset) {
    if (c.num_kept() < c.knn_k + 1) {
      throw config_error("alpha_accept: floor(alpha*N) must be at least knn_k + 1 for method " +
                         to_string(c.method));
    }
  }
}

namespace {

std::string array_text(const Eigen::VectorXd& v) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i > 0) s += ", ";
    s += format_double(v[i]);
  }
  return s + "]";
}

std::string array_text(const Eigen::VectorXi& v) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i > 0) s += ", ";
    s += std::to_string(v[i]);
  }
  return s + "]";
}

}  // namespace

std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "model = \"" << to_string(c.model) << "\"\n";
  out << "n = " << c.n_observations << "\n";
  if (c.initial_state.size() > 0) out << "initial_state = " << array_text(c.initial_state) << "\n";
  if (c.model != ModelId::toy) out << "final_time = " << format_double(c.final_time) << "\n";
  out << "theta_star = " << array_text(c.theta_star) << "\n";
  out << "num_simulations = " << c.num_simulations << "\n";
  out << "alpha_accept = " << format_double(c.alpha_accept) << "\n";
  out << "repeats = " << c.repeats << "\n";
  out << "proposal_sd = " << format_double(c.proposal_sd) << "\n";
  out << "prior_lo = " << array_text(c.prior_lo) << "\n";
  out << "prior_hi = " << array_text(c.prior_hi) << "\n";
  out << "generations = " << c.generations << "\n";
  out << "method = \"" << to_string(c.method) << "\"\n";
  out << "knn_k = " << c.knn_k << "\n";
  out << "optimizer_restarts = " << c.optimizer.restarts << "\n";
  out << "optimizer_max_evaluations = " << c.optimizer.max_evaluations << "\n";
  out << "optimizer_simplex_scale = " << format_double(c.optimizer.initial_simplex_scale) << "\n";
  out << "weight_floor = " << format_double(c.optimizer.weight_floor) << "\n";
  out << "seed = " << c.seed << "\n";
  out << "schedule_spacing = \""
      << (c.spacing == ObservationSchedule::Spacing::linear ? "linear" : "geometric") << "\"\n";
  if (c.model == ModelId::diffusion) out << "voxels = " << c.voxels << "\n";
  out << "event_cap = " << c.event_cap << "\n";
  out << "exponent_dim = " << (c.exponent_dim ? "true" : "false") << "\n";
  out << "toy_sorted = " << (c.toy_sorted ? "true" : "false") << "\n";
  out << "resample_posterior_for_estimate = "
      << (c.resample_posterior_for_estimate ? "true" : "false") << "\n";
  out << "n_ref = " << c.n_ref << "\n";
  out << "subset_threshold = " << format_double(c.subset_threshold) << "\n";
  return out.str();
}

void save_config(const ExperimentConfig& config, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << serialize_config(config);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string config_digest(const ExperimentConfig& config) {
  return hex64(fnv1a64(serialize_config(config)));
}

namespace {

ExperimentConfig toy_base() {
  ExperimentConfig c;
  c.model = ModelId::toy;
  c.n_observations = 10;  // r draws; the sample maximum is the sufficient statistic
  c.theta_star = Eigen::VectorXd::Constant(1, 10.0);
  c.num_simulations = 50000;
  c.alpha_accept = 0.005;
  c.repeats = 1;
  c.proposal_sd = 0.25;
  c.prior_lo = Eigen::VectorXd::Constant(1, 1e-4);
  c.prior_hi = Eigen::VectorXd::Constant(1, 1e4);
  c.generations = 5;
  return c;
}

ExperimentConfig death_full() {
  ExperimentConfig c;
  c.model = ModelId::death;
  c.n_observations = 32;
  c.initial_state = Eigen::VectorXi::Constant(1, 10);
  c.final_time = 20.0;
  c.theta_star = (Eigen::VectorXd(2) << 0.1, 0.01).finished();
  c.num_simulations = 500000;
  c.alpha_accept = 0.005;
  c.repeats = 5;
  c.proposal_sd = 0.25;
  c.prior_lo = Eigen::VectorXd::Constant(2, 1e-4);
  c.prior_hi = Eigen::VectorXd::Constant(2, 1e4);
  c.generations = 5;
  return c;
}

ExperimentConfig dimerization_full() {
  ExperimentConfig c;
  c.model = ModelId::dimerization;
  c.n_observations = 16;
  c.initial_state = (Eigen::VectorXi(3) << 100000, 0, 0).finished();
  c.final_time = 100.0;
  c.theta_star = (Eigen::VectorXd(4) << 1.0, 0.04, 0.002, 0.5).finished();
  c.num_simulations = 50000;
  c.alpha_accept = 0.05;
  c.repeats = 1;
  c.proposal_sd = 0.25;
  c.prior_lo = (Eigen::VectorXd(4) << 1e-2, 1e-3, 1e-5, 1e-3).finished();
  c.prior_hi = (Eigen::VectorXd(4) << 1e2, 1e1, 1e-1, 1e1).finished();
  c.generations = 5;
  c.spacing = ObservationSchedule::Spacing::geometric;
  return c;
}

ExperimentConfig diffusion_full() {
  ExperimentConfig c;
  c.model = ModelId::diffusion;
  c.n_observations = 8;
  c.final_time = 20.0;
  c.theta_star = Eigen::VectorXd::Constant(1, 0.1);
  c.num_simulations = 50000;
  c.alpha_accept = 0.05;
  c.repeats = 5;
  c.proposal_sd = 0.25;
  c.prior_lo = Eigen::VectorXd::Constant(1, 1e-4);
  c.prior_hi = Eigen::VectorXd::Constant(1, 1e0);
  c.generations = 5;
  c.voxels = 8;
  return c;
}

}  // namespace

ExperimentConfig preset(const std::string& name) {
  // Desk presets shrink the candidate pool to 5000 and the run to 3
  // generations so full studies finish on a workstation.
  if (name == "toy") return toy_base();
  if (name == "toy_main_text") {
    ExperimentConfig c = toy_base();
    c.prior_lo[0] = 1.0;
    c.prior_hi[0] = 100.0;
    return c;
  }
  if (name == "death_full") return death_full();
  if (name == "death_main_text") {
    ExperimentConfig c = death_full();
    c.prior_lo.setConstant(1e-3);
    c.prior_hi.setConstant(1e3);
    return c;
  }
  if (name == "death_desk") {
    ExperimentConfig c = death_full();
    c.num_simulations = 5000;
    c.alpha_accept = 0.05;
    c.generations = 3;
    return c;
  }
  if (name == "dimerization_full") return dimerization_full();
  if (name == "dimerization_desk") {
    ExperimentConfig c = dimerization_full();
    // Smaller initial copy number with k3 rescaled x100 preserves the
    // mean-field trajectory; the k3 prior interval shifts with it.
    c.initial_state[0] = 1000;
    c.theta_star[2] = 0.2;
    c.prior_lo[2] = 1e-3;
    c.prior_hi[2] = 1e1;
    c.num_simulations = 5000;
    c.generations = 3;
    return c;
  }
  if (name == "diffusion_full") return diffusion_full();
  if (name == "diffusion_desk") {
    ExperimentConfig c = diffusion_full();
    c.num_simulations = 5000;
    c.generations = 3;
    return c;
  }
  throw config_error("unknown preset '" + name + "'");
}

std::vector<std::string> preset_names() {
  return {"toy",          "toy_main_text",     "death_full", "death_main_text",
          "death_desk",   "dimerization_full", "dimerization_desk",
          "diffusion_full", "diffusion_desk"};
}

}  // namespace abcweight
