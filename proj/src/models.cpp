#include "abcweight/models.hpp"

#include <cmath>
#include <stdexcept>

namespace abcweight {

ModelId model_from_string(const std::string& name) {
  if (name == "toy") return ModelId::toy;
  if (name == "death") return ModelId::death;
  if (name == "dimerization") return ModelId::dimerization;
  if (name == "diffusion") return ModelId::diffusion;
  throw std::invalid_argument("unknown model '" + name + "'");
}

std::string to_string(ModelId id) {
  switch (id) {
    case ModelId::toy: return "toy";
    case ModelId::death: return "death";
    case ModelId::dimerization: return "dimerization";
    case ModelId::diffusion: return "diffusion";
  }
  throw std::logic_error("unreachable model id");
}

ReactionNetwork death_network() {
  ReactionNetwork net;
  net.species_count = 1;
  net.rate_count = 1;
  Reaction decay;
  decay.stoich_change = Eigen::VectorXi::Constant(1, -1);
  decay.kind = PropensityKind::unary;
  decay.species_index = 0;
  decay.rate_index = 0;
  net.reactions.push_back(decay);
  return net;
}

ReactionNetwork dimerization_network() {
  ReactionNetwork net;
  net.species_count = 3;
  net.rate_count = 4;
  auto add = [&net](std::initializer_list<int> stoich, PropensityKind kind, int species, int rate) {
    Reaction r;
    r.stoich_change = Eigen::VectorXi::Zero(3);
    int i = 0;
    for (int s : stoich) r.stoich_change[i++] = s;
    r.kind = kind;
    r.species_index = species;
    r.rate_index = rate;
    net.reactions.push_back(r);
  };
  add({-1, 0, 0}, PropensityKind::unary, 0, 0);             // S1 -> 0
  add({0, -1, 1}, PropensityKind::unary, 1, 1);             // S2 -> S3
  add({-2, 1, 0}, PropensityKind::binary_homodimer, 0, 2);  // S1 + S1 -> S2
  add({2, -1, 0}, PropensityKind::unary, 1, 3);             // S2 -> S1 + S1
  return net;
}

ReactionNetwork diffusion_network(int voxels) {
  if (voxels < 2) throw std::invalid_argument("diffusion_network: need at least 2 voxels");
  ReactionNetwork net;
  net.species_count = voxels;
  net.rate_count = 1;
  for (int i = 0; i < voxels - 1; ++i) {
    Reaction right;
    right.stoich_change = Eigen::VectorXi::Zero(voxels);
    right.stoich_change[i] = -1;
    right.stoich_change[i + 1] = 1;
    right.kind = PropensityKind::unary;
    right.species_index = i;
    right.rate_index = 0;
    net.reactions.push_back(right);

    Reaction left;
    left.stoich_change = Eigen::VectorXi::Zero(voxels);
    left.stoich_change[i + 1] = -1;
    left.stoich_change[i] = 1;
    left.kind = PropensityKind::unary;
    left.species_index = i + 1;
    left.rate_index = 0;
    net.reactions.push_back(left);
  }
  return net;
}

ObservationSchedule ObservationSchedule::linear(double t_end, int n) {
  if (n < 1 || t_end <= 0.0) throw std::invalid_argument("ObservationSchedule::linear: bad arguments");
  ObservationSchedule s;
  s.spacing = Spacing::linear;
  s.times.resize(static_cast<std::size_t>(n) + 1);
  for (int j = 0; j <= n; ++j) s.times[static_cast<std::size_t>(j)] = t_end * j / n;
  return s;
}

ObservationSchedule ObservationSchedule::geometric(double t_end, int n, double first_fraction) {
  if (n < 1 || t_end <= 0.0 || first_fraction <= 0.0 || first_fraction >= 1.0) {
    throw std::invalid_argument("ObservationSchedule::geometric: bad arguments");
  }
  ObservationSchedule s;
  s.spacing = Spacing::geometric;
  s.times.resize(static_cast<std::size_t>(n) + 1);
  s.times[0] = 0.0;
  // t_j = t_end * g^(n-j); g solves t_1 = t_end * first_fraction.
  const double g = (n > 1) ? std::pow(first_fraction, 1.0 / (n - 1)) : first_fraction;
  for (int j = 1; j <= n; ++j) {
    s.times[static_cast<std::size_t>(j)] = t_end * std::pow(g, static_cast<double>(n - j));
  }
  s.times[static_cast<std::size_t>(n)] = t_end;
  return s;
}

namespace {

double propensity(const Reaction& r, const Eigen::VectorXi& state, const Eigen::VectorXd& rates) {
  const double rate = rates[r.rate_index];
  switch (r.kind) {
    case PropensityKind::zeroth:
      return rate;
    case PropensityKind::unary:
      return rate * static_cast<double>(state[r.species_index]);
    case PropensityKind::binary_homodimer: {
      const double s = static_cast<double>(state[r.species_index]);
      return rate * s * (s - 1.0) / 2.0;
    }
  }
  return 0.0;
}

void validate_schedule(const ObservationSchedule& schedule) {
  if (schedule.times.empty() || schedule.times.front() < 0.0) {
    throw std::invalid_argument("ssa_simulate: schedule must start at a nonnegative time");
  }
  for (std::size_t j = 1; j < schedule.times.size(); ++j) {
    if (schedule.times[j] < schedule.times[j - 1]) {
      throw std::invalid_argument("ssa_simulate: schedule times must be nondecreasing");
    }
  }
}

}  // namespace

Trajectory ssa_simulate(const ReactionNetwork& network, const Eigen::VectorXd& rates,
                        const Eigen::VectorXi& initial_state, const ObservationSchedule& schedule,
                        RngEngine& rng, std::uint64_t event_cap) {
  if (rates.size() != network.rate_count) {
    throw std::invalid_argument("ssa_simulate: rate vector length mismatch");
  }
  if ((rates.array() < 0.0).any() || !rates.allFinite()) {
    throw std::invalid_argument("ssa_simulate: rates must be nonnegative and finite");
  }
  if (initial_state.size() != network.species_count) {
    throw std::invalid_argument("ssa_simulate: initial state length mismatch");
  }
  if ((initial_state.array() < 0).any()) {
    throw std::invalid_argument("ssa_simulate: initial state must be nonnegative");
  }
  validate_schedule(schedule);

  const std::size_t n_obs = schedule.times.size();
  const std::size_t n_react = network.reactions.size();
  Trajectory traj;
  traj.states.resize(static_cast<Eigen::Index>(n_obs), network.species_count);

  Eigen::VectorXi state = initial_state;
  std::vector<double> props(n_react);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  double t = 0.0;
  std::size_t obs = 0;
  std::uint64_t events = 0;

  while (obs < n_obs) {
    double total = 0.0;
    for (std::size_t r = 0; r < n_react; ++r) {
      props[r] = propensity(network.reactions[r], state, rates);
      total += props[r];
    }
    if (total <= 0.0) {
      // Absorbing state: every remaining observation sees the current state.
      for (; obs < n_obs; ++obs) {
        traj.states.row(static_cast<Eigen::Index>(obs)) = state.cast<std::int64_t>();
      }
      break;
    }
    const double u = unif(rng);
    const double dt = -std::log1p(-u) / total;
    const double t_next = t + dt;
    while (obs < n_obs && schedule.times[obs] < t_next) {
      traj.states.row(static_cast<Eigen::Index>(obs)) = state.cast<std::int64_t>();
      ++obs;
    }
    if (obs >= n_obs) break;
    double pick = unif(rng) * total;
    std::size_t r = 0;
    while (r + 1 < n_react && pick > props[r]) {
      pick -= props[r];
      ++r;
    }
    state += network.reactions[r].stoich_change;
    t = t_next;
    if (++events > event_cap) {
      throw simulation_cap_error("ssa_simulate: event cap exceeded (" + std::to_string(event_cap) +
                                 " events)");
    }
  }
  return traj;
}

std::vector<double> simulate_toy(double theta, int r, RngEngine& rng) {
  if (!(theta > 0.0)) throw std::invalid_argument("simulate_toy: theta must be positive");
  if (r < 1) throw std::invalid_argument("simulate_toy: need at least one draw");
  std::uniform_real_distribution<double> unif(0.0, theta);
  std::vector<double> draws(static_cast<std::size_t>(r));
  for (double& d : draws) d = unif(rng);
  return draws;
}

Trajectory simulate_death(double k, double sigma, int initial_count,
                          const ObservationSchedule& schedule, RngEngine& rng,
                          std::uint64_t event_cap) {
  if (k < 0.0 || sigma < 0.0) {
    throw std::invalid_argument("simulate_death: k and sigma must be nonnegative");
  }
  static const ReactionNetwork net = death_network();
  Eigen::VectorXd rates(1);
  rates << k;
  Eigen::VectorXi init(1);
  init << initial_count;
  Trajectory traj = ssa_simulate(net, rates, init, schedule, rng, event_cap);
  std::normal_distribution<double> normal(0.0, 1.0);
  traj.aux = sigma * normal(rng);
  return traj;
}

Trajectory simulate_dimerization(const Eigen::VectorXd& rates, const Eigen::VectorXi& initial_state,
                                 const ObservationSchedule& schedule, RngEngine& rng,
                                 std::uint64_t event_cap) {
  static const ReactionNetwork net = dimerization_network();
  return ssa_simulate(net, rates, initial_state, schedule, rng, event_cap);
}

Trajectory simulate_diffusion(double theta, int voxels, const ObservationSchedule& schedule,
                              RngEngine& rng, std::uint64_t event_cap) {
  if (voxels < 2 || voxels % 2 != 0) {
    throw std::invalid_argument("simulate_diffusion: voxel count must be even and >= 2");
  }
  const ReactionNetwork net = diffusion_network(voxels);
  Eigen::VectorXd rates(1);
  rates << theta;
  Eigen::VectorXi init = Eigen::VectorXi::Zero(voxels);
  init.head(voxels / 2).setConstant(10);
  return ssa_simulate(net, rates, init, schedule, rng, event_cap);
}

}  // namespace abcweight
