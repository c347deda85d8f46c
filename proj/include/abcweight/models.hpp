#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "abcweight/rng.hpp"

namespace abcweight {

enum class ModelId { toy, death, dimerization, diffusion };

ModelId model_from_string(const std::string& name);
std::string to_string(ModelId id);

enum class PropensityKind { zeroth, unary, binary_homodimer };

struct Reaction {
  Eigen::VectorXi stoich_change;  // length species_count
  PropensityKind kind;
  int species_index;  // reactant species; unused for zeroth
  int rate_index;
};

struct ReactionNetwork {
  int species_count = 0;
  std::vector<Reaction> reactions;
  int rate_count = 0;
};

// A -> 0 at rate k.
ReactionNetwork death_network();
// R1: S1 -> 0 (k1 S1); R2: S2 -> S3 (k2 S2); R3: S1+S1 -> S2 (k3 S1(S1-1)/2);
// R4: S2 -> S1+S1 (k4 S2).
ReactionNetwork dimerization_network();
// m voxels, nearest-neighbour jumps at rate theta per particle, reflecting ends.
ReactionNetwork diffusion_network(int voxels);

struct ObservationSchedule {
  enum class Spacing { linear, geometric };

  std::vector<double> times;  // n+1 entries, times[0] = 0
  Spacing spacing = Spacing::linear;

  static ObservationSchedule linear(double t_end, int n);
  // t_0 = 0, t_j = t_end * g^(n-j) with g fixed so t_1 = t_end * first_fraction.
  static ObservationSchedule geometric(double t_end, int n, double first_fraction = 1e-3);
};

struct Trajectory {
  // (n+1) observation rows x species columns of copy numbers.
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> states;
  std::optional<double> aux;  // the death process's independent noise draw z
};

// Raised when a realization exceeds the event cap; the SMC layer treats it
// as an automatic rejection.
struct simulation_cap_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kDefaultEventCap = 100'000'000;

// Gillespie direct method. The recorded state at t_j is the state at the last
// event time <= t_j (paths are right-continuous and piecewise constant).
Trajectory ssa_simulate(const ReactionNetwork& network, const Eigen::VectorXd& rates,
                        const Eigen::VectorXi& initial_state, const ObservationSchedule& schedule,
                        RngEngine& rng, std::uint64_t event_cap = kDefaultEventCap);

// r independent Unif[0, theta] draws.
std::vector<double> simulate_toy(double theta, int r, RngEngine& rng);

// Death process observations plus one independent N(0, sigma^2) draw in aux.
Trajectory simulate_death(double k, double sigma, int initial_count,
                          const ObservationSchedule& schedule, RngEngine& rng,
                          std::uint64_t event_cap = kDefaultEventCap);

Trajectory simulate_dimerization(const Eigen::VectorXd& rates, const Eigen::VectorXi& initial_state,
                                 const ObservationSchedule& schedule, RngEngine& rng,
                                 std::uint64_t event_cap = kDefaultEventCap);

// Voxel random walk with 10 particles in each left-half voxel initially.
Trajectory simulate_diffusion(double theta, int voxels, const ObservationSchedule& schedule,
                              RngEngine& rng, std::uint64_t event_cap = kDefaultEventCap);

}  // namespace abcweight
