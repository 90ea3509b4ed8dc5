#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace kpz {

class StatisticsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SimConfig {
  double rho = 0.5;
  double t_max = 50.0;
  std::int64_t ring_size = 0;  // 0 -> smallest admissible
  std::int64_t n_runs = 1000;
  std::uint64_t seed = 1;
  std::vector<double> w_list;
  std::vector<double> s_grid;
  unsigned workers = 1;
};

std::int64_t min_ring_size(double t);
// ring size actually used for time t (config value or the minimum)
std::int64_t ring_size_for(const SimConfig& c, double t);
void validate(const SimConfig& c);  // ConfigError

using Rng = std::mt19937_64;
// independent stream per (seed, run, tag)
Rng make_rng(std::uint64_t seed, std::uint64_t run_index, std::uint64_t tag = 0);

// site j lives at index j mod L; value 1 = particle, 2 = second-class particle
struct LatticeState {
  std::vector<std::uint8_t> occupancy;
  std::vector<std::int64_t> jump_counts;  // N_t(j): jumps across bond (j, j+1)
  double time = 0.0;
  std::int64_t size() const { return static_cast<std::int64_t>(occupancy.size()); }
  std::int64_t particles() const;
  std::int64_t index(std::int64_t j) const;
};

LatticeState init_stationary(const SimConfig& c, std::uint64_t run_index, double t);
// occupied for j <= 0, j in (-L/2, 0]
LatticeState init_step(std::int64_t L);
LatticeState init_from(std::vector<std::uint8_t> occupancy);

// exact Gillespie dynamics on the ring; returns the number of jumps
std::int64_t evolve(LatticeState& state, double t_target, Rng& rng);

// h_t(j) = 2 N_t(0) + sum_{i=1}^{j} (1 - 2 eta_i(t)), unwrapped around the ring
std::int64_t height(const LatticeState& state, std::int64_t j);
// h_t(j) for j in [j_lo, j_hi]
std::vector<std::int64_t> height_profile(const LatticeState& state, std::int64_t j_lo, std::int64_t j_hi);

// displacement at time t of a second-class particle started at site 0
// in a Bernoulli(rho) environment
std::int64_t second_class_displacement(const SimConfig& c, double t, std::uint64_t run_index);

}  // namespace kpz
