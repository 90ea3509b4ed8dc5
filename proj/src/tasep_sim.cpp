#include "kpz/tasep_sim.hpp"

#include <algorithm>
#include <cmath>

#include "kpz/quadrature.hpp"

namespace kpz {
namespace {

// 2 moves right past 0 and left past 1
constexpr int kRank[3] = {0, 2, 1};

class Engine {
 public:
  explicit Engine(LatticeState& s) : st_(s), L_(s.size()), where_(static_cast<std::size_t>(L_), -1) {
    for (std::int64_t x = 0; x < L_; ++x) refresh(x);
  }

  std::int64_t run(double t_target, Rng& rng) {
    std::int64_t jumps = 0;
    std::exponential_distribution<double> hold(1.0);
    while (!bonds_.empty()) {
      const double dt = hold(rng) / static_cast<double>(bonds_.size());
      if (st_.time + dt > t_target) break;
      st_.time += dt;
      std::uniform_int_distribution<std::size_t> pick(0, bonds_.size() - 1);
      const std::int64_t x = bonds_[pick(rng)];
      fire(x);
      ++jumps;
    }
    st_.time = std::max(st_.time, t_target);
    return jumps;
  }

  std::int64_t tracked = 0;  // net displacement of the value-2 site

 private:
  LatticeState& st_;
  std::int64_t L_;
  std::vector<std::int64_t> bonds_;
  std::vector<std::int64_t> where_;

  std::int64_t next(std::int64_t x) const { return x + 1 == L_ ? 0 : x + 1; }
  std::int64_t prev(std::int64_t x) const { return x == 0 ? L_ - 1 : x - 1; }

  bool eligible(std::int64_t x) const {
    return kRank[st_.occupancy[static_cast<std::size_t>(x)]] > kRank[st_.occupancy[static_cast<std::size_t>(next(x))]];
  }

  void refresh(std::int64_t x) {
    const bool e = eligible(x);
    std::int64_t& slot = where_[static_cast<std::size_t>(x)];
    if (e && slot < 0) {
      slot = static_cast<std::int64_t>(bonds_.size());
      bonds_.push_back(x);
    } else if (!e && slot >= 0) {
      const std::int64_t last = bonds_.back();
      bonds_[static_cast<std::size_t>(slot)] = last;
      where_[static_cast<std::size_t>(last)] = slot;
      bonds_.pop_back();
      slot = -1;
    }
  }

  void fire(std::int64_t x) {
    auto& occ = st_.occupancy;
    const std::int64_t y = next(x);
    const std::uint8_t a = occ[static_cast<std::size_t>(x)], b = occ[static_cast<std::size_t>(y)];
    if (a == 2) ++tracked;
    if (b == 2) --tracked;
    if (a == 1) ++st_.jump_counts[static_cast<std::size_t>(x)];
    occ[static_cast<std::size_t>(x)] = b;
    occ[static_cast<std::size_t>(y)] = a;
    refresh(prev(x));
    refresh(x);
    refresh(y);
  }
};

}  // namespace

std::int64_t min_ring_size(double t) {
  return static_cast<std::int64_t>(std::ceil(4.0 * t + 8.0 * std::pow(t, 2.0 / 3.0)));
}

std::int64_t ring_size_for(const SimConfig& c, double t) {
  const std::int64_t lo = min_ring_size(t);
  if (c.ring_size == 0) return lo;
  if (c.ring_size < lo) throw ConfigError("ring_size below 4t + 8t^(2/3)");
  return c.ring_size;
}

void validate(const SimConfig& c) {
  if (!(c.rho > 0.0 && c.rho < 1.0)) throw ConfigError("rho must lie in (0,1)");
  if (!(c.t_max > 0.0)) throw ConfigError("t_max must be positive");
  if (c.n_runs < 100) throw ConfigError("n_runs must be at least 100");
  if (c.ring_size < 0) throw ConfigError("ring_size must be non-negative");
  ring_size_for(c, c.t_max);
}

Rng make_rng(std::uint64_t seed, std::uint64_t run_index, std::uint64_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(run_index), static_cast<std::uint32_t>(run_index >> 32),
                    static_cast<std::uint32_t>(tag)};
  return Rng(seq);
}

std::int64_t LatticeState::particles() const {
  std::int64_t n = 0;
  for (std::uint8_t v : occupancy) n += v != 0;
  return n;
}

std::int64_t LatticeState::index(std::int64_t j) const {
  const std::int64_t L = size();
  const std::int64_t r = j % L;
  return r < 0 ? r + L : r;
}

LatticeState init_from(std::vector<std::uint8_t> occupancy) {
  LatticeState s;
  s.jump_counts.assign(occupancy.size(), 0);
  s.occupancy = std::move(occupancy);
  return s;
}

LatticeState init_stationary(const SimConfig& c, std::uint64_t run_index, double t) {
  const std::int64_t L = ring_size_for(c, t);
  Rng rng = make_rng(c.seed, run_index, 1);
  std::bernoulli_distribution coin(c.rho);
  std::vector<std::uint8_t> occ(static_cast<std::size_t>(L));
  for (auto& v : occ) v = coin(rng) ? 1 : 0;
  return init_from(std::move(occ));
}

LatticeState init_step(std::int64_t L) {
  std::vector<std::uint8_t> occ(static_cast<std::size_t>(L), 0);
  occ[0] = 1;
  for (std::int64_t x = L - (L + 1) / 2 + 1; x < L; ++x) occ[static_cast<std::size_t>(x)] = 1;
  return init_from(std::move(occ));
}

std::int64_t evolve(LatticeState& state, double t_target, Rng& rng) {
  if (t_target < state.time) throw ConfigError("evolve: t_target precedes state time");
  Engine e(state);
  return e.run(t_target, rng);
}

std::vector<std::int64_t> height_profile(const LatticeState& s, std::int64_t j_lo, std::int64_t j_hi) {
  if (j_lo > j_hi) throw ConfigError("height_profile: empty window");
  const std::int64_t lo = std::min<std::int64_t>(j_lo, 0), hi = std::max<std::int64_t>(j_hi, 0);
  std::vector<std::int64_t> h(static_cast<std::size_t>(hi - lo + 1));
  const std::size_t z = static_cast<std::size_t>(-lo);
  h[z] = 2 * s.jump_counts[0];
  for (std::int64_t j = 1; j <= hi; ++j)
    h[z + j] = h[z + j - 1] + 1 - 2 * (s.occupancy[static_cast<std::size_t>(s.index(j))] != 0);
  for (std::int64_t j = -1; j >= lo; --j)
    h[z + j] = h[z + j + 1] - 1 + 2 * (s.occupancy[static_cast<std::size_t>(s.index(j + 1))] != 0);
  return {h.begin() + (j_lo - lo), h.begin() + (j_hi - lo + 1)};
}

std::int64_t height(const LatticeState& s, std::int64_t j) {
  return height_profile(s, j, j).front();
}

std::int64_t second_class_displacement(const SimConfig& c, double t, std::uint64_t run_index) {
  LatticeState s = init_stationary(c, run_index, t);
  s.occupancy[0] = 2;
  Rng rng = make_rng(c.seed, run_index, 3);
  Engine e(s);
  e.run(t, rng);
  return e.tracked;
}

}  // namespace kpz
