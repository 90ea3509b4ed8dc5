#include <cmath>
#include <numeric>

#include "doctest.h"
#include "kpz/estimators.hpp"
#include "kpz/quadrature.hpp"
#include "kpz/tasep_sim.hpp"

using namespace kpz;

namespace {
SimConfig small(double rho, double t, std::int64_t runs, std::uint64_t seed = 3) {
  SimConfig c;
  c.rho = rho;
  c.t_max = t;
  c.n_runs = runs;
  c.seed = seed;
  return c;
}
}  // namespace

TEST_CASE("ring size and validation") {
  CHECK(min_ring_size(50.0) == static_cast<std::int64_t>(std::ceil(200.0 + 8.0 * std::cbrt(2500.0))));
  SimConfig c = small(0.5, 50.0, 100);
  CHECK(ring_size_for(c, 50.0) == min_ring_size(50.0));
  c.ring_size = 100;
  CHECK_THROWS_AS(ring_size_for(c, 50.0), ConfigError);
  CHECK_THROWS_AS(validate(small(1.0, 10.0, 100)), ConfigError);
  CHECK_THROWS_AS(validate(small(0.5, 0.0, 100)), ConfigError);
  CHECK_THROWS_AS(validate(small(0.5, 10.0, 99)), ConfigError);
  CHECK_NOTHROW(validate(small(0.5, 10.0, 100)));
}

TEST_CASE("rng streams are reproducible and distinct") {
  Rng a = make_rng(5, 2, 1), b = make_rng(5, 2, 1), c = make_rng(5, 3, 1), d = make_rng(5, 2, 2);
  const auto x = a();
  CHECK(x == b());
  CHECK(x != c());
  CHECK(x != d());
}

TEST_CASE("fully packed ring is frozen") {
  LatticeState s = init_from(std::vector<std::uint8_t>(64, 1));
  Rng rng = make_rng(1, 0);
  CHECK(evolve(s, 10.0, rng) == 0);
  CHECK(s.time == 10.0);
  CHECK_THROWS_AS(evolve(s, 5.0, rng), ConfigError);
}

TEST_CASE("a lone particle jumps at Poisson rate one") {
  const double t = 7.0;
  const int n = 4000;
  double sum = 0, sum2 = 0;
  for (int r = 0; r < n; ++r) {
    std::vector<std::uint8_t> occ(32, 0);
    occ[0] = 1;
    LatticeState s = init_from(occ);
    Rng rng = make_rng(11, static_cast<std::uint64_t>(r));
    const double k = static_cast<double>(evolve(s, t, rng));
    sum += k;
    sum2 += k * k;
  }
  const double mean = sum / n, var = sum2 / n - mean * mean;
  CHECK(std::fabs(mean - t) <= 4 * std::sqrt(t / n));
  CHECK(std::fabs(var - t) <= 0.1 * t);
}

TEST_CASE("heights move by two per jump and particle number is conserved") {
  const SimConfig c = small(0.4, 30.0, 100);
  LatticeState s = init_stationary(c, 0, 30.0);
  const std::int64_t L = s.size(), P = s.particles();
  const auto h0 = height_profile(s, -L / 3, L / 3);
  Rng rng = make_rng(c.seed, 0, 2);
  const std::int64_t jumps = evolve(s, 30.0, rng);
  CHECK(s.particles() == P);
  CHECK(jumps == std::accumulate(s.jump_counts.begin(), s.jump_counts.end(), std::int64_t{0}));
  const auto h1 = height_profile(s, -L / 3, L / 3);
  for (std::int64_t j = -L / 3; j <= L / 3; ++j) {
    const std::size_t k = static_cast<std::size_t>(j + L / 3);
    CHECK(h1[k] - h0[k] == 2 * s.jump_counts[static_cast<std::size_t>(s.index(j))]);
  }
  CHECK(height(s, 0) == 2 * s.jump_counts[0]);
  CHECK(height(s, 5) == h1[static_cast<std::size_t>(5 + L / 3)]);
}

TEST_CASE("stationary initial data: density and current") {
  const SimConfig c = small(0.3, 20.0, 100);
  double occ = 0, cur = 0, sites = 0;
  const int runs = 200;
  for (int r = 0; r < runs; ++r) {
    LatticeState s = init_stationary(c, static_cast<std::uint64_t>(r), 20.0);
    occ += static_cast<double>(s.particles());
    sites += static_cast<double>(s.size());
    Rng rng = make_rng(c.seed, static_cast<std::uint64_t>(r), 2);
    cur += static_cast<double>(evolve(s, 20.0, rng)) / static_cast<double>(s.size());
  }
  CHECK(occ / sites == doctest::Approx(0.3).epsilon(0.02));
  // jumps per bond per unit time = rho (1 - rho)
  CHECK(cur / runs / 20.0 == doctest::Approx(0.21).epsilon(0.02));
}

TEST_CASE("step initial data layout") {
  const LatticeState s = init_step(10);
  CHECK(s.particles() == 5);
  for (std::int64_t j = -4; j <= 0; ++j) CHECK(s.occupancy[static_cast<std::size_t>(s.index(j))] == 1);
  for (std::int64_t j = 1; j <= 5; ++j) CHECK(s.occupancy[static_cast<std::size_t>(s.index(j))] == 0);
}

TEST_CASE("second-class particle drifts at 1 - 2 rho") {
  const SimConfig c = small(0.3, 20.0, 100);
  double sum = 0;
  const int n = 600;
  for (int r = 0; r < n; ++r) sum += static_cast<double>(second_class_displacement(c, 20.0, static_cast<std::uint64_t>(r)));
  CHECK(std::fabs(sum / n - 8.0) <= 1.0);
  CHECK(second_class_displacement(c, 20.0, 4) == second_class_displacement(c, 20.0, 4));
}

TEST_CASE("estimator helpers") {
  std::vector<double> v(200);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i % 2);
  const MeanError m = mean_error(v);
  CHECK(m.value == 0.5);
  CHECK(m.stderr_ == doctest::Approx(std::sqrt(0.25 * 200.0 / 199.0 / 200.0)).epsilon(1e-12));
  CHECK_THROWS_AS(mean_error({1.0}), StatisticsError);
  CHECK(dkw_epsilon(10000) == doctest::Approx(std::sqrt(std::log(40.0) / 20000.0)).epsilon(1e-14));
  CHECK_THROWS_AS(dkw_epsilon(0), StatisticsError);
  const auto lap = laplacian_over8({1.0, 4.0, 9.0, 16.0});
  REQUIRE(lap.size() == 2);
  CHECK(lap[0] == 0.25);
  CHECK(lap[1] == 0.25);
}

TEST_CASE("ensemble: worker invariance, sum rules, pathwise variance identity") {
  SimConfig c = small(0.4, 12.0, 300, 21);
  c.w_list = {0.0, 0.3};
  c.s_grid = uniform_grid(-4.0, 4.0, 0.5);
  const LatticeEnsemble e1 = run_ensemble(c, 12.0);
  c.workers = 3;
  const LatticeEnsemble e3 = run_ensemble(c, 12.0);
  const TwoPointEstimate a = estimate_S(e1), b = estimate_S(e3);
  CHECK(a.S_hat == b.S_hat);
  CHECK(a.stderr_ == b.stderr_);

  const SumRules r = sum_rules(e1);
  CHECK(std::fabs(r.mass.value - 0.24) <= 4 * r.mass.stderr_ + 1e-12);
  CHECK(std::fabs(r.first.value - 0.2 * 12.0) <= 4 * r.first.stderr_ + 1e-12);

  const TwoPointEstimate v = laplacian_var_S(e1);
  for (std::size_t k = 0; k < a.S_hat.size(); ++k) CHECK(std::fabs(v.S_hat[k] - a.S_hat[k]) <= 1e-12);

  const EmpiricalFw f = empirical_Fw(e1, 1);
  for (std::size_t k = 1; k < f.curve.cdf.size(); ++k) CHECK(f.curve.cdf[k] >= f.curve.cdf[k - 1]);
  CHECK_THROWS_AS(empirical_Fw(e1, 2), ConfigError);
  CHECK_THROWS_AS(weak_pairing(e1, [](double) { return 1.0; }), ConfigError);
}

TEST_CASE("too few runs") {
  SimConfig c = small(0.5, 5.0, 100);
  c.n_runs = 50;
  CHECK_THROWS_AS(run_ensemble(c, 5.0), ConfigError);
}

TEST_CASE("step initial data is stochastically below stationary") {
  SimConfig c = small(0.5, 20.0, 400, 5);
  const DominanceReport r = step_ic_dominance(c, 20.0, {0, 4}, {6, 10, 14});
  CHECK(r.step_nonnegative);
  CHECK(r.max_z <= 3.0);
}
