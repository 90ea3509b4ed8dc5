#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "kpz/config.hpp"

namespace kpz {

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RunManifest {
  std::string command;
  Config params;
  std::string output_dir = ".";
  std::uint64_t seed = 1;
  unsigned workers = 1;
  // parameters with the effective seed; output_dir and workers excluded
  std::string json() const;
  std::uint64_t input_hash() const;
};

struct Check {
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string relation = "<=";  // measured <relation> tolerance
  bool pass = false;
  std::uint64_t seed = 0;
  std::string detail;
};

Check make_check(std::string name, double measured, std::string relation, double tolerance, std::uint64_t seed = 0,
                 std::string detail = "");

struct VerifyReport {
  std::string suite;
  std::vector<Check> checks;
  bool all_pass() const;
  std::string json(const RunManifest& m) const;
};

const std::vector<std::string>& verify_suites();
VerifyReport run_verify(const std::string& suite, const RunManifest& m);

// weak-pairing test function (1 - (w/1.2)^2)^4 and its second derivative
double pairing_test_function(double w);
double pairing_test_function_d2(double w);
// (chi/4) int g_sc''(w) f(w) dw, by parts
double pairing_limit(double rho);

namespace checks {

Check fgue_self_convergence(double lo = -8.0, double hi = 4.0, double step = 0.25);
std::vector<Check> limit_moments(double w, unsigned workers);
Check g1_identity(int n_frames, std::uint64_t seed);
std::vector<Check> kernel_identities(double rho, double t);
Check finite_vs_limit(double t, double step = 0.25);
std::vector<Check> sum_rules(double rho, double t, std::int64_t n_runs, std::uint64_t seed, unsigned workers);
std::vector<Check> delta_var_and_pmf(double rho, double t, std::int64_t n_runs, std::uint64_t seed, unsigned workers);
Check variance_exponent(double rho, const std::vector<double>& t_list, std::int64_t n_runs, std::uint64_t seed,
                        unsigned workers);
std::vector<Check> trace_shape(double rho, double t);
std::vector<Check> tail_shapes(double rho, double t, double w);
Check crossval_fixed_time(double rho, double t, double w, std::int64_t n_runs, std::uint64_t seed, unsigned workers);
std::vector<Check> step_ic(double t, std::int64_t n_runs, std::uint64_t seed, unsigned workers);
std::vector<Check> moment_convergence(double rho, double w, const std::vector<double>& t_list, std::int64_t n_runs,
                                      std::uint64_t seed, unsigned workers);

}  // namespace checks

// command runners; return the process exit code
int run_simulate(const RunManifest& m, std::ostream& log);
int run_limit_dist(const RunManifest& m, std::ostream& log);
int run_finite_dist(const RunManifest& m, std::ostream& log);
int run_verify_command(const RunManifest& m, std::ostream& log);
int run_scaling(const RunManifest& m, std::ostream& log);
int run_command(const RunManifest& m, std::ostream& log);

}  // namespace kpz
