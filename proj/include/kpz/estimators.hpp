#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "kpz/curve.hpp"
#include "kpz/tasep_sim.hpp"

namespace kpz {

struct EnsembleLayout {
  double rho = 0.5, t = 0.0, chi = 0.25;
  std::int64_t L = 0;
  std::int64_t j_lo = 0, j_hi = 0;  // central window of width 2t
  std::vector<double> w_list, s_grid;
  std::vector<std::int64_t> j_w;   // rounded rescaled positions
  std::int64_t n_offsets() const { return j_hi - j_lo + 1; }
};

// per-run translation averages over all reference sites of the ring
struct RunObservables {
  std::vector<double> S;   // offsets j_lo..j_hi
  std::vector<double> V;   // offsets j_lo-1..j_hi+1, centred at the exact mean
  std::vector<double> H1, H2;  // per w
  std::vector<double> Fw;      // per w then per s: fraction with H <= s
  double density_t = 0.0;
};

struct LatticeEnsemble {
  EnsembleLayout layout;
  std::uint64_t seed = 0;
  std::vector<RunObservables> runs;
};

EnsembleLayout make_layout(const SimConfig& c, double t);
// record_path non-empty: write the binary run records there
LatticeEnsemble run_ensemble(const SimConfig& c, double t, const std::string& record_path = "",
                             const std::string& config_echo = "");

struct TwoPointEstimate {
  std::vector<std::int64_t> j_offsets;
  std::vector<double> S_hat, stderr_;
  double t = 0.0, rho = 0.5;
};

struct MeanError {
  double value = 0.0, stderr_ = 0.0;
};
MeanError mean_error(const std::vector<double>& per_run);

TwoPointEstimate estimate_S(const LatticeEnsemble& e);
TwoPointEstimate laplacian_var_S(const LatticeEnsemble& e);
// (v[i-1] - 2 v[i] + v[i+1]) / 8 for interior i
std::vector<double> laplacian_over8(const std::vector<double>& v);

struct SumRules {
  MeanError mass;          // sum_j S
  MeanError first;         // sum_j j S / chi
  MeanError second;        // sum_j j^2 S / chi - ((1-2 rho) t)^2
};
SumRules sum_rules(const LatticeEnsemble& e, bool from_variance = false);

struct SecondClassPmf {
  std::vector<std::int64_t> offsets;
  std::vector<double> pmf, stderr_;
  std::vector<std::int64_t> displacements;  // per run
  MeanError mean, second;  // E X and E X^2 - ((1-2 rho) t)^2
};
SecondClassPmf second_class_pmf(const SimConfig& c, double t);

struct EmpiricalFw {
  double w = 0.0;
  std::int64_t j = 0;
  DistributionCurve curve;  // s grid and cdf
  std::vector<double> cdf_stderr;
  MeanError mean, second_moment;
  std::int64_t n_runs = 0;
};
EmpiricalFw empirical_Fw(const LatticeEnsemble& e, std::size_t w_index);

double dkw_epsilon(std::int64_t n, double alpha = 0.05);

struct DominanceEntry {
  std::int64_t j = 0, u = 0;
  double p_stationary = 0, p_step = 0, stderr_ = 0, z = 0;
};
struct DominanceReport {
  std::vector<DominanceEntry> entries;
  double max_z = 0.0;  // largest (p_stationary - p_step) / stderr
  bool ordered = true;
  bool step_nonnegative = true;
};
// h values at offsets j_list for the step initial condition, one reference site per run
std::vector<std::vector<std::int64_t>> step_heights(const SimConfig& c, double t, const std::vector<std::int64_t>& j_list);
DominanceReport step_ic_dominance(const SimConfig& c, double t, const std::vector<std::int64_t>& j_list,
                                  const std::vector<std::int64_t>& u_list);

struct WeakPairing {
  double delta = 0.0;
  MeanError lhs, rhs, diff;
};
WeakPairing weak_pairing(const LatticeEnsemble& e, const std::function<double(double)>& f);

}  // namespace kpz
