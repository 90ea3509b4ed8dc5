#include "kpz/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <random>

#include "json.hpp"

#include "kpz/airy_limit.hpp"
#include "kpz/estimators.hpp"
#include "kpz/finite_time.hpp"
#include "kpz/parallel.hpp"
#include "kpz/quadrature.hpp"

namespace kpz {
namespace {

using nlohmann::ordered_json;

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double safe_log_abs(double v) { return std::log(std::max(std::fabs(v), 1e-320)); }

std::string fmt_w(double w) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", w);
  return buf;
}

class CsvOut {
 public:
  CsvOut(const RunManifest& m, const std::string& name, const std::vector<std::string>& header) {
    std::filesystem::create_directories(m.output_dir);
    path_ = (std::filesystem::path(m.output_dir) / name).string();
    f_.open(path_, std::ios::binary);
    if (!f_) throw ConfigError("cannot write " + path_);
    f_ << "# manifest " << m.json() << "\n";
    row(header);
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) f_ << (i ? "," : "") << cells[i];
    f_ << "\n";
  }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ofstream f_;
};

SimConfig sim_from(const RunManifest& m) {
  SimConfig c = sim_config_from(m.params);
  c.seed = m.seed;
  c.workers = m.workers;
  return c;
}

SimConfig plain_sim(double rho, double t, std::int64_t n_runs, std::uint64_t seed, unsigned workers) {
  SimConfig c;
  c.rho = rho;
  c.t_max = t;
  c.n_runs = n_runs;
  c.seed = seed;
  c.workers = workers;
  return c;
}

Check interval_check(std::string name, double measured, double lo, double hi, std::uint64_t seed, std::string detail) {
  Check c;
  c.name = std::move(name);
  c.measured = measured;
  c.tolerance = hi;
  c.relation = "in [" + fmt15(lo) + ", " + fmt15(hi) + "]";
  c.pass = measured >= lo && measured <= hi;
  c.seed = seed;
  c.detail = std::move(detail);
  return c;
}

}  // namespace

std::string RunManifest::json() const {
  ordered_json j;
  j["command"] = command;
  ordered_json p = ordered_json::object();
  for (const auto& [k, v] : params.entries())
    if (k != "seed") p[k] = v;
  j["parameters"] = p;
  j["seed"] = seed;
  j["input_hash"] = "fnv1a64:" + hex64(input_hash());
  return j.dump();
}

std::uint64_t RunManifest::input_hash() const {
  return fnv1a64(command + "\n" + params.canonical() + "seed=" + std::to_string(seed) + "\n");
}

Check make_check(std::string name, double measured, std::string relation, double tolerance, std::uint64_t seed,
                 std::string detail) {
  Check c;
  c.name = std::move(name);
  c.measured = measured;
  c.tolerance = tolerance;
  c.relation = relation;
  c.seed = seed;
  c.detail = std::move(detail);
  if (relation == "<=") c.pass = measured <= tolerance;
  else if (relation == "<") c.pass = measured < tolerance;
  else if (relation == ">=") c.pass = measured >= tolerance;
  else if (relation == ">") c.pass = measured > tolerance;
  else throw ConfigError("make_check: unknown relation " + relation);
  if (!std::isfinite(measured)) c.pass = false;
  return c;
}

bool VerifyReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

std::string VerifyReport::json(const RunManifest& m) const {
  ordered_json j;
  j["suite"] = suite;
  j["manifest"] = ordered_json::parse(m.json());
  ordered_json arr = ordered_json::array();
  for (const Check& c : checks) {
    ordered_json e;
    e["name"] = c.name;
    if (std::isfinite(c.measured)) e["measured"] = c.measured;
    else e["measured"] = fmt15(c.measured);
    e["tolerance"] = c.tolerance;
    e["relation"] = c.relation;
    e["pass"] = c.pass;
    e["seed"] = c.seed;
    if (!c.detail.empty()) e["detail"] = c.detail;
    arr.push_back(e);
  }
  j["checks"] = arr;
  j["pass"] = all_pass();
  return j.dump(2);
}

double pairing_test_function(double w) {
  const double u = 1.0 - (w / 1.2) * (w / 1.2);
  return u > 0 ? u * u * u * u : 0.0;
}

double pairing_test_function_d2(double w) {
  const double a2 = 1.44, u = 1.0 - w * w / a2;
  if (u <= 0) return 0.0;
  return -8.0 * u * u * u / a2 + 48.0 * w * w * u * u / (a2 * a2);
}

double pairing_limit(double rho) {
  const QuadratureRule q = build_interval_rule(0.0, 1.2, 8);
  double acc = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i)
    acc += 2.0 * q.weights[i] * g_sc(q.nodes[i]) * pairing_test_function_d2(q.nodes[i]);
  return rho * (1 - rho) / 4.0 * acc;
}

namespace checks {

Check fgue_self_convergence(double lo, double hi, double step) {
  double worst = 0.0;
  for (double s : uniform_grid(lo, hi, step)) worst = std::max(worst, std::fabs(f_gue(s, 48) - f_gue(s, 96)));
  return make_check("fgue_self_convergence_n48_n96", worst, "<=", 1e-8);
}

std::vector<Check> limit_moments(double w, unsigned workers) {
  LimitOptions opt;
  opt.workers = workers;
  const DistributionCurve c = limit_cdf(w, opt);
  std::vector<Check> out;
  out.push_back(make_check("limit_mean_zero_w" + fmt_w(w), std::fabs(c.moments[1]), "<=", 1e-3));
  for (int ell = 1; ell <= 3; ++ell) {
    const double bp = moments_by_parts(w, ell, opt);
    out.push_back(make_check("limit_by_parts_w" + fmt_w(w) + "_l" + std::to_string(ell), std::fabs(bp - c.moments[ell]),
                             "<=", 1e-3, 0, "by_parts=" + fmt15(bp) + " direct=" + fmt15(c.moments[ell])));
  }
  return out;
}

Check g1_identity(int n_frames, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ur(0.1, 0.9), ut(20.0, 2000.0), uw(-1.5, 1.5), us(-5.0, 5.0);
  double worst = 0.0;
  int done = 0;
  while (done < n_frames) {
    const double rho = ur(rng), t = ut(rng), w = uw(rng), s = us(rng);
    ScaledFrame f;
    try {
      f = make_frame(rho, t, w, s);
    } catch (const ConfigError&) {
      continue;
    }
    ++done;
    const double target = s * f.sigma();
    double v;
    try {
      v = g1(f);
    } catch (const NumericError&) {
      v = f.u + (2 * f.a * f.d - f.m) / (0.25 - f.a * f.a);
    }
    worst = std::max(worst, std::fabs(v - target) / std::max(1.0, std::fabs(target)));
  }
  return make_check("g1_identity_random_frames", worst, "<=", 1e-9, seed, std::to_string(n_frames) + " frames");
}

std::vector<Check> kernel_identities(double rho, double t) {
  const FiniteTimeModel m(rho, t, 0.0);
  const std::string tag = "_rho" + fmt_w(rho) + "_t" + fmt_w(t);
  const double r = m.r_identity_ratio(), l = m.l_identity_ratio();
  return {make_check("kernel_identity_R" + tag, std::fabs(r - 1.0), "<=", 1e-6, 0, "ratio=" + fmt15(r)),
          make_check("kernel_identity_L" + tag, std::fabs(l - 1.0), "<=", 1e-6, 0, "ratio=" + fmt15(l))};
}

Check finite_vs_limit(double t, double step) {
  const FiniteTimeModel m(0.5, t, 0.0);
  double worst = 0.0, at = 0.0;
  for (double s : uniform_grid(-8.0, 4.0, step)) {
    const double d = std::fabs(m.finite_F(s) - f_gue(s));
    if (d > worst) {
      worst = d;
      at = s;
    }
  }
  return make_check("finite_F_vs_F_GUE_t" + fmt_w(t), worst, "<=", 0.05, 0, "worst at s=" + fmt15(at));
}

std::vector<Check> sum_rules(double rho, double t, std::int64_t n_runs, std::uint64_t seed, unsigned workers) {
  const LatticeEnsemble e = run_ensemble(plain_sim(rho, t, n_runs, seed, workers), t);
  const SumRules r = sum_rules(e);
  const double chi = rho * (1 - rho), drift = (1 - 2 * rho) * t;
  const std::string tag = "_rho" + fmt_w(rho) + "_t" + fmt_w(t);
  return {make_check("sum_rule_mass" + tag, std::fabs(r.mass.value - chi) / r.mass.stderr_, "<=", 3.0, seed,
                     "sum=" + fmt15(r.mass.value) + " stderr=" + fmt15(r.mass.stderr_)),
          make_check("sum_rule_first_moment" + tag, std::fabs(r.first.value - drift) / r.first.stderr_, "<=", 3.0, seed,
                     "value=" + fmt15(r.first.value) + " stderr=" + fmt15(r.first.stderr_))};
}

std::vector<Check> delta_var_and_pmf(double rho, double t, std::int64_t n_runs, std::uint64_t seed, unsigned workers) {
  const SimConfig c = plain_sim(rho, t, n_runs, seed, workers);
  const LatticeEnsemble e = run_ensemble(c, t);
  const TwoPointEstimate a = estimate_S(e), b = laplacian_var_S(e);
  double za = 0.0;
  for (std::size_t k = 0; k < a.S_hat.size(); ++k) {
    const double se = std::hypot(a.stderr_[k], b.stderr_[k]);
    const double d = std::fabs(a.S_hat[k] - b.S_hat[k]);
    za = std::max(za, se > 0 ? d / se : (d > 0 ? INFINITY : 0.0));
  }
  const SecondClassPmf p = second_class_pmf(c, t);
  const double chi = rho * (1 - rho);
  std::map<std::int64_t, std::size_t> at;
  for (std::size_t i = 0; i < p.offsets.size(); ++i) at[p.offsets[i]] = i;
  double zp = 0.0;
  for (std::size_t k = 0; k < a.S_hat.size(); ++k) {
    double q = 0.0, qse = 0.0;
    if (auto it = at.find(a.j_offsets[k]); it != at.end()) {
      q = p.pmf[it->second];
      qse = p.stderr_[it->second];
    }
    const double se = std::hypot(qse, a.stderr_[k] / chi);
    const double d = std::fabs(q - a.S_hat[k] / chi);
    zp = std::max(zp, se > 0 ? d / se : (d > 0 ? INFINITY : 0.0));
  }
  const std::string tag = "_rho" + fmt_w(rho) + "_t" + fmt_w(t);
  return {make_check("delta_var_vs_two_point_max_z" + tag, za, "<=", 3.0, seed),
          make_check("second_class_pmf_vs_two_point_max_z" + tag, zp, "<=", 3.0, seed)};
}

Check variance_exponent(double rho, const std::vector<double>& t_list, std::int64_t n_runs, std::uint64_t seed,
                        unsigned workers) {
  std::vector<double> lx, ly;
  std::string detail;
  for (double t : t_list) {
    const SecondClassPmf p = second_class_pmf(plain_sim(rho, t, n_runs, seed, workers), t);
    lx.push_back(std::log(t));
    ly.push_back(std::log(p.second.value));
    detail += "t=" + fmt_w(t) + ":" + fmt15(p.second.value) + " ";
  }
  return interval_check("variance_scaling_exponent", slope(lx, ly), 1.20, 1.47, seed, detail);
}

std::vector<Check> trace_shape(double rho, double t) {
  FiniteOptions o;
  o.n_quad = 96;
  const FiniteTimeModel m(rho, t, 0.0, o);
  std::vector<double> lx, ly;
  double worst = 0.0;
  for (double s = -12.0; s <= -4.0 + 1e-9; s += 1.0) {
    const double a = m.trace_diagonal(s), b = m.trace_double_contour(s, 512);
    worst = std::max(worst, std::fabs(a - b) / std::fabs(b));
    lx.push_back(std::log(-s));
    ly.push_back(std::log(a));
  }
  return {make_check("trace_growth_exponent", slope(lx, ly), ">=", 1.4),
          make_check("trace_diagonal_vs_double_contour", worst, "<=", 1e-4)};
}

std::vector<Check> tail_shapes(double rho, double t, double w) {
  FiniteOptions o;
  o.n_quad = 96;
  const FiniteTimeModel m(rho, t, w, o);
  std::vector<double> xs, ys;
  std::string du;
  for (double s : {2.0, 4.0, 6.0, 8.0}) {
    const double r = std::fabs(s - m.evaluate(s).primitive);
    xs.push_back(s);
    ys.push_back(safe_log_abs(r));
    du += fmt15(r) + " ";
  }
  const double upper = -slope(xs, ys);
  const std::vector<double> lo{-6.0, -8.0, -10.0};
  const DistributionCurve c = finite_cdf(m, lo);
  std::vector<double> lx, ly;
  std::string dl;
  for (std::size_t i = 0; i < lo.size(); ++i) {
    lx.push_back(std::pow(-lo[i], 1.5));
    ly.push_back(safe_log_abs(c.cdf[i]));
    dl += fmt15(c.cdf[i]) + " ";
  }
  const double lower = -slope(lx, ly);
  return {make_check("upper_tail_residual_rate", upper, ">", 0.0, 0, "residuals " + du),
          make_check("lower_tail_three_halves_rate", lower, ">", 0.0, 0, "cdf " + dl)};
}

Check crossval_fixed_time(double rho, double t, double w, std::int64_t n_runs, std::uint64_t seed, unsigned workers) {
  SimConfig c = plain_sim(rho, t, n_runs, seed, workers);
  c.w_list = {w};
  c.s_grid = uniform_grid(-5.0, 4.0, 0.1);
  const LatticeEnsemble e = run_ensemble(c, t);
  const EmpiricalFw emp = empirical_Fw(e, 0);
  FiniteOptions o;
  o.workers = workers;
  const FiniteTimeModel m(rho, t, w, o);
  const DistributionCurve ex = finite_cdf(m, c.s_grid, workers);
  double worst = 0.0, at = 0.0;
  for (std::size_t i = 0; i < c.s_grid.size(); ++i) {
    const double d = std::fabs(emp.curve.cdf[i] - ex.cdf[i]);
    if (d > worst) {
      worst = d;
      at = c.s_grid[i];
    }
  }
  return make_check("finite_cdf_vs_empirical_Fw", worst, "<=", 3.0 * dkw_epsilon(n_runs), seed,
                    "worst at s=" + fmt15(at));
}

std::vector<Check> step_ic(double t, std::int64_t n_runs, std::uint64_t seed, unsigned workers) {
  const SimConfig c = plain_sim(0.5, t, n_runs, seed, workers);
  const std::vector<std::int64_t> js{-4, 0, 4};
  const auto h = step_heights(c, t, js);
  double worst = 0.0;
  const std::int64_t center = std::llround(t / 2);
  for (std::size_t p = 0; p < js.size(); ++p)
    for (std::int64_t u = center - 10; u <= center + 10; ++u) {
      if ((u + js[p]) % 2 != 0) continue;
      const int M = static_cast<int>((u - js[p]) / 2), N = static_cast<int>((u + js[p]) / 2);
      if (M < 1 || N < 1) continue;
      double hits = 0;
      for (const auto& r : h) hits += r[p] >= u;
      worst = std::max(worst, std::fabs(hits / static_cast<double>(h.size()) - step_lpp_cdf(M, N, t)));
    }
  const DominanceReport d =
      step_ic_dominance(c, t, js, {center - 6, center - 4, center - 2, center, center + 2, center + 4, center + 6});
  return {make_check("step_ic_exact_formula", worst, "<=", 3.0 * dkw_epsilon(n_runs), seed),
          make_check("step_ic_dominance_max_z", d.max_z, "<=", 3.0, seed),
          make_check("step_ic_height_nonnegative", d.step_nonnegative ? 0.0 : 1.0, "<=", 0.0, seed)};
}

std::vector<Check> moment_convergence(double rho, double w, const std::vector<double>& t_list, std::int64_t n_runs,
                                      std::uint64_t seed, unsigned workers) {
  const double g = g_sc(w);
  const double target = pairing_limit(rho);
  std::vector<Check> out;
  std::vector<double> lx, gaps;
  std::string detail;
  double last_lhs = 0.0;
  for (double t : t_list) {
    SimConfig c = plain_sim(rho, t, n_runs, seed, workers);
    c.w_list = {w};
    const LatticeEnsemble e = run_ensemble(c, t);
    const EmpiricalFw f = empirical_Fw(e, 0);
    const double gap = std::fabs(f.second_moment.value - g) / g;
    lx.push_back(std::log(t));
    gaps.push_back(gap);
    detail += "t=" + fmt_w(t) + ":" + fmt15(f.second_moment.value) + "+-" + fmt15(f.second_moment.stderr_) + " ";
    const WeakPairing wp = weak_pairing(e, pairing_test_function);
    const double se = std::hypot(wp.lhs.stderr_, wp.rhs.stderr_);
    out.push_back(make_check("weak_pairing_sides_agree_t" + fmt_w(t), std::fabs(wp.lhs.value - wp.rhs.value) / se, "<=",
                             3.0, seed, "lhs=" + fmt15(wp.lhs.value) + " rhs=" + fmt15(wp.rhs.value)));
    last_lhs = wp.lhs.value;
  }
  out.insert(out.begin(), make_check("second_moment_gap_trend", slope(lx, gaps), "<", 0.0, seed,
                                     "g_sc=" + fmt15(g) + " " + detail));
  out.insert(out.begin() + 1, make_check("second_moment_final_gap", gaps.back(), "<=", 0.10, seed));
  out.push_back(make_check("weak_pairing_vs_limit", std::fabs(last_lhs - target) / std::fabs(target), "<=", 0.15, seed,
                           "limit=" + fmt15(target) + " lhs=" + fmt15(last_lhs)));
  return out;
}

}  // namespace checks

const std::vector<std::string>& verify_suites() {
  static const std::vector<std::string> s{"identities", "tails", "moments", "crossval"};
  return s;
}

VerifyReport run_verify(const std::string& suite, const RunManifest& m) {
  if (suite.empty()) throw UsageError("verify: empty suite name (identities, tails, moments, crossval)");
  const auto& known = verify_suites();
  if (std::find(known.begin(), known.end(), suite) == known.end()) throw UsageError("verify: unknown suite '" + suite + "'");
  const Config& p = m.params;
  const double rho = p.get_double("rho", 0.5), t = p.get_double("t_max", 50.0);
  const std::int64_t runs = p.get_int("n_runs", 1000);
  const std::uint64_t seed = m.seed;
  const unsigned wk = m.workers;
  const std::vector<double> ws = p.get_list("w_list", {0.3});
  VerifyReport r;
  r.suite = suite;
  auto add = [&](std::vector<Check> v) { r.checks.insert(r.checks.end(), v.begin(), v.end()); };
  if (suite == "identities") {
    r.checks.push_back(checks::g1_identity(static_cast<int>(p.get_int("n_frames", 100)), seed));
    add(checks::kernel_identities(rho, t));
    const FiniteTimeModel fm(rho, t, 0.0);
    double worst = 0.0;
    for (double s : {-3.0, -2.0, -1.0}) {
      const double a = fm.trace_diagonal(s), b = fm.trace_double_contour(s, 512);
      worst = std::max(worst, std::fabs(a - b) / std::fabs(b));
    }
    r.checks.push_back(make_check("widom_trace_chain", worst, "<=", 1e-4));
    add(checks::sum_rules(rho, t, runs, seed, wk));
    add(checks::delta_var_and_pmf(rho, std::min(t, 20.0), runs, seed, wk));
  } else if (suite == "tails") {
    add(checks::tail_shapes(rho, t, ws.front()));
    add(checks::trace_shape(rho, t));
  } else if (suite == "moments") {
    for (double w : ws) add(checks::limit_moments(w, wk));
  } else {
    r.checks.push_back(checks::finite_vs_limit(t));
    r.checks.push_back(checks::crossval_fixed_time(rho, t, ws.front(), runs, seed, wk));
    add(checks::step_ic(t, runs, seed, wk));
  }
  return r;
}

int run_simulate(const RunManifest& m, std::ostream& log) {
  const SimConfig c = sim_from(m);
  const double t = c.t_max;
  std::string rec;
  if (m.params.get_int("record_runs", 0) != 0) {
    std::filesystem::create_directories(m.output_dir);
    rec = (std::filesystem::path(m.output_dir) / "runs.bin").string();
  }
  const LatticeEnsemble e = run_ensemble(c, t, rec, m.json());
  const TwoPointEstimate a = estimate_S(e), b = laplacian_var_S(e);
  {
    CsvOut out(m, "two_point.csv", {"rho", "t", "j", "S_hat", "stderr", "S_laplacian", "stderr_laplacian"});
    for (std::size_t k = 0; k < a.S_hat.size(); ++k)
      out.row({fmt15(c.rho), fmt15(t), std::to_string(a.j_offsets[k]), fmt15(a.S_hat[k]), fmt15(a.stderr_[k]),
               fmt15(b.S_hat[k]), fmt15(b.stderr_[k])});
    log << "wrote " << out.path() << "\n";
  }
  {
    CsvOut out(m, "sum_rules.csv", {"estimator", "quantity", "value", "stderr", "exact"});
    const double chi = c.rho * (1 - c.rho), drift = (1 - 2 * c.rho) * t;
    for (bool lap : {false, true}) {
      const SumRules r = sum_rules(e, lap);
      const std::string est = lap ? "laplacian" : "two_point";
      out.row({est, "mass", fmt15(r.mass.value), fmt15(r.mass.stderr_), fmt15(chi)});
      out.row({est, "first_moment", fmt15(r.first.value), fmt15(r.first.stderr_), fmt15(drift)});
      out.row({est, "centred_second_moment", fmt15(r.second.value), fmt15(r.second.stderr_), "nan"});
    }
    log << "wrote " << out.path() << "\n";
  }
  if (!c.w_list.empty()) {
    CsvOut cdf(m, "empirical_fw.csv", {"w", "j", "s", "cdf", "stderr", "dkw_band"});
    CsvOut mom(m, "h_moments.csv", {"w", "j", "t", "mean", "mean_stderr", "second_moment", "second_stderr"});
    for (std::size_t k = 0; k < c.w_list.size(); ++k) {
      const EmpiricalFw f = empirical_Fw(e, k);
      const double band = dkw_epsilon(f.n_runs);
      for (std::size_t q = 0; q < f.curve.s.size(); ++q)
        cdf.row({fmt15(f.w), std::to_string(f.j), fmt15(f.curve.s[q]), fmt15(f.curve.cdf[q]), fmt15(f.cdf_stderr[q]),
                 fmt15(band)});
      mom.row({fmt15(f.w), std::to_string(f.j), fmt15(t), fmt15(f.mean.value), fmt15(f.mean.stderr_),
               fmt15(f.second_moment.value), fmt15(f.second_moment.stderr_)});
    }
    log << "wrote " << cdf.path() << "\nwrote " << mom.path() << "\n";
  }
  if (!rec.empty()) log << "wrote " << rec << "\n";
  return 0;
}

int run_limit_dist(const RunManifest& m, std::ostream& log) {
  const Config& p = m.params;
  const std::vector<double> ws = p.get_list("w_list", {0.3});
  LimitOptions opt;
  opt.n_quad = static_cast<std::size_t>(p.get_int("n_quad", 64));
  opt.workers = m.workers;
  const std::vector<double> grid = s_grid_from(p, -10.0, 8.0, 0.05);
  CsvOut cdf(m, "limit_cdf.csv", {"w", "s", "cdf", "pdf"});
  CsvOut mom(m, "limit_moments.csv", {"w", "moment_order", "value", "est_error", "by_parts"});
  for (double w : ws) {
    LimitLawRequest req;
    req.w = w;
    req.s_grid = grid;
    req.n_quad = opt.n_quad;
    const DistributionCurve c = limit_cdf(req, m.workers);
    for (std::size_t i = 0; i < c.s.size(); ++i) cdf.row({fmt15(w), fmt15(c.s[i]), fmt15(c.cdf[i]), fmt15(c.pdf[i])});
    for (int ell = 1; ell <= 4; ++ell) {
      const std::string bp = ell <= 3 ? fmt15(moments_by_parts(w, ell, opt)) : "nan";
      mom.row({fmt15(w), std::to_string(ell), fmt15(c.moments[static_cast<std::size_t>(ell)]),
               fmt15(c.moment_errors[static_cast<std::size_t>(ell)]), bp});
    }
  }
  log << "wrote " << cdf.path() << "\nwrote " << mom.path() << "\n";
  return 0;
}

int run_finite_dist(const RunManifest& m, std::ostream& log) {
  const Config& p = m.params;
  const double rho = p.get_double("rho", 0.5), t = p.get_double("t_max", 100.0);
  FiniteOptions o;
  o.n_quad = static_cast<std::size_t>(p.get_int("n_quad", 48));
  o.map_scale = p.get_double("map_scale", 1.5);
  o.contour_points = static_cast<std::size_t>(p.get_int("contour_points", 0));
  o.workers = m.workers;
  const std::vector<double> grid = s_grid_from(p, -4.0, 4.0, 0.1);
  CsvOut out(m, "finite_dist.csv", {"rho", "t", "w", "s", "F", "g1", "g2", "g3", "G0", "Fw_cdf", "trace"});
  for (double w : p.get_list("w_list", {0.3})) {
    const FiniteTimeModel model(rho, t, w, o);
    const DistributionCurve c = finite_cdf(model, grid, m.workers);
    std::vector<FinitePoint> pts(grid.size());
    parallel_for(grid.size(), m.workers, [&](std::size_t i) { pts[i] = model.evaluate(grid[i]); });
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const FinitePoint& q = pts[i];
      out.row({fmt15(rho), fmt15(t), fmt15(w), fmt15(q.s), fmt15(q.F), fmt15(q.g1), fmt15(q.g2), fmt15(q.g3),
               fmt15(q.G0), fmt15(c.cdf[i]), fmt15(q.trace)});
    }
  }
  log << "wrote " << out.path() << "\n";
  return 0;
}

int run_scaling(const RunManifest& m, std::ostream& log) {
  SimConfig c = sim_from(m);
  c.w_list.clear();
  const double chi = c.rho * (1 - c.rho);
  const std::vector<double> wg =
      uniform_grid(m.params.get_double("w_min", -1.5), m.params.get_double("w_max", 1.5), m.params.get_double("w_step", 0.1));
  const double h = 0.1;
  // g_sc on the distinct |w| values needed by the second differences
  std::map<long long, double> table;
  auto key = [](double v) { return std::llround(std::fabs(v) * 1e9); };
  for (double w : wg)
    for (double v : {w - h, w - 0.5 * h, w, w + 0.5 * h, w + h}) table[key(v)] = 0.0;
  std::vector<long long> keys;
  for (const auto& kv : table) keys.push_back(kv.first);
  std::vector<double> vals(keys.size());
  parallel_for(keys.size(), m.workers, [&](std::size_t i) { vals[i] = g_sc(static_cast<double>(keys[i]) * 1e-9); });
  for (std::size_t i = 0; i < keys.size(); ++i) table[keys[i]] = vals[i];
  auto g = [&](double v) { return table.at(key(v)); };

  CsvOut out(m, "scaling.csv", {"rho", "t", "w", "j", "scaled_S", "stderr", "exact"});
  CsvOut pw(m, "weak_pairing.csv", {"rho", "t", "lhs", "lhs_stderr", "rhs", "rhs_stderr", "limit", "relative_gap"});
  const double lim = pairing_limit(c.rho);
  for (double t : m.params.get_list("t_list", {c.t_max})) {
    const double delta = 1.0 / (2 * std::cbrt(chi) * std::pow(t, 2.0 / 3.0));
    const double jc = (1 - 2 * c.rho) * t;
    const LatticeEnsemble e = run_ensemble(c, t);
    const TwoPointEstimate est = estimate_S(e);
    for (double w : wg) {
      const std::int64_t j = std::llround(jc + w / delta);
      if (j < e.layout.j_lo || j > e.layout.j_hi) throw ConfigError("scaling: w grid exceeds the simulated window");
      const std::size_t k = static_cast<std::size_t>(j - e.layout.j_lo);
      const double exact =
          chi / 4.0 * richardson_second_difference(g(w - h), g(w), g(w + h), g(w - 0.5 * h), g(w + 0.5 * h), h);
      out.row({fmt15(c.rho), fmt15(t), fmt15(w), std::to_string(j), fmt15(est.S_hat[k] / delta),
               fmt15(est.stderr_[k] / delta), fmt15(exact)});
    }
    const WeakPairing wp = weak_pairing(e, pairing_test_function);
    pw.row({fmt15(c.rho), fmt15(t), fmt15(wp.lhs.value), fmt15(wp.lhs.stderr_), fmt15(wp.rhs.value),
            fmt15(wp.rhs.stderr_), fmt15(lim), fmt15(std::fabs(wp.lhs.value - lim) / std::fabs(lim))});
  }
  log << "wrote " << out.path() << "\nwrote " << pw.path() << "\n";
  return 0;
}

int run_verify_command(const RunManifest& m, std::ostream& log) {
  const std::string suite = m.params.get("suite");
  const VerifyReport r = run_verify(suite, m);
  std::filesystem::create_directories(m.output_dir);
  const std::string path = (std::filesystem::path(m.output_dir) / ("verify_" + suite + ".json")).string();
  std::ofstream f(path, std::ios::binary);
  f << r.json(m) << "\n";
  for (const Check& c : r.checks)
    log << (c.pass ? "PASS " : "FAIL ") << c.name << " measured=" << fmt15(c.measured) << " " << c.relation
        << (c.relation.rfind("in", 0) == 0 ? "" : " " + fmt15(c.tolerance)) << "\n";
  log << "wrote " << path << "\n";
  return r.all_pass() ? 0 : 1;
}

int run_command(const RunManifest& m, std::ostream& log) {
  if (m.command == "simulate") return run_simulate(m, log);
  if (m.command == "limit-dist") return run_limit_dist(m, log);
  if (m.command == "finite-dist") return run_finite_dist(m, log);
  if (m.command == "verify") return run_verify_command(m, log);
  if (m.command == "scaling") return run_scaling(m, log);
  throw UsageError("unknown command '" + m.command + "'");
}

}  // namespace kpz
