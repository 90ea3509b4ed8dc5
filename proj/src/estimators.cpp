#include "kpz/estimators.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "kpz/parallel.hpp"
#include "kpz/quadrature.hpp"
#include "kpz/simd.hpp"

namespace kpz {
namespace {

constexpr std::int64_t kMinRuns = 100;

void require_runs(std::size_t n) {
  if (static_cast<std::int64_t>(n) < kMinRuns) throw StatisticsError("estimator needs at least 100 runs");
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int k = 0; k < 8; ++k) out.push_back(static_cast<char>((v >> (8 * k)) & 0xff));
}

double height_scale(const EnsembleLayout& l) { return 2.0 * std::pow(l.chi, 2.0 / 3.0) * std::cbrt(l.t); }

double c_w(const EnsembleLayout& l, double w) {
  return (1 - 2 * l.chi) * l.t + 2 * w * (1 - 2 * l.rho) * std::cbrt(l.chi) * std::pow(l.t, 2.0 / 3.0);
}

RunObservables observe(const EnsembleLayout& lay, const LatticeState& s0, const LatticeState& st, std::string* record) {
  const std::int64_t L = lay.L;
  const std::int64_t a = lay.j_lo - 1, b = lay.j_hi + 1;
  const std::int64_t ext = L + b - a;
  const std::vector<std::int64_t> h0 = height_profile(s0, 0, L - 1);
  const std::vector<std::int64_t> ht = height_profile(st, a, L - 1 + b);

  std::vector<std::uint8_t> eta0(static_cast<std::size_t>(L)), etat(static_cast<std::size_t>(ext));
  for (std::int64_t x = 0; x < L; ++x) eta0[static_cast<std::size_t>(x)] = s0.occupancy[static_cast<std::size_t>(x)] != 0;
  for (std::int64_t y = a; y < a + ext; ++y)
    etat[static_cast<std::size_t>(y - a)] = st.occupancy[static_cast<std::size_t>(st.index(y))] != 0;

  std::vector<std::int32_t> h0i(h0.begin(), h0.end()), hti(ht.begin(), ht.end());
  std::vector<std::int64_t> pt(static_cast<std::size_t>(ext) + 1, 0), pt2(static_cast<std::size_t>(ext) + 1, 0);
  for (std::size_t k = 0; k < static_cast<std::size_t>(ext); ++k) {
    pt[k + 1] = pt[k] + ht[k];
    pt2[k + 1] = pt2[k] + ht[k] * ht[k];
  }
  std::int64_t sum0 = 0, sum02 = 0, P = 0;
  for (std::int64_t x = 0; x < L; ++x) {
    sum0 += h0[static_cast<std::size_t>(x)];
    sum02 += h0[static_cast<std::size_t>(x)] * h0[static_cast<std::size_t>(x)];
    P += eta0[static_cast<std::size_t>(x)];
  }

  RunObservables r;
  const double Ld = static_cast<double>(L), rho = lay.rho;
  r.S.resize(static_cast<std::size_t>(lay.n_offsets()));
  for (std::int64_t j = lay.j_lo; j <= lay.j_hi; ++j) {
    const std::uint64_t c = simd::and_count_u8(etat.data() + (j - a), eta0.data(), static_cast<std::size_t>(L));
    r.S[static_cast<std::size_t>(j - lay.j_lo)] =
        (static_cast<double>(c) - 2 * rho * static_cast<double>(P) + Ld * rho * rho) / Ld;
  }
  r.V.resize(static_cast<std::size_t>(b - a + 1));
  for (std::int64_t j = a; j <= b; ++j) {
    const std::size_t off = static_cast<std::size_t>(j - a);
    const std::int64_t dot = simd::dot_i32(hti.data() + off, h0i.data(), static_cast<std::size_t>(L));
    const std::int64_t sd = pt[off + L] - pt[off] - sum0;
    const std::int64_t sd2 = pt2[off + L] - pt2[off] - 2 * dot + sum02;
    const double mu = 2 * lay.chi * lay.t + static_cast<double>(j) * (1 - 2 * rho);
    r.V[off] = (static_cast<double>(sd2) - 2 * mu * static_cast<double>(sd) + Ld * mu * mu) / Ld;
  }

  const double scale = height_scale(lay);
  const std::size_t ns = lay.s_grid.size();
  r.H1.resize(lay.w_list.size());
  r.H2.resize(lay.w_list.size());
  r.Fw.resize(lay.w_list.size() * ns);
  for (std::size_t k = 0; k < lay.w_list.size(); ++k) {
    const std::size_t off = static_cast<std::size_t>(lay.j_w[k] - a);
    const double cw = c_w(lay, lay.w_list[k]);
    std::int64_t lo = INT64_MAX, hi = INT64_MIN;
    double m1 = 0, m2 = 0;
    for (std::int64_t x = 0; x < L; ++x) {
      const std::int64_t d = ht[off + static_cast<std::size_t>(x)] - h0[static_cast<std::size_t>(x)];
      lo = std::min(lo, d);
      hi = std::max(hi, d);
      const double H = (cw - static_cast<double>(d)) / scale;
      m1 += H;
      m2 += H * H;
    }
    r.H1[k] = m1 / Ld;
    r.H2[k] = m2 / Ld;
    // suffix counts of the integer increments
    std::vector<std::int64_t> tail(static_cast<std::size_t>(hi - lo + 2), 0);
    for (std::int64_t x = 0; x < L; ++x)
      ++tail[static_cast<std::size_t>(ht[off + static_cast<std::size_t>(x)] - h0[static_cast<std::size_t>(x)] - lo)];
    for (std::int64_t i = hi - lo - 1; i >= 0; --i) tail[static_cast<std::size_t>(i)] += tail[static_cast<std::size_t>(i + 1)];
    for (std::size_t q = 0; q < ns; ++q) {
      const double thr = std::ceil(cw - lay.s_grid[q] * scale);
      double frac;
      if (thr <= static_cast<double>(lo)) frac = 1.0;
      else if (thr > static_cast<double>(hi)) frac = 0.0;
      else frac = static_cast<double>(tail[static_cast<std::size_t>(static_cast<std::int64_t>(thr) - lo)]) / Ld;
      r.Fw[k * ns + q] = frac;
    }
  }
  std::int64_t Pt = 0;
  for (std::uint8_t v : st.occupancy) Pt += v != 0;
  r.density_t = static_cast<double>(Pt) / Ld;

  if (record) {
    for (std::int64_t j = lay.j_lo; j <= lay.j_hi; ++j)
      record->push_back(static_cast<char>(s0.occupancy[static_cast<std::size_t>(s0.index(j))] != 0));
    for (std::int64_t j = lay.j_lo; j <= lay.j_hi; ++j)
      record->push_back(static_cast<char>(st.occupancy[static_cast<std::size_t>(st.index(j))] != 0));
    for (std::int64_t j = lay.j_lo; j <= lay.j_hi; ++j)
      put_u64(*record, static_cast<std::uint64_t>(st.jump_counts[static_cast<std::size_t>(st.index(j))]));
  }
  return r;
}

}  // namespace

EnsembleLayout make_layout(const SimConfig& c, double t) {
  validate(c);
  if (!(t > 0.0)) throw ConfigError("simulation time must be positive");
  EnsembleLayout l;
  l.rho = c.rho;
  l.t = t;
  l.chi = c.rho * (1 - c.rho);
  l.L = ring_size_for(c, t);
  const std::int64_t center = std::llround((1 - 2 * c.rho) * t);
  const std::int64_t half = static_cast<std::int64_t>(std::ceil(t));
  l.j_lo = center - half;
  l.j_hi = center + half;
  l.w_list = c.w_list;
  l.s_grid = c.s_grid;
  for (double w : c.w_list) {
    const std::int64_t j = std::llround((1 - 2 * c.rho) * t + 2 * w * std::cbrt(l.chi) * std::pow(t, 2.0 / 3.0));
    if (j < l.j_lo || j > l.j_hi) throw ConfigError("w outside the simulated window");
    l.j_w.push_back(j);
  }
  return l;
}

LatticeEnsemble run_ensemble(const SimConfig& c, double t, const std::string& record_path, const std::string& config_echo) {
  LatticeEnsemble e;
  e.layout = make_layout(c, t);
  e.seed = c.seed;
  const std::size_t n = static_cast<std::size_t>(c.n_runs);
  e.runs.resize(n);
  const bool rec = !record_path.empty();
  std::vector<std::string> records(rec ? n : 0);
  parallel_for(n, c.workers, [&](std::size_t i) {
    LatticeState s0 = init_stationary(c, i, t);
    LatticeState st = s0;
    Rng rng = make_rng(c.seed, i, 2);
    evolve(st, t, rng);
    e.runs[i] = observe(e.layout, s0, st, rec ? &records[i] : nullptr);
  });
  if (rec) {
    std::ofstream out(record_path, std::ios::binary);
    if (!out) throw ConfigError("cannot open run-record file " + record_path);
    std::string head = "KPZRUNS1";
    put_u64(head, config_echo.size());
    head += config_echo;
    put_u64(head, c.seed);
    put_u64(head, static_cast<std::uint64_t>(e.layout.L));
    put_u64(head, static_cast<std::uint64_t>(e.layout.j_lo));
    put_u64(head, static_cast<std::uint64_t>(e.layout.j_hi));
    put_u64(head, n);
    put_u64(head, std::bit_cast<std::uint64_t>(t));
    out.write(head.data(), static_cast<std::streamsize>(head.size()));
    for (const auto& r : records) out.write(r.data(), static_cast<std::streamsize>(r.size()));
  }
  return e;
}

MeanError mean_error(const std::vector<double>& v) {
  if (v.size() < 2) throw StatisticsError("need at least two runs");
  double m = 0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double q = 0;
  for (double x : v) q += (x - m) * (x - m);
  const double n = static_cast<double>(v.size());
  return {m, std::sqrt(q / (n - 1) / n)};
}

namespace {

TwoPointEstimate from_per_run(const LatticeEnsemble& e, const std::function<std::vector<double>(const RunObservables&)>& per_run) {
  require_runs(e.runs.size());
  const EnsembleLayout& l = e.layout;
  const std::size_t m = static_cast<std::size_t>(l.n_offsets());
  std::vector<std::vector<double>> cols(m, std::vector<double>(e.runs.size()));
  for (std::size_t r = 0; r < e.runs.size(); ++r) {
    const std::vector<double> v = per_run(e.runs[r]);
    for (std::size_t k = 0; k < m; ++k) cols[k][r] = v[k];
  }
  TwoPointEstimate out;
  out.t = l.t;
  out.rho = l.rho;
  for (std::size_t k = 0; k < m; ++k) {
    const MeanError me = mean_error(cols[k]);
    out.j_offsets.push_back(l.j_lo + static_cast<std::int64_t>(k));
    out.S_hat.push_back(me.value);
    out.stderr_.push_back(me.stderr_);
  }
  return out;
}

}  // namespace

std::vector<double> laplacian_over8(const std::vector<double>& v) {
  std::vector<double> out;
  for (std::size_t i = 1; i + 1 < v.size(); ++i) out.push_back((v[i - 1] - 2 * v[i] + v[i + 1]) / 8.0);
  return out;
}

TwoPointEstimate estimate_S(const LatticeEnsemble& e) {
  return from_per_run(e, [](const RunObservables& r) { return r.S; });
}

TwoPointEstimate laplacian_var_S(const LatticeEnsemble& e) {
  return from_per_run(e, [](const RunObservables& r) { return laplacian_over8(r.V); });
}

SumRules sum_rules(const LatticeEnsemble& e, bool from_variance) {
  require_runs(e.runs.size());
  const EnsembleLayout& l = e.layout;
  const double drift = (1 - 2 * l.rho) * l.t;
  std::vector<double> m0, m1, m2;
  for (const RunObservables& r : e.runs) {
    const std::vector<double> s = from_variance ? laplacian_over8(r.V) : r.S;
    double a = 0, b = 0, c = 0;
    for (std::size_t k = 0; k < s.size(); ++k) {
      const double j = static_cast<double>(l.j_lo + static_cast<std::int64_t>(k));
      a += s[k];
      b += j * s[k];
      c += j * j * s[k];
    }
    m0.push_back(a);
    m1.push_back(b / l.chi);
    m2.push_back(c / l.chi - drift * drift);
  }
  return {mean_error(m0), mean_error(m1), mean_error(m2)};
}

SecondClassPmf second_class_pmf(const SimConfig& c, double t) {
  validate(c);
  const std::size_t n = static_cast<std::size_t>(c.n_runs);
  SecondClassPmf p;
  p.displacements.resize(n);
  parallel_for(n, c.workers, [&](std::size_t i) { p.displacements[i] = second_class_displacement(c, t, i); });
  const auto [lo, hi] = std::minmax_element(p.displacements.begin(), p.displacements.end());
  std::vector<std::int64_t> counts(static_cast<std::size_t>(*hi - *lo + 1), 0);
  for (std::int64_t x : p.displacements) ++counts[static_cast<std::size_t>(x - *lo)];
  const double nd = static_cast<double>(n);
  for (std::size_t k = 0; k < counts.size(); ++k) {
    const double q = static_cast<double>(counts[k]) / nd;
    p.offsets.push_back(*lo + static_cast<std::int64_t>(k));
    p.pmf.push_back(q);
    p.stderr_.push_back(std::sqrt(q * (1 - q) / nd));
  }
  const double drift = (1 - 2 * c.rho) * t;
  std::vector<double> x1, x2;
  for (std::int64_t x : p.displacements) {
    const double d = static_cast<double>(x);
    x1.push_back(d);
    x2.push_back(d * d - drift * drift);
  }
  p.mean = mean_error(x1);
  p.second = mean_error(x2);
  return p;
}

EmpiricalFw empirical_Fw(const LatticeEnsemble& e, std::size_t w_index) {
  require_runs(e.runs.size());
  const EnsembleLayout& l = e.layout;
  if (w_index >= l.w_list.size()) throw ConfigError("empirical_Fw: w index out of range");
  EmpiricalFw f;
  f.w = l.w_list[w_index];
  f.j = l.j_w[w_index];
  f.n_runs = static_cast<std::int64_t>(e.runs.size());
  const std::size_t ns = l.s_grid.size();
  f.curve.s = l.s_grid;
  std::vector<double> col(e.runs.size());
  for (std::size_t q = 0; q < ns; ++q) {
    for (std::size_t r = 0; r < e.runs.size(); ++r) col[r] = e.runs[r].Fw[w_index * ns + q];
    const MeanError me = mean_error(col);
    f.curve.cdf.push_back(me.value);
    f.cdf_stderr.push_back(me.stderr_);
  }
  for (std::size_t r = 0; r < e.runs.size(); ++r) col[r] = e.runs[r].H1[w_index];
  f.mean = mean_error(col);
  for (std::size_t r = 0; r < e.runs.size(); ++r) col[r] = e.runs[r].H2[w_index];
  f.second_moment = mean_error(col);
  return f;
}

double dkw_epsilon(std::int64_t n, double alpha) {
  if (n <= 0) throw StatisticsError("dkw_epsilon: empty sample");
  return std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(n)));
}

std::vector<std::vector<std::int64_t>> step_heights(const SimConfig& c, double t, const std::vector<std::int64_t>& j_list) {
  validate(c);
  const std::int64_t L = ring_size_for(c, t);
  const std::size_t n = static_cast<std::size_t>(c.n_runs);
  std::vector<std::vector<std::int64_t>> out(n);
  parallel_for(n, c.workers, [&](std::size_t i) {
    LatticeState s = init_step(L);
    Rng rng = make_rng(c.seed, i, 4);
    evolve(s, t, rng);
    for (std::int64_t j : j_list) out[i].push_back(height(s, j));
  });
  return out;
}

DominanceReport step_ic_dominance(const SimConfig& c, double t, const std::vector<std::int64_t>& j_list,
                                  const std::vector<std::int64_t>& u_list) {
  validate(c);
  const std::int64_t L = ring_size_for(c, t);
  const std::size_t n = static_cast<std::size_t>(c.n_runs);
  const std::size_t nj = j_list.size(), nu = u_list.size();
  const auto [jmin, jmax] = std::minmax_element(j_list.begin(), j_list.end());
  const std::int64_t a = std::min<std::int64_t>(*jmin, 0), b = std::max<std::int64_t>(*jmax, 0);
  // per run, per (j, u): fraction of reference sites x with h_t(x+j) - h_0(x) >= u
  std::vector<std::vector<double>> frac(n, std::vector<double>(nj * nu));
  parallel_for(n, c.workers, [&](std::size_t i) {
    LatticeState s0 = init_stationary(c, i, t);
    LatticeState st = s0;
    Rng rng = make_rng(c.seed, i, 2);
    evolve(st, t, rng);
    const auto h0 = height_profile(s0, 0, L - 1);
    const auto ht = height_profile(st, a, L - 1 + b);
    for (std::size_t p = 0; p < nj; ++p)
      for (std::size_t q = 0; q < nu; ++q) {
        std::int64_t cnt = 0;
        for (std::int64_t x = 0; x < L; ++x)
          cnt += ht[static_cast<std::size_t>(x + j_list[p] - a)] - h0[static_cast<std::size_t>(x)] >= u_list[q];
        frac[i][p * nu + q] = static_cast<double>(cnt) / static_cast<double>(L);
      }
  });
  const auto step = step_heights(c, t, j_list);
  DominanceReport rep;
  rep.max_z = -INFINITY;
  std::vector<double> col(n);
  for (std::size_t p = 0; p < nj; ++p) {
    for (const auto& h : step)
      if (j_list[p] == 0 && h[p] < 0) rep.step_nonnegative = false;
    for (std::size_t q = 0; q < nu; ++q) {
      for (std::size_t i = 0; i < n; ++i) col[i] = frac[i][p * nu + q];
      const MeanError st = mean_error(col);
      double hits = 0;
      for (const auto& h : step) hits += h[p] >= u_list[q];
      const double ps = hits / static_cast<double>(n);
      DominanceEntry d;
      d.j = j_list[p];
      d.u = u_list[q];
      d.p_stationary = st.value;
      d.p_step = ps;
      // a zero-variance step estimate still carries the binomial resolution 1/n
      const double se_step = std::sqrt(std::max(ps * (1 - ps), 1.0 / static_cast<double>(n)) / static_cast<double>(n));
      d.stderr_ = std::hypot(st.stderr_, se_step);
      d.z = (d.p_stationary - d.p_step) / d.stderr_;
      rep.max_z = std::max(rep.max_z, d.z);
      rep.entries.push_back(d);
    }
  }
  rep.ordered = rep.max_z <= 3.0;
  return rep;
}

WeakPairing weak_pairing(const LatticeEnsemble& e, const std::function<double(double)>& f) {
  require_runs(e.runs.size());
  const EnsembleLayout& l = e.layout;
  WeakPairing wp;
  wp.delta = 1.0 / (2 * std::cbrt(l.chi) * std::pow(l.t, 2.0 / 3.0));
  const double jc = (1 - 2 * l.rho) * l.t;
  auto fw = [&](std::int64_t j) { return f((static_cast<double>(j) - jc) * wp.delta); };
  if (fw(l.j_lo) != 0.0 || fw(l.j_hi) != 0.0) throw ConfigError("weak_pairing: test function must vanish at the window edges");
  std::vector<double> lhs, rhs, diff;
  for (const RunObservables& r : e.runs) {
    double a = 0, b = 0;
    for (std::int64_t j = l.j_lo; j <= l.j_hi; ++j) a += r.S[static_cast<std::size_t>(j - l.j_lo)] * fw(j);
    for (std::int64_t j = l.j_lo - 1; j <= l.j_hi + 1; ++j)
      b += r.V[static_cast<std::size_t>(j - l.j_lo + 1)] * (fw(j - 1) - 2 * fw(j) + fw(j + 1));
    b /= 8.0;
    lhs.push_back(a);
    rhs.push_back(b);
    diff.push_back(a - b);
  }
  wp.lhs = mean_error(lhs);
  wp.rhs = mean_error(rhs);
  wp.diff = mean_error(diff);
  return wp;
}

}  // namespace kpz
