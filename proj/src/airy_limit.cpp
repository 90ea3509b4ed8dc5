#include "kpz/airy_limit.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "kpz/fredholm.hpp"
#include "kpz/quadrature.hpp"
#include "kpz/specialfn.hpp"

namespace kpz {
namespace {

constexpr double kAiryMax = 200.0;

// Ai(x) = m * exp(ls)
struct LogAi {
  double m = 0.0;
  double ls = 0.0;
};

LogAi log_ai(double x) {
  if (x > kAiryMax) return {0.0, 0.0};
  if (x <= 0) return {airy(x).ai, 0.0};
  return {airy_scaled(x).ai, -2.0 / 3.0 * x * std::sqrt(x)};
}

double scaled_value(const LogAi& a, double c) { return a.m == 0.0 ? 0.0 : a.m * std::exp(c + a.ls); }

struct LimitEval {
  double det;
  double first;
  double bilinear;
};

// everything at shift S on the rule x (cutoff 0)
LimitEval evaluate(double S, double w, const std::vector<double>& x, const std::vector<double>& wx, bool need_resolvent) {
  const std::size_t n = x.size();
  const double w3 = w * w * w / 3.0;
  std::vector<AiryPair> ap(n);
  for (std::size_t i = 0; i < n; ++i) ap[i] = x[i] + S > kAiryMax ? AiryPair{} : airy(x[i] + S);
  Eigen::MatrixXd kv(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = x[i] + S;
    kv(i, i) = ap[i].ai_prime * ap[i].ai_prime - a * ap[i].ai * ap[i].ai;
    for (std::size_t j = 0; j < i; ++j) {
      const double b = x[j] + S;
      const double v = (ap[i].ai * ap[j].ai_prime - ap[i].ai_prime * ap[j].ai) / (a - b);
      kv(i, j) = v;
      kv(j, i) = v;
    }
  }
  QuadratureRule r{x, wx};
  const NystromSystem sys = make_nystrom(r, 0.0, kv);

  // first term: (S - w^2) + e^{wS - w^3/3} \int_0^inf v e^{wv} Ai(v+S) dv
  double first = S - w * w;
  for (std::size_t k = 0; k < n; ++k) first += wx[k] * x[k] * scaled_value(log_ai(x[k] + S), w * S - w3 + w * x[k]);

  LimitEval out{0.0, first, 0.0};
  if (!need_resolvent) {
    out.det = fredholm_det(sys);
    return out;
  }
  std::vector<LogAi> pair(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k <= i; ++k) {
      pair[i * n + k] = log_ai(x[i] + x[k] + S);
      pair[k * n + i] = pair[i * n + k];
    }
  std::vector<double> hpsi(n), hphi(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) acc += wx[k] * scaled_value(pair[i * n + k], w * x[k]);
    hpsi[i] = std::exp(-w * (x[i] + S) + w3) - acc;
  }
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) acc += wx[k] * scaled_value(pair[i * n + k], w * S) * hpsi[k];
    hphi[i] = acc;
  }
  const DetBilinear db = det_and_bilinear(sys, hphi, hpsi);
  out.det = db.det;
  out.bilinear = std::exp(-w3) * db.bilinear;
  return out;
}

void rule_arrays(std::size_t n, double scale, std::vector<double>& x, std::vector<double>& wx) {
  const QuadratureRule r = build_semi_infinite_rule(0.0, n, scale);
  x = r.nodes;
  wx = r.weights;
}

}  // namespace

double effective_w(double w) {
  if (!std::isfinite(w) || w < 0) throw UnsupportedParameter("limit law: w < 0 is not supported");
  return w == 0.0 ? 1e-3 : w;
}

double f_gue(double s, std::size_t n_quad, double map_scale) {
  std::vector<double> x, wx;
  rule_arrays(n_quad, map_scale, x, wx);
  return evaluate(s, 1.0, x, wx, false).det;
}

double hat_psi(double w, double s, double x, std::size_t n_quad) {
  w = effective_w(w);
  const QuadratureRule r = build_semi_infinite_rule(0.0, n_quad, 4.0);
  double acc = 0.0;
  for (std::size_t k = 0; k < r.size(); ++k)
    acc += r.weights[k] * scaled_value(log_ai(x + r.nodes[k] + s), w * r.nodes[k]);
  return std::exp(-w * (x + s) + w * w * w / 3.0) - acc;
}

double hat_phi(double w, double s, double x, std::size_t n_quad) {
  w = effective_w(w);
  const QuadratureRule r = build_semi_infinite_rule(0.0, n_quad, 4.0);
  double acc = 0.0;
  for (std::size_t k = 0; k < r.size(); ++k)
    acc += r.weights[k] * scaled_value(log_ai(x + r.nodes[k] + s), w * s) * hat_psi(w, s, r.nodes[k], n_quad);
  return acc;
}

double g_first_term(double s, double w, std::size_t n_quad) {
  w = effective_w(w);
  std::vector<double> x, wx;
  rule_arrays(n_quad, 4.0, x, wx);
  return evaluate(s, w, x, wx, false).first;
}

double g_func(double s, double w, std::size_t n_quad) {
  w = effective_w(w);
  std::vector<double> x, wx;
  rule_arrays(n_quad, 4.0, x, wx);
  const LimitEval e = evaluate(s, w, x, wx, true);
  if (!(std::fabs(e.det) > 1e-12)) throw SingularError("g_func: near-singular resolvent", e.det);
  return e.first + e.bilinear;
}

LimitPrimitive::LimitPrimitive(double w, LimitOptions opt) : w_(effective_w(w)), opt_(opt) {
  rule_arrays(opt_.n_quad, opt_.map_scale, x_, wx_);
}

PrimitiveParts LimitPrimitive::parts(double s) const {
  const double S = s + w_ * w_;
  const LimitEval e = evaluate(S, w_, x_, wx_, true);
  PrimitiveParts p;
  p.det = e.det;
  double second = e.det * e.bilinear;
  if (!std::isfinite(second)) second = 0.0;
  p.value = e.det * e.first + second;
  p.g = std::fabs(e.det) > 1e-300 ? p.value / e.det : std::nan("");
  return p;
}

DistributionCurve limit_cdf(const LimitLawRequest& req, unsigned workers) {
  LimitOptions opt;
  opt.n_quad = req.n_quad;
  const LimitPrimitive phi(req.w, opt);
  return curve_from_primitive([&](double s) { return phi(s); }, req.s_grid, 1e-3, workers, 1e-7);
}

DistributionCurve limit_cdf(double w, LimitOptions opt) {
  LimitLawRequest req;
  req.w = w;
  req.n_quad = opt.n_quad;
  req.s_grid = uniform_grid(-12.0, 8.0, 0.05);
  return limit_cdf(req, opt.workers);
}

double moments_by_parts(double w, int ell, LimitOptions opt) {
  if (ell < 0 || ell > 4) throw ConfigError("moments_by_parts: ell must be in 0..4");
  if (ell == 0) return 1.0;
  const LimitPrimitive phi(w, opt);
  const QuadratureRule left = build_interval_rule(-14.0, 0.0, 64);
  double lsum = 0.0;
  for (std::size_t i = 0; i < left.size(); ++i) {
    const double s = left.nodes[i];
    lsum += left.weights[i] * std::pow(s, ell - 1) * differentiate([&](double v) { return phi(v); }, s, 1e-3).d1;
  }
  if (ell == 1) return phi(0.0) - lsum;
  const QuadratureRule right = build_interval_rule(0.0, 12.0, 64);
  double rsum = 0.0;
  for (std::size_t i = 0; i < right.size(); ++i) {
    const double s = right.nodes[i];
    rsum += right.weights[i] * std::pow(s, ell - 2) * (s - phi(s));
  }
  return -ell * (ell - 1) * rsum - ell * lsum;
}

double g_sc(double w, LimitOptions opt) { return moments_by_parts(w, 2, opt); }

double richardson_second_difference(double gm, double g0, double gp, double gmq, double gpq, double h) {
  const double q = 0.5 * h;
  const double dh = (gm - 2 * g0 + gp) / (h * h);
  const double dq = (gmq - 2 * g0 + gpq) / (q * q);
  return (4 * dq - dh) / 3;
}

double g_sc_second_derivative(double w, double h, LimitOptions opt) {
  if (!(h >= 0.05 && h <= 0.3)) throw ConfigError("g_sc_second_derivative: h must be in [0.05, 0.3]");
  auto g = [&](double v) { return g_sc(std::fabs(v), opt); };
  return richardson_second_difference(g(w - h), g(w), g(w + h), g(w - 0.5 * h), g(w + 0.5 * h), h);
}

}  // namespace kpz
