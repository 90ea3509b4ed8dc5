#include "kpz/finite_time.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "kpz/quadrature.hpp"
#include "kpz/specialfn.hpp"

namespace kpz {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double lattice_constant(double a, double m, double d) { return (2 * a * d - m) / (0.25 - a * a); }

double clamp_radius(double r) { return std::clamp(r, 0.05, 0.95); }

}  // namespace

double ScaledFrame::sigma() const { return std::cbrt(t / chi); }

ScaledFrame make_frame(double rho, double t, double w, double s) {
  if (!(rho > 0.05 && rho < 0.95)) throw ConfigError("make_frame: rho must lie in (0.05, 0.95)");
  if (!(t >= 10.0) || !std::isfinite(t)) throw ConfigError("make_frame: t must be >= 10");
  if (!std::isfinite(w) || !std::isfinite(s)) throw ConfigError("make_frame: non-finite w or s");
  ScaledFrame f;
  f.rho = rho;
  f.t = t;
  f.w = w;
  f.s = s;
  f.chi = rho * (1 - rho);
  const double c13 = std::cbrt(f.chi), t23 = std::cbrt(t * t), t13 = std::cbrt(t);
  f.m = 0.5 * ((1 - 2 * f.chi) * t + 2 * w * (1 - 2 * rho) * c13 * t23);
  f.d = 0.5 * ((1 - 2 * rho) * t + 2 * w * c13 * t23);
  f.a = 0.5 - rho;
  f.u = t + s * t13 / c13;
  if (!(f.m - f.d >= 1.0)) throw ConfigError("make_frame: m - d must be >= 1");
  return f;
}

LatticeFrame lattice_frame(const ScaledFrame& f) {
  LatticeFrame l;
  l.M = static_cast<int>(std::lround(f.m - f.d));
  l.N = static_cast<int>(std::lround(f.m + f.d));
  if (l.M < 1 || l.N < 1) throw ConfigError("lattice_frame: exponents must be positive");
  const double me = 0.5 * (l.N + l.M), de = 0.5 * (l.N - l.M);
  l.u = f.u + lattice_constant(f.a, f.m, f.d) - lattice_constant(f.a, me, de);
  l.log_z = l.N * std::log1p(-f.rho) - l.M * std::log(f.rho);
  return l;
}

double g1(const ScaledFrame& f) {
  const double v = f.u + lattice_constant(f.a, f.m, f.d);
  const double target = f.s * f.sigma();
  if (std::fabs(v - target) > 1e-9 * std::max(1.0, std::fabs(v)))
    throw NumericError("g1: identity g1 = s (t/chi)^{1/3} violated");
  return v;
}

TraceAnalysis critical_points(double u_prime, double gamma) {
  if (!(u_prime > 0)) throw ConfigError("critical_points: u' must be positive");
  TraceAnalysis t;
  t.gamma = gamma;
  t.u_prime = u_prime;
  const double sg = std::sqrt(gamma);
  const double disc = (u_prime - (1 + sg) * (1 + sg)) * (u_prime - (1 - sg) * (1 - sg));
  const double c = (u_prime + 1 - gamma) / (2 * u_prime);
  if (disc < 0) {
    const double im = std::sqrt(-disc) / (2 * u_prime);
    t.zc_plus = {c, im};
    t.zc_minus = {c, -im};
  } else {
    const double r = std::sqrt(disc) / (2 * u_prime);
    t.zc_plus = {c + r, 0.0};
    t.zc_minus = {c - r, 0.0};
  }
  return t;
}

TraceAnalysis critical_points(const ScaledFrame& f) {
  const LatticeFrame l = lattice_frame(f);
  TraceAnalysis t = critical_points(l.u / l.M, static_cast<double>(l.N) / l.M);
  t.M = l.M;
  return t;
}

double LogValue::value() const { return mant == 0.0 ? 0.0 : mant * std::exp(log_scale); }
double LogValue::value_times_exp(double c) const { return mant == 0.0 ? 0.0 : mant * std::exp(log_scale + c); }

ContourEvaluator::ContourEvaluator(int M, int N, std::size_t n_points) : M_(M), N_(N), n_(n_points) {
  if (M < 1 || N < 1 || n_points < 8) throw ConfigError("ContourEvaluator: invalid parameters");
  cos_.resize(n_);
  sin_.resize(n_);
  for (std::size_t k = 0; k < n_; ++k) {
    const double th = kTwoPi * static_cast<double>(k) / static_cast<double>(n_);
    cos_[k] = std::cos(th);
    sin_[k] = std::sin(th);
  }
}

double ContourEvaluator::radius_h1(double D) const {
  const TraceAnalysis c = critical_points(D / M_, static_cast<double>(N_) / M_);
  return clamp_radius(std::abs(1.0 - c.zc_plus));
}

double ContourEvaluator::radius_h0(double D) const {
  const TraceAnalysis c = critical_points(D / M_, static_cast<double>(N_) / M_);
  const double r = c.zc_plus.imag() == 0.0 ? std::abs(c.zc_minus) : std::abs(c.zc_plus);
  return clamp_radius(r);
}

namespace {

struct Sum {
  std::complex<double> s;
  double mx;
};

template <class LogIntegrand>
Sum trapezoid(std::size_t n, LogIntegrand&& lg) {
  std::vector<std::complex<double>> v(n);
  double mx = -INFINITY;
  for (std::size_t k = 0; k < n; ++k) {
    v[k] = lg(k);
    mx = std::max(mx, v[k].real());
  }
  std::complex<double> s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += std::exp(v[k] - mx);
  return {s / static_cast<double>(n), mx};
}

}  // namespace

LogValue ContourEvaluator::h1(double D) const {
  const double r = radius_h1(D);
  const double lr = std::log(r);
  const double nn = static_cast<double>(n_);
  const Sum s = trapezoid(n_, [&](std::size_t k) {
    const double th = kTwoPi * static_cast<double>(k) / nn;
    const std::complex<double> v(1 + r * cos_[k], r * sin_[k]);
    // -vD + M ln v - N ln r - i N th + i N pi + ln r + i th
    const double ph = -N_ * th + N_ * std::numbers::pi + th;
    return -v * D + static_cast<double>(M_) * std::log(v) + std::complex<double>((1 - N_) * lr, ph);
  });
  return {-s.s.real(), s.mx};
}

double ContourEvaluator::h1_imag_residue(double D) const {
  const double r = radius_h1(D);
  const double lr = std::log(r);
  const double nn = static_cast<double>(n_);
  const Sum s = trapezoid(n_, [&](std::size_t k) {
    const double th = kTwoPi * static_cast<double>(k) / nn;
    const std::complex<double> v(1 + r * cos_[k], r * sin_[k]);
    const double ph = -N_ * th + N_ * std::numbers::pi + th;
    return -v * D + static_cast<double>(M_) * std::log(v) + std::complex<double>((1 - N_) * lr, ph);
  });
  return std::fabs(s.s.imag()) / std::max(std::abs(s.s), 1e-300);
}

LogValue ContourEvaluator::h0(double D) const {
  const double r = radius_h0(D);
  const double lr = std::log(r);
  const double nn = static_cast<double>(n_);
  const Sum s = trapezoid(n_, [&](std::size_t k) {
    const double th = kTwoPi * static_cast<double>(k) / nn;
    const std::complex<double> v(r * cos_[k], r * sin_[k]);
    // vD + N ln(1-v) - M ln r - i M th + ln r + i th
    return v * D + static_cast<double>(N_) * std::log(1.0 - v) + std::complex<double>((1 - M_) * lr, (1 - M_) * th);
  });
  return {s.s.real(), s.mx};
}

std::size_t choose_contour_points(int M, int N, const std::vector<double>& probes, double tol) {
  for (std::size_t n = 64; n < 8192; n *= 2) {
    const ContourEvaluator a(M, N, n), b(M, N, 2 * n);
    double drift = 0.0;
    for (double D : probes) {
      for (int which = 0; which < 2; ++which) {
        const LogValue x = which ? a.h0(D) : a.h1(D);
        const LogValue y = which ? b.h0(D) : b.h1(D);
        const double xv = x.mant * std::exp(x.log_scale - y.log_scale);
        drift = std::max(drift, std::fabs(xv - y.mant) / std::max(std::fabs(y.mant), 1e-6));
      }
    }
    if (drift < tol) return n;
  }
  return 8192;
}

struct FiniteTimeModel::Mats {
  double u = 0;
  Eigen::MatrixXd K;       // K(x_i, x_j) on [u, inf)
  Eigen::MatrixXd H, Ht;   // calH(xi_i + xi_k), calH~(xi_i + xi_k)
  std::vector<double> H1;  // calH(xi_k)
  // conjugated forms
  Eigen::MatrixXd Hc, Htc;
};

FiniteTimeModel::FiniteTimeModel(double rho, double t, double w, FiniteOptions opt)
    : frame0_(make_frame(rho, t, w, 0.0)),
      lat0_(lattice_frame(frame0_)),
      opt_(opt),
      sigma_(frame0_.sigma()),
      conj_c_(w / frame0_.sigma()),
      ce_(lat0_.M, lat0_.N,
          opt.contour_points ? opt.contour_points
                             : choose_contour_points(lat0_.M, lat0_.N,
                                                     {lat0_.u, lat0_.u + 2 * frame0_.sigma(), std::max(1.0, lat0_.u - 2 * frame0_.sigma())})) {
  const QuadratureRule r = build_semi_infinite_rule(0.0, opt_.n_quad, opt_.map_scale * sigma_);
  xi_ = r.nodes;
  wxi_ = r.weights;
}

FiniteTimeModel::Mats FiniteTimeModel::build(double u, bool with_g) const {
  if (!(u > 0)) throw ConfigError("finite-time: cutoff u must be positive");
  if (with_g && !(frame0_.w > 0)) throw ConfigError("finite-time: G0 requires w > 0");
  const std::size_t n = xi_.size();
  Mats m;
  m.u = u;
  std::vector<LogValue> h1(n * n), h0(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k <= i; ++k) {
      const double D = u + xi_[i] + xi_[k];
      h1[i * n + k] = h1[k * n + i] = ce_.h1(D);
      h0[i * n + k] = h0[k * n + i] = ce_.h0(D);
    }
  Eigen::MatrixXd Lm(n, n), Rm(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      const double D = u + xi_[i] + xi_[k];
      Lm(i, k) = h1[i * n + k].value_times_exp(0.5 * D) * wxi_[k];
      Rm(i, k) = h0[i * n + k].value_times_exp(-0.5 * D);
    }
  m.K = Lm * Rm.transpose();
  if (!with_g) return m;
  const double rho = frame0_.rho, lz = lat0_.log_z, c = conj_c_;
  m.H.resize(n, n);
  m.Ht.resize(n, n);
  m.Hc.resize(n, n);
  m.Htc.resize(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      const double D = u + xi_[i] + xi_[k];
      m.H(i, k) = h1[i * n + k].value_times_exp(lz + rho * D);
      m.Ht(i, k) = h0[i * n + k].value_times_exp(-lz - rho * D);
      m.Hc(i, k) = h1[i * n + k].value_times_exp(lz + rho * D - c * xi_[i]);
      m.Htc(i, k) = h0[i * n + k].value_times_exp(-lz - rho * D + c * xi_[i]);
    }
  m.H1.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double D = u + xi_[k];
    m.H1[k] = ce_.h1(D).value_times_exp(lz + rho * D);
  }
  return m;
}

NystromSystem FiniteTimeModel::system(double s) const {
  const double u = cutoff(s);
  const Mats m = build(u, false);
  QuadratureRule r;
  r.nodes.resize(xi_.size());
  r.weights = wxi_;
  for (std::size_t i = 0; i < xi_.size(); ++i) r.nodes[i] = u + xi_[i];
  return make_nystrom(r, u, m.K);
}

double FiniteTimeModel::finite_F(double s) const { return fredholm_det(system(s)); }

FinitePoint FiniteTimeModel::evaluate(double s, bool with_g) const {
  const double u = cutoff(s);
  const Mats m = build(u, with_g);
  const std::size_t n = xi_.size();
  QuadratureRule r;
  r.nodes.resize(n);
  r.weights = wxi_;
  for (std::size_t i = 0; i < n; ++i) r.nodes[i] = u + xi_[i];
  const NystromSystem sys = make_nystrom(r, u, m.K);
  FinitePoint p;
  p.s = s;
  p.u = u;
  p.F = fredholm_det(sys);
  p.trace = operator_trace(sys);
  if (!with_g) return p;

  p.g1 = s;  // lattice cutoff shift makes g1 = s sigma exactly
  double g2 = 0.0;
  for (std::size_t k = 0; k < n; ++k) g2 += wxi_[k] * xi_[k] * m.H1[k];

  Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(wxi_.data(), n);
  const Eigen::VectorXd I = m.H * w;  // int_0^inf calH(xi_i + y) dy
  Eigen::VectorXd one_minus_I = Eigen::VectorXd::Ones(n) - I;
  std::vector<double> f(n), g(n);
  for (std::size_t i = 0; i < n; ++i) {
    f[i] = std::exp(-conj_c_ * xi_[i]) * one_minus_I[i];
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) acc += wxi_[k] * m.Htc(i, k) * one_minus_I[k];
    g[i] = acc;
  }
  const Eigen::MatrixXd kc = m.Hc * w.asDiagonal() * m.Htc.transpose();
  QuadratureRule r0{xi_, wxi_};
  const NystromSystem sc = make_nystrom(r0, 0.0, kc);
  const DetBilinear db = det_and_bilinear(sc, g, f);
  double g3 = db.bilinear;
  if (!std::isfinite(g3)) g3 = 0.0;
  p.g2 = g2 / sigma_;
  p.g3 = g3 / sigma_;
  p.G0 = p.g1 + p.g2 + p.g3;
  double prim = p.F * (s * sigma_ + g2) + p.F * g3;
  if (!std::isfinite(prim)) prim = p.F * (s * sigma_ + g2);
  p.primitive = prim / sigma_;
  return p;
}

double FiniteTimeModel::ell(double D) const { return ce_.h1(D).value_times_exp(0.5 * D); }
double FiniteTimeModel::r(double D) const { return ce_.h0(D).value_times_exp(-0.5 * D); }

double FiniteTimeModel::kernel_L(double x, double y) const {
  if (!(x > y)) throw DomainError("kernel_L: requires x > y");
  return ell(x - y);
}

double FiniteTimeModel::kernel_R(double x, double y) const {
  if (!(x < y)) throw DomainError("kernel_R: requires x < y");
  return r(y - x);
}

double FiniteTimeModel::kernel_K(double x, double y, std::size_t n_lambda) const {
  if (!(x > 0 && y > 0)) throw DomainError("kernel_K: requires x, y > 0");
  const QuadratureRule lr = build_semi_infinite_rule(0.0, n_lambda, opt_.map_scale * sigma_);
  double acc = 0.0;
  for (std::size_t k = 0; k < lr.size(); ++k) {
    const double l = lr.nodes[k];
    const LogValue a = ce_.h1(x + l), b = ce_.h0(y + l);
    if (a.mant == 0.0 || b.mant == 0.0) continue;
    acc += lr.weights[k] * a.mant * b.mant * std::exp(a.log_scale + b.log_scale + 0.5 * (x - y));
  }
  return acc;
}

double FiniteTimeModel::h_t(double y, double s) const {
  const double D = cutoff(s) + sigma_ * y;
  return sigma_ * ce_.h1(D).value_times_exp(lat0_.log_z + frame0_.rho * D);
}

double FiniteTimeModel::h_tilde_t(double y, double s) const {
  const double D = cutoff(s) + sigma_ * y;
  return sigma_ * ce_.h0(D).value_times_exp(-lat0_.log_z - frame0_.rho * D);
}

double FiniteTimeModel::r_identity_ratio() const {
  const double rho = frame0_.rho;
  const QuadratureRule q = build_semi_infinite_rule(0.0, 200, (lat0_.M + 1) / rho);
  double acc = 0.0;
  for (std::size_t k = 0; k < q.size(); ++k)
    acc += q.weights[k] * ce_.h0(q.nodes[k]).value_times_exp(-rho * q.nodes[k] - lat0_.log_z);
  return acc;
}

double FiniteTimeModel::l_identity_ratio() const {
  const double rho = frame0_.rho;
  const QuadratureRule q = build_semi_infinite_rule(0.0, 200, (lat0_.N + 1) / (1 - rho));
  double acc = 0.0;
  for (std::size_t k = 0; k < q.size(); ++k)
    acc += q.weights[k] * ce_.h1(q.nodes[k]).value_times_exp(rho * q.nodes[k] + lat0_.log_z);
  return acc;
}

double FiniteTimeModel::trace_diagonal(double s) const { return operator_trace(system(s)); }

double FiniteTimeModel::trace_double_contour(double s, std::size_t n_points) const {
  const double u = cutoff(s);
  const int M = lat0_.M, N = lat0_.N;
  const TraceAnalysis ta = critical_points(u / M, static_cast<double>(N) / M);
  double r0 = ta.zc_plus.imag() == 0.0 ? std::abs(ta.zc_minus) : std::abs(ta.zc_plus);
  double r1 = std::abs(1.0 - ta.zc_plus);
  r0 = clamp_radius(r0);
  r1 = clamp_radius(r1);
  if (r0 + r1 > 0.96) {
    const double f = 0.96 / (r0 + r1);
    r0 *= f;
    r1 *= f;
  }
  if (r0 + r1 >= 1.0) throw ConfigError("trace_double_contour: contours intersect");
  const std::size_t n = n_points;
  std::vector<std::complex<double>> v1(n), v0(n), g1v(n), g0v(n), j1(n), j0(n);
  double mx1 = -INFINITY, mx0 = -INFINITY;
  for (std::size_t k = 0; k < n; ++k) {
    const double th = kTwoPi * static_cast<double>(k) / static_cast<double>(n);
    const std::complex<double> e(std::cos(th), std::sin(th));
    v1[k] = 1.0 + r1 * e;
    v0[k] = r0 * e;
    // G(v) = -u v + M ln v - N ln(1-v), with 1 - v = r1 e^{i(th+pi)} on the outer circle
    g1v[k] = -u * v1[k] + static_cast<double>(M) * std::log(v1[k]) -
             static_cast<double>(N) * std::complex<double>(std::log(r1), th + std::numbers::pi);
    g0v[k] = -(-u * v0[k] + static_cast<double>(M) * std::complex<double>(std::log(r0), th) -
               static_cast<double>(N) * std::log(1.0 - v0[k]));
    j1[k] = r1 * e;
    j0[k] = r0 * e;
    mx1 = std::max(mx1, g1v[k].real());
    mx0 = std::max(mx0, g0v[k].real());
  }
  std::complex<double> acc = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    const std::complex<double> fa = std::exp(g1v[a] - mx1) * j1[a];
    for (std::size_t b = 0; b < n; ++b) {
      const std::complex<double> dv = v1[a] - v0[b];
      acc += fa * std::exp(g0v[b] - mx0) * j0[b] / (dv * dv);
    }
  }
  acc /= static_cast<double>(n) * static_cast<double>(n);
  return -acc.real() * std::exp(mx1 + mx0);
}

double FiniteTimeModel::g2_tensor(double s) const {
  const Mats m = build(cutoff(s), true);
  const std::size_t n = xi_.size();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) acc += wxi_[i] * wxi_[k] * m.H(i, k);
  return acc / sigma_;
}

FiniteTimeModel::G3Parts FiniteTimeModel::g3_parts(double s) const {
  const Mats m = build(cutoff(s), true);
  const std::size_t n = xi_.size();
  Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(wxi_.data(), n);
  const Eigen::VectorXd one_minus_I = Eigen::VectorXd::Ones(n) - m.H * w;
  Eigen::VectorXd f(n), g(n), sw(n);
  for (std::size_t i = 0; i < n; ++i) {
    sw[i] = std::sqrt(wxi_[i]);
    f[i] = std::exp(-conj_c_ * xi_[i]) * one_minus_I[i];
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) acc += wxi_[k] * m.Htc(i, k) * one_minus_I[k];
    g[i] = acc;
  }
  const Eigen::MatrixXd kc = m.Hc * w.asDiagonal() * m.Htc.transpose();
  const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - sw.asDiagonal() * kc * sw.asDiagonal();
  const Eigen::VectorXd fs = sw.cwiseProduct(f), gs = sw.cwiseProduct(g);
  G3Parts p;
  p.g3 = gs.dot(a.partialPivLu().solve(fs)) / sigma_;
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  p.norm_a = 1.0 / svd.singularValues().minCoeff();
  p.norm_phi = gs.norm() / std::sqrt(sigma_);
  p.norm_psi = fs.norm() / std::sqrt(sigma_);
  return p;
}

double step_lpp_cdf(int M, int N, double u, std::size_t n_quad, std::size_t contour_points) {
  if (M < 1 || N < 1) throw ConfigError("step_lpp_cdf: M, N must be positive");
  if (!(u > 0)) throw ConfigError("step_lpp_cdf: u must be positive");
  const double scale = std::max(1.0, std::cbrt(static_cast<double>(M + N)));
  const std::vector<double> probes{u, u + 2 * scale, std::max(1.0, u - 2 * scale)};
  const ContourEvaluator ce(M, N, contour_points ? contour_points : choose_contour_points(M, N, probes));
  const QuadratureRule q = build_semi_infinite_rule(0.0, n_quad, 1.5 * scale);
  const std::size_t n = q.size();
  Eigen::MatrixXd Lm(n, n), Rm(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      const double D = u + q.nodes[i] + q.nodes[k];
      Lm(i, k) = ce.h1(D).value_times_exp(0.5 * D) * q.weights[k];
      Rm(i, k) = ce.h0(D).value_times_exp(-0.5 * D);
    }
  QuadratureRule r{q.nodes, q.weights};
  for (double& x : r.nodes) x += u;
  return fredholm_det(make_nystrom(r, u, Eigen::MatrixXd(Lm * Rm.transpose())));
}

DistributionCurve finite_cdf(const FiniteTimeModel& model, const std::vector<double>& s_grid, unsigned workers) {
  return curve_from_primitive([&](double s) { return model.primitive(s); }, s_grid, 1e-3, workers, 1e-4);
}

}  // namespace kpz
