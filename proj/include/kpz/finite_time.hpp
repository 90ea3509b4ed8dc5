#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "kpz/curve.hpp"
#include "kpz/fredholm.hpp"

namespace kpz {

struct ScaledFrame {
  double rho = 0.5, t = 100, w = 0, s = 0;
  double chi = 0.25, m = 25, d = 0, a = 0, u = 100;
  double sigma() const;  // (t/chi)^{1/3}
};

ScaledFrame make_frame(double rho, double t, double w, double s);

// integer exponents and the cutoff shift that keeps g1 = s (t/chi)^{1/3}
struct LatticeFrame {
  int M = 0;  // round(m - d)
  int N = 0;  // round(m + d)
  double u = 0.0;
  double log_z = 0.0;  // N ln(1-rho) - M ln(rho)
};
LatticeFrame lattice_frame(const ScaledFrame& f);

double g1(const ScaledFrame& f);  // real m, d; checks the identity

struct TraceAnalysis {
  double gamma = 1.0, u_prime = 1.0, M = 1.0;
  std::complex<double> zc_plus, zc_minus;
  double trace_value = 0.0;
};
TraceAnalysis critical_points(double u_prime, double gamma);
TraceAnalysis critical_points(const ScaledFrame& f);  // lattice M, N and cutoff

struct ContourSpec {
  double center = 0.0;
  double radius = 0.5;
  std::size_t n_points = 256;
};

// value = mant * exp(log_scale)
struct LogValue {
  double mant = 0.0;
  double log_scale = 0.0;
  double value() const;
  double value_times_exp(double c) const;
};

// h1(D) = -(1/2 pi i) oint_{|v-1|=r} e^{-vD} v^M (1-v)^{-N} dv
// h0(D) =  (1/2 pi i) oint_{|v|=r}   e^{vD} (1-v)^N v^{-M} dv
class ContourEvaluator {
 public:
  ContourEvaluator(int M, int N, std::size_t n_points);
  LogValue h1(double D) const;
  LogValue h0(double D) const;
  // imaginary part of the trapezoid sum relative to its modulus
  double h1_imag_residue(double D) const;
  int M() const { return M_; }
  int N() const { return N_; }
  std::size_t n_points() const { return n_; }
  double radius_h1(double D) const;
  double radius_h0(double D) const;

 private:
  int M_, N_;
  std::size_t n_;
  std::vector<double> cos_, sin_;
};

// contour point count doubled from 64 until drift < tol at probe arguments
std::size_t choose_contour_points(int M, int N, const std::vector<double>& probes, double tol = 1e-9);

struct FiniteOptions {
  std::size_t n_quad = 48;
  double map_scale = 1.5;        // in units of (t/chi)^{1/3}
  std::size_t contour_points = 0;  // 0 -> adaptive
  unsigned workers = 1;
};

struct FinitePoint {
  double s = 0, u = 0;
  double F = 0, g1 = 0, g2 = 0, g3 = 0, G0 = 0;  // g's scaled by (t/chi)^{-1/3}
  double primitive = 0;                           // F G0 / (t/chi)^{1/3}
  double trace = 0;
};

class FiniteTimeModel {
 public:
  FiniteTimeModel(double rho, double t, double w, FiniteOptions opt = {});
  const ScaledFrame& frame() const { return frame0_; }
  const LatticeFrame& lattice() const { return lat0_; }
  const ContourEvaluator& contour() const { return ce_; }
  double sigma() const { return sigma_; }
  double cutoff(double s) const { return lat0_.u + s * sigma_; }

  NystromSystem system(double s) const;
  double finite_F(double s) const;
  FinitePoint evaluate(double s, bool with_g = true) const;
  double primitive(double s) const { return evaluate(s).primitive; }

  // raw-unit kernels
  double ell(double D) const;  // L(x, y) = ell(x - y)
  double r(double D) const;    // R(x, y) = r(y - x)
  double kernel_L(double x, double y) const;
  double kernel_R(double x, double y) const;
  double kernel_K(double x, double y, std::size_t n_lambda = 64) const;
  // H_t(y), H~_t(y) in scaled units at scaled position s
  double h_t(double y, double s) const;
  double h_tilde_t(double y, double s) const;

  // int_0^inf e^{-rho d} h0(d) dd / Z and Z int_0^inf e^{rho d} h1(d) dd
  double r_identity_ratio() const;
  double l_identity_ratio() const;

  double trace_diagonal(double s) const;
  double trace_double_contour(double s, std::size_t n_points = 256) const;
  // g2 by 2D tensor quadrature, scaled
  double g2_tensor(double s) const;
  // g3 together with the Cauchy-Schwarz factors, scaled
  struct G3Parts {
    double g3 = 0, norm_phi = 0, norm_a = 0, norm_psi = 0;
  };
  G3Parts g3_parts(double s) const;

 private:
  ScaledFrame frame0_;
  LatticeFrame lat0_;
  FiniteOptions opt_;
  double sigma_;
  double conj_c_;
  ContourEvaluator ce_;
  std::vector<double> xi_, wxi_;
  struct Mats;
  Mats build(double u, bool with_g) const;
};

// det(1 - P_u K_{N,M}) for integer exponents: P(G(M,N) <= u) for exponential LPP,
// equivalently P(h_u^step(N-M) >= N+M) for step initial data
double step_lpp_cdf(int M, int N, double u, std::size_t n_quad = 48, std::size_t contour_points = 0);

DistributionCurve finite_cdf(const FiniteTimeModel& model, const std::vector<double>& s_grid, unsigned workers = 1);

}  // namespace kpz
