#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "kpz/curve.hpp"

namespace kpz {

class UnsupportedParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct LimitOptions {
  std::size_t n_quad = 64;
  double map_scale = 4.0;
  unsigned workers = 1;
};

struct LimitLawRequest {
  double w = 0.3;
  std::vector<double> s_grid;
  std::size_t n_quad = 64;
};

// w = 0 is evaluated at w = 1e-3; w < 0 throws UnsupportedParameter.
double effective_w(double w);

double f_gue(double s, std::size_t n_quad = 64, double map_scale = 4.0);

double hat_psi(double w, double s, double x, std::size_t n_quad = 64);
double hat_phi(double w, double s, double x, std::size_t n_quad = 64);

// e^{-w^3/3} \int\int_{R_-^2} e^{w(x+y+s)} Ai(x+y+s)
double g_first_term(double s, double w, std::size_t n_quad = 64);
double g_func(double s, double w, std::size_t n_quad = 64);

struct PrimitiveParts {
  double det = 0.0;    // F_GUE(S)
  double g = 0.0;      // g(S, w), NaN when det underflows the resolvent
  double value = 0.0;  // det * g
};

// Phi(s) = F_GUE(s + w^2) g(s + w^2, w)
class LimitPrimitive {
 public:
  explicit LimitPrimitive(double w, LimitOptions opt = {});
  PrimitiveParts parts(double s) const;
  double operator()(double s) const { return parts(s).value; }
  double w() const { return w_; }

 private:
  double w_;
  LimitOptions opt_;
  std::vector<double> x_, wx_;
};

DistributionCurve limit_cdf(const LimitLawRequest& req, unsigned workers = 1);
// default grid [-12, 8] with step 0.05
DistributionCurve limit_cdf(double w, LimitOptions opt = {});

double moments_by_parts(double w, int ell, LimitOptions opt = {});

double g_sc(double w, LimitOptions opt = {});
double g_sc_second_derivative(double w, double h, LimitOptions opt = {});
// second difference from tabulated g_sc values at w-h, w, w+h, w-h/2, w+h/2
double richardson_second_difference(double gm, double g0, double gp, double gmq, double gpq, double h);

}  // namespace kpz
