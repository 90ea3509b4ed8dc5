#include "kpz/curve.hpp"

#include <cmath>

#include "kpz/fredholm.hpp"
#include "kpz/parallel.hpp"

namespace kpz {

std::vector<double> uniform_grid(double lo, double hi, double step) {
  if (!(hi > lo) || !(step > 0)) throw ConfigError("uniform_grid: need lo < hi and step > 0");
  const auto n = static_cast<std::size_t>(std::llround((hi - lo) / step));
  std::vector<double> g(n + 1);
  for (std::size_t i = 0; i <= n; ++i) g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n);
  return g;
}

StencilValue differentiate(const std::function<double(double)>& phi, double s, double h) {
  const double q = 0.5 * h;
  const double f0 = phi(s);
  const double fm2 = phi(s - 2 * h), fp2 = phi(s + 2 * h);
  const double fm1 = phi(s - h), fp1 = phi(s + h);
  const double fmq = phi(s - q), fpq = phi(s + q);
  const double d1h = (fm2 - 8 * fm1 + 8 * fp1 - fp2) / (12 * h);
  const double d1q = (fm1 - 8 * fmq + 8 * fpq - fp1) / (12 * q);
  const double d2h = (-fm2 + 16 * fm1 - 30 * f0 + 16 * fp1 - fp2) / (12 * h * h);
  const double d2q = (-fm1 + 16 * fmq - 30 * f0 + 16 * fpq - fp1) / (12 * q * q);
  StencilValue v;
  v.d1 = (16 * d1q - d1h) / 15;
  v.d2 = (16 * d2q - d2h) / 15;
  v.d1_err = std::fabs(d1q - d1h);
  return v;
}

DistributionCurve curve_from_primitive(const std::function<double(double)>& phi, const std::vector<double>& grid,
                                       double h, unsigned workers, double monotone_slack) {
  DistributionCurve c;
  c.s = grid;
  c.cdf.assign(grid.size(), 0.0);
  c.pdf.assign(grid.size(), 0.0);
  std::vector<double> err(grid.size(), 0.0);
  parallel_for(grid.size(), workers, [&](std::size_t i) {
    const StencilValue v = differentiate(phi, grid[i], h);
    c.cdf[i] = v.d1;
    c.pdf[i] = v.d2;
    err[i] = v.d1_err;
  });
  for (double e : err) c.quad_error = std::max(c.quad_error, e);
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (c.cdf[i] < c.cdf[i - 1] - monotone_slack)
      throw NumericError("distribution: cdf not monotone at s = " + std::to_string(grid[i]));
  fill_moments(c);
  return c;
}

double simpson(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2) return 0.0;
  double s = 0.0;
  std::size_t end = n;
  if ((n - 1) % 2 == 1) {
    // last interval by trapezoid
    s += 0.5 * (x[n - 1] - x[n - 2]) * (y[n - 1] + y[n - 2]);
    end = n - 1;
  }
  for (std::size_t i = 0; i + 2 < end; i += 2) {
    const double h = 0.5 * (x[i + 2] - x[i]);
    s += h / 3 * (y[i] + 4 * y[i + 1] + y[i + 2]);
  }
  return s;
}

namespace {

// E[(a + sign X)^l] for X ~ Exp(lambda)
double shifted_exp_moment(double a, double sign, double lambda, int l) {
  double r = 0.0, binom = 1.0, fact = 1.0;
  for (int k = 0; k <= l; ++k) {
    if (k > 0) {
      binom = binom * (l - k + 1) / k;
      fact *= k;
    }
    r += binom * std::pow(a, l - k) * std::pow(sign / lambda, k) * fact;
  }
  return r;
}

}  // namespace

void fill_moments(DistributionCurve& c) {
  const std::size_t n = c.s.size();
  c.moments.assign(5, 0.0);
  c.moment_errors.assign(5, 0.0);
  if (n < 3) return;
  const double left_mass = std::max(0.0, c.cdf.front());
  const double right_mass = std::max(0.0, 1.0 - c.cdf.back());
  const double lam_l = c.pdf.front() > 0 && left_mass > 0 ? c.pdf.front() / left_mass : 0.0;
  const double lam_r = c.pdf.back() > 0 && right_mass > 0 ? c.pdf.back() / right_mass : 0.0;
  for (int l = 0; l <= 4; ++l) {
    std::vector<double> y(n);
    double trap = 0.0;
    for (std::size_t i = 0; i < n; ++i) y[i] = std::pow(c.s[i], l) * c.pdf[i];
    for (std::size_t i = 1; i < n; ++i) trap += 0.5 * (c.s[i] - c.s[i - 1]) * (y[i] + y[i - 1]);
    const double body = simpson(c.s, y);
    double tail = 0.0;
    if (lam_l > 0) tail += left_mass * shifted_exp_moment(c.s.front(), -1.0, lam_l, l);
    if (lam_r > 0) tail += right_mass * shifted_exp_moment(c.s.back(), 1.0, lam_r, l);
    c.moments[l] = body + tail;
    c.moment_errors[l] = std::fabs(tail) + std::fabs(body - trap);
  }
}

}  // namespace kpz
