#pragma once

#include <functional>
#include <vector>

namespace kpz {

struct DistributionCurve {
  std::vector<double> s;
  std::vector<double> cdf;
  std::vector<double> pdf;
  std::vector<double> moments;         // orders 0..4
  std::vector<double> moment_errors;   // same length
  double quad_error = 0.0;
};

std::vector<double> uniform_grid(double lo, double hi, double step);

struct StencilValue {
  double d1 = 0.0;
  double d2 = 0.0;
  double d1_err = 0.0;
};

// 5-point stencils at h and h/2 with one Richardson step.
StencilValue differentiate(const std::function<double(double)>& phi, double s, double h);

// Fills cdf/pdf = phi', phi'' on the grid and the moments; throws NumericError
// when the cdf decreases by more than monotone_slack.
DistributionCurve curve_from_primitive(const std::function<double(double)>& phi, const std::vector<double>& grid,
                                       double h, unsigned workers, double monotone_slack);

// Moments 0..4 of the density on a uniform grid (Simpson) with exponential tail corrections.
void fill_moments(DistributionCurve& c);

double simpson(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace kpz
