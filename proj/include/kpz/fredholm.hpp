#pragma once

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>
#include <vector>

#include "kpz/quadrature.hpp"

namespace kpz {

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularError : public NumericError {
 public:
  SingularError(const std::string& what, double det) : NumericError(what), det_(det) {}
  double determinant() const { return det_; }

 private:
  double det_;
};

// matrix = sqrt(w_i) K(x_i, x_j) sqrt(w_j)
struct NystromSystem {
  QuadratureRule rule;
  double left_endpoint = 0.0;
  Eigen::MatrixXd matrix;
};

using Kernel = std::function<double(double, double)>;

NystromSystem make_nystrom(const QuadratureRule& rule, double left_endpoint, const Kernel& k);
// kernel_values(i, j) = K(x_i, x_j)
NystromSystem make_nystrom(const QuadratureRule& rule, double left_endpoint, const Eigen::MatrixXd& kernel_values);

double fredholm_det(const NystromSystem& sys);

// (1 - K) f = rhs, both sampled on the rule nodes
std::vector<double> resolvent_solve(const NystromSystem& sys, const std::vector<double>& rhs);

double operator_trace(const NystromSystem& sys);

// symmetric solver when the matrix is symmetric, general otherwise
Eigen::VectorXcd eigenvalues(const NystromSystem& sys);
double max_asymmetry(const NystromSystem& sys);

// det(1-K) together with <a, (1-K)^{-1} b> for sampled a, b; no singularity check.
struct DetBilinear {
  double det = 0.0;
  double bilinear = 0.0;
};
DetBilinear det_and_bilinear(const NystromSystem& sys, const std::vector<double>& a, const std::vector<double>& b);

}  // namespace kpz
