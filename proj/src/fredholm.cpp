#include "kpz/fredholm.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace kpz {
namespace {

void check_finite(const Eigen::MatrixXd& m) {
  if (!m.allFinite()) throw NumericError("fredholm: non-finite kernel matrix");
}

Eigen::VectorXd sqrt_weights(const QuadratureRule& r) {
  Eigen::VectorXd s(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) s[i] = std::sqrt(r.weights[i]);
  return s;
}

}  // namespace

NystromSystem make_nystrom(const QuadratureRule& rule, double left_endpoint, const Kernel& k) {
  const std::size_t n = rule.size();
  Eigen::MatrixXd kv(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) kv(i, j) = k(rule.nodes[i], rule.nodes[j]);
  return make_nystrom(rule, left_endpoint, kv);
}

NystromSystem make_nystrom(const QuadratureRule& rule, double left_endpoint, const Eigen::MatrixXd& kernel_values) {
  const Eigen::VectorXd sw = sqrt_weights(rule);
  NystromSystem s;
  s.rule = rule;
  s.left_endpoint = left_endpoint;
  s.matrix = sw.asDiagonal() * kernel_values * sw.asDiagonal();
  return s;
}

double fredholm_det(const NystromSystem& sys) {
  check_finite(sys.matrix);
  const auto n = sys.matrix.rows();
  const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - sys.matrix;
  return a.partialPivLu().determinant();
}

std::vector<double> resolvent_solve(const NystromSystem& sys, const std::vector<double>& rhs) {
  check_finite(sys.matrix);
  const auto n = sys.matrix.rows();
  if (static_cast<std::size_t>(n) != rhs.size()) throw NumericError("resolvent_solve: size mismatch");
  const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - sys.matrix;
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  const double det = lu.determinant();
  if (!(std::fabs(det) > 1e-12)) throw SingularError("resolvent_solve: near-singular system", det);
  const Eigen::VectorXd sw = sqrt_weights(sys.rule);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) b[i] = sw[i] * rhs[i];
  const Eigen::VectorXd y = lu.solve(b);
  std::vector<double> out(n);
  for (Eigen::Index i = 0; i < n; ++i) out[i] = y[i] / sw[i];
  return out;
}

double operator_trace(const NystromSystem& sys) {
  check_finite(sys.matrix);
  return sys.matrix.trace();
}

Eigen::VectorXcd eigenvalues(const NystromSystem& sys) {
  check_finite(sys.matrix);
  if (max_asymmetry(sys) <= 1e-13 * std::max(1.0, sys.matrix.cwiseAbs().maxCoeff())) {
    const Eigen::MatrixXd sym = 0.5 * (sys.matrix + sys.matrix.transpose());
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sym, Eigen::EigenvaluesOnly).eigenvalues().cast<std::complex<double>>();
  }
  return Eigen::EigenSolver<Eigen::MatrixXd>(sys.matrix, false).eigenvalues();
}

double max_asymmetry(const NystromSystem& sys) { return (sys.matrix - sys.matrix.transpose()).cwiseAbs().maxCoeff(); }

DetBilinear det_and_bilinear(const NystromSystem& sys, const std::vector<double>& a, const std::vector<double>& b) {
  check_finite(sys.matrix);
  const auto n = sys.matrix.rows();
  const Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n) - sys.matrix;
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
  const Eigen::VectorXd sw = sqrt_weights(sys.rule);
  Eigen::VectorXd va(n), vb(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    va[i] = sw[i] * a[i];
    vb[i] = sw[i] * b[i];
  }
  DetBilinear r;
  r.det = lu.determinant();
  r.bilinear = va.dot(lu.solve(vb));
  return r;
}

}  // namespace kpz
