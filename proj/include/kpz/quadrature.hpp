#pragma once

#include <stdexcept>
#include <vector>

namespace kpz {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::size_t size() const { return nodes.size(); }
};

// Gauss-Legendre on [-1, 1], nodes increasing.
QuadratureRule gauss_legendre(std::size_t n);

// x = cutoff + map_scale (1+xi)/(1-xi)
QuadratureRule build_semi_infinite_rule(double cutoff, std::size_t n, double map_scale);

// mirrored: x = cutoff - map_scale (1+xi)/(1-xi), nodes increasing
QuadratureRule build_reflected_rule(double cutoff, std::size_t n, double map_scale);

QuadratureRule build_interval_rule(double a, double b, std::size_t n);

template <class F>
double integrate(const QuadratureRule& r, F&& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) s += r.weights[i] * f(r.nodes[i]);
  return s;
}

}  // namespace kpz
