#include "kpz/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace kpz {

QuadratureRule gauss_legendre(std::size_t n) {
  static std::mutex mu;
  static std::map<std::size_t, QuadratureRule> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
  }
  if (n < 1) throw ConfigError("gauss_legendre: n must be positive");
  QuadratureRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  const std::size_t m = (n + 1) / 2;
  for (std::size_t i = 0; i < m; ++i) {
    long double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    long double pp = 0;
    for (int it = 0; it < 100; ++it) {
      long double p1 = 1, p2 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        const long double p3 = p2;
        p2 = p1;
        p1 = ((2.0L * j - 1) * z * p2 - (j - 1.0L) * p3) / j;
      }
      pp = n * (z * p1 - p2) / (z * z - 1);
      const long double dz = p1 / pp;
      z -= dz;
      if (std::fabs(dz) < 1e-19L) break;
    }
    const double w = static_cast<double>(2.0L / ((1 - z * z) * pp * pp));
    r.nodes[i] = -static_cast<double>(z);
    r.nodes[n - 1 - i] = static_cast<double>(z);
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) r.nodes[n / 2] = 0.0;
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(n, r);
  return r;
}

QuadratureRule build_semi_infinite_rule(double cutoff, std::size_t n, double map_scale) {
  if (n < 8) throw ConfigError("semi-infinite rule: n must be >= 8");
  if (!(map_scale > 0) || !std::isfinite(map_scale)) throw ConfigError("semi-infinite rule: map_scale must be > 0");
  const QuadratureRule g = gauss_legendre(n);
  QuadratureRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = g.nodes[i];
    r.nodes[i] = cutoff + map_scale * (1 + xi) / (1 - xi);
    r.weights[i] = g.weights[i] * map_scale * 2 / ((1 - xi) * (1 - xi));
  }
  return r;
}

QuadratureRule build_reflected_rule(double cutoff, std::size_t n, double map_scale) {
  QuadratureRule r = build_semi_infinite_rule(0.0, n, map_scale);
  QuadratureRule out;
  out.nodes.resize(n);
  out.weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.nodes[n - 1 - i] = cutoff - r.nodes[i];
    out.weights[n - 1 - i] = r.weights[i];
  }
  return out;
}

QuadratureRule build_interval_rule(double a, double b, std::size_t n) {
  const QuadratureRule g = gauss_legendre(n);
  QuadratureRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  const double h = 0.5 * (b - a), c = 0.5 * (a + b);
  for (std::size_t i = 0; i < n; ++i) {
    r.nodes[i] = c + h * g.nodes[i];
    r.weights[i] = h * g.weights[i];
  }
  return r;
}

}  // namespace kpz
