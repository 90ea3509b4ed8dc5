#include <cmath>

#include "doctest.h"
#include "kpz/airy_limit.hpp"
#include "kpz/fredholm.hpp"
#include "kpz/specialfn.hpp"

using namespace kpz;

TEST_CASE("Gauss-Legendre rule exactness and shape") {
  for (std::size_t n : {8u, 17u, 48u}) {
    const QuadratureRule r = gauss_legendre(n);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(r.weights[i] > 0);
      if (i) CHECK(r.nodes[i] > r.nodes[i - 1]);
    }
    for (std::size_t k = 0; k <= 2 * n - 1; ++k) {
      const double exact = k % 2 ? 0.0 : 2.0 / static_cast<double>(k + 1);
      const double got = integrate(r, [&](double x) { return std::pow(x, static_cast<double>(k)); });
      CHECK(std::fabs(got - exact) <= 1e-12 * std::max(1.0, std::fabs(exact)));
    }
  }
}

TEST_CASE("semi-infinite rule") {
  CHECK(integrate(build_semi_infinite_rule(0.0, 48, 4.0), [](double x) { return std::exp(-x); }) ==
        doctest::Approx(1.0).epsilon(1e-10));
  for (std::size_t n = 8; n <= 256; n += 8) {
    const QuadratureRule r = build_semi_infinite_rule(-3.0, n, 2.0);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(r.weights[i] > 0);
      CHECK(r.nodes[i] > -3.0);
      if (i) CHECK(r.nodes[i] > r.nodes[i - 1]);
    }
  }
  CHECK_THROWS_AS(build_semi_infinite_rule(0.0, 4, 1.0), ConfigError);
  CHECK_THROWS_AS(build_semi_infinite_rule(0.0, 32, 0.0), ConfigError);
  const QuadratureRule m = build_reflected_rule(1.0, 32, 2.0);
  CHECK(integrate(m, [](double x) { return std::exp(x - 1.0); }) == doctest::Approx(1.0).epsilon(1e-10));
}

namespace {
NystromSystem half_line(std::size_t n, const Kernel& k) { return make_nystrom(build_semi_infinite_rule(0.0, n, 2.0), 0.0, k); }
}  // namespace

TEST_CASE("zero and rank-one kernels") {
  const NystromSystem z = half_line(32, [](double, double) { return 0.0; });
  CHECK(fredholm_det(z) == 1.0);
  CHECK(operator_trace(z) == 0.0);
  std::vector<double> rhs(z.rule.size());
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = std::cos(z.rule.nodes[i]);
  const auto same = resolvent_solve(z, rhs);
  for (std::size_t i = 0; i < rhs.size(); ++i) CHECK(std::fabs(same[i] - rhs[i]) <= 1e-15);

  // phi = e^{-x}, int phi^2 = 1/2
  const NystromSystem r1 = half_line(48, [](double x, double y) { return std::exp(-x - y); });
  CHECK(fredholm_det(r1) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(operator_trace(r1) == doctest::Approx(0.5).epsilon(1e-10));
  // (1 - K) f = g, g = e^{-2x}: f = g + phi <phi, g> / (1 - 1/2) = e^{-2x} + (2/3) e^{-x}
  std::vector<double> g(r1.rule.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = std::exp(-2 * r1.rule.nodes[i]);
  const auto f = resolvent_solve(r1, g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = r1.rule.nodes[i];
    CHECK(std::fabs(f[i] - (std::exp(-2 * x) + 2.0 / 3.0 * std::exp(-x))) <= 1e-10);
  }
  CHECK(max_asymmetry(r1) <= 1e-13);
}

TEST_CASE("singular resolvent carries the determinant") {
  const NystromSystem s = half_line(48, [](double x, double y) { return 2.0 * std::exp(-x - y); });
  try {
    resolvent_solve(s, std::vector<double>(s.rule.size(), 1.0));
    FAIL("expected SingularError");
  } catch (const SingularError& e) {
    CHECK(std::fabs(e.determinant()) <= 1e-10);
  }
  const NystromSystem bad = half_line(16, [](double, double) { return std::nan(""); });
  CHECK_THROWS_AS(fredholm_det(bad), NumericError);
}

TEST_CASE("Airy operator: symmetry, spectrum, doubling, resolvent residual") {
  auto airy_sys = [](double s, std::size_t n) {
    return make_nystrom(build_semi_infinite_rule(s, n, 4.0), s, [](double x, double y) { return airy_kernel(x, y, 0.0); });
  };
  const NystromSystem a = airy_sys(-2.0, 48);
  CHECK(max_asymmetry(a) <= 1e-13);
  for (const auto& mu : eigenvalues(a)) {
    CHECK(mu.real() >= -1e-8);
    CHECK(mu.real() < 1.0 + 1e-8);
  }
  CHECK(std::fabs(fredholm_det(a) - fredholm_det(airy_sys(-2.0, 96))) <= 1e-9);
  // trace = int_s^inf K(x,x) dx under doubling
  CHECK(std::fabs(operator_trace(airy_sys(-3.0, 48)) - operator_trace(airy_sys(-3.0, 96))) <= 1e-8);

  const NystromSystem z = airy_sys(0.0, 48);
  std::vector<double> rhs(z.rule.size());
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = std::exp(-z.rule.nodes[i]);
  const auto f = resolvent_solve(z, rhs);
  double worst = 0.0;
  for (std::size_t i = 0; i < rhs.size(); ++i) {
    double kf = 0.0;
    for (std::size_t k = 0; k < rhs.size(); ++k)
      kf += z.rule.weights[k] * airy_kernel(z.rule.nodes[i], z.rule.nodes[k], 0.0) * f[k];
    worst = std::max(worst, std::fabs(f[i] - kf - rhs[i]));
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("F_GUE against an independent truncated-interval oracle") {
  // scipy Airy, Gauss-Legendre on [s, s+18] with 100 nodes, self-converged to 5e-14
  const struct {
    double s, f;
  } ref[] = {{-8, 1.9858999586671802e-19}, {-6, 1.0622546739515003e-08}, {-4, 0.0035445535955081916},
             {-3, 0.08031955293933886},    {-2, 0.4132241425051384},     {-1, 0.8072142419992964},
             {0, 0.9693728283552651},      {1, 0.9975054381493892},      {2, 0.9998875536983095},
             {4, 0.9999999504208782}};
  for (const auto& r : ref) {
    CAPTURE(r.s);
    CHECK(std::fabs(f_gue(r.s) - r.f) <= 1e-12 + 1e-10 * r.f);
  }
  CHECK(std::fabs(f_gue(6.0) - 1.0) <= 1e-6);
  CHECK(f_gue(-9.0) <= 1e-4);
  for (double s = -4; s <= 2; s += 1) CHECK(f_gue(s + 0.5) > f_gue(s));
}
