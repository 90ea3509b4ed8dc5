#include <cmath>

#include "doctest.h"
#include "kpz/quadrature.hpp"
#include "kpz/specialfn.hpp"

using namespace kpz;

namespace {

// mpmath, 40 digits
struct AiryRef {
  double x, ai, aip;
};
const AiryRef kAiryTable[] = {
    {-60.0, 0.077787824477115584, 1.4503455958642244},
    {-25.0, 0.16352657883042947, 0.96237885138769741},
    {-12.5, -0.27627456138116025, -0.41933133041950516},
    {-8.5, -0.33029023763020888, -0.032313348284639136},
    {-8.0, -0.052705050356386203, 0.93556093819830655},
    {-5.2, 0.25258033810474462, 0.63990516690128408},
    {-1.0, 0.53556088329235212, -0.010160567116645209},
    {0.0, 0.35502805388781724, -0.2588194037928068},
    {0.7, 0.18916240039815008, -0.19985119158228048},
    {1.5, 0.07174949700810541, -0.097382012842301319},
    {2.2, 0.025610404421773212, -0.040497263244453125},
    {4.5, 0.00033025032351430898, -0.00071786656755750889},
    {8.0, 4.6922076160992316e-8, -1.3414392979067866e-7},
    {15.0, 2.1649625207379923e-18, -8.4205679540177728e-18},
    {40.0, 6.3657426585529149e-75, -4.030017977600678e-74},
    {100.0, 2.6344821520881845e-291, -2.6351403616044099e-290},
};

double envelope(double x, const AiryRef& r) {
  return x < 0 ? std::max(std::fabs(r.ai), std::fabs(r.aip) / std::sqrt(-x)) : std::fabs(r.ai);
}

}  // namespace

TEST_CASE("airy values against the mpmath table") {
  for (const AiryRef& r : kAiryTable) {
    CAPTURE(r.x);
    const AiryPair p = airy(r.x);
    const double env = envelope(r.x, r);
    CHECK(std::fabs(p.ai - r.ai) <= 1e-12 * env);
    const double envp = r.x < 0 ? std::max(std::fabs(r.aip), std::fabs(r.ai) * std::sqrt(-r.x)) : std::fabs(r.aip);
    CHECK(std::fabs(p.ai_prime - r.aip) <= 1e-12 * envp);
  }
}

TEST_CASE("airy at zero and the Maclaurin constants") {
  CHECK(airy_ai(0.0) == doctest::Approx(0.35502805388781723926).epsilon(1e-15));
  CHECK(airy_ai_prime(0.0) == doctest::Approx(-0.25881940379280679840).epsilon(1e-15));
}

TEST_CASE("exponentially scaled airy") {
  struct {
    double x, ai, aip;
  } ref[] = {{30.0, 0.12045939663973668, -0.66078333252120356},
             {100.0, 0.089196920936330413, -0.89219206250403149},
             {190.0, 0.075978269739633295, -1.0473881217542441}};
  for (const auto& r : ref) {
    const AiryPair p = airy_scaled(r.x);
    CHECK(p.ai == doctest::Approx(r.ai).epsilon(1e-12));
    CHECK(p.ai_prime == doctest::Approx(r.aip).epsilon(1e-12));
  }
  CHECK(exp_times_ai(2.0 / 3.0 * std::pow(100.0, 1.5), 100.0) == doctest::Approx(0.089196920936330413).epsilon(1e-12));
}

TEST_CASE("airy sign, decay and range") {
  for (double x = 0.0; x <= 30.0; x += 0.25) {
    CHECK(airy_ai(x) > 0.0);
    CHECK(airy_ai_prime(x) < 0.0);
  }
  CHECK(std::fabs(airy_ai(30.0)) <= 1e-20);
  CHECK_THROWS_AS(airy(200.5), DomainError);
  CHECK_THROWS_AS(airy(-201.0), DomainError);
  CHECK_THROWS_AS(airy(std::nan("")), DomainError);
}

TEST_CASE("airy ODE residual by finite differences of ai_prime") {
  auto d = [](double x, double h) { return (airy_ai_prime(x + h) - airy_ai_prime(x - h)) / (2 * h); };
  // one Richardson step removes the h^2 term of the centred difference
  for (double x = -15.0; x <= 15.0; x += 0.25) {
    CAPTURE(x);
    const double app = (4.0 * d(x, 0.5e-4) - d(x, 1e-4)) / 3.0;
    CHECK(std::fabs(app - x * airy_ai(x)) <= 1e-10 * (1.0 + std::fabs(x)));
  }
  CHECK(std::fabs(d(1.0, 1e-4) - airy_ai(1.0)) <= 1e-8);
}

TEST_CASE("negative-axis zeros bracketed by the asymptotic zero formula") {
  // a_k ~ -(3 pi (4k-1) / 8)^{2/3}
  for (int k = 1; k <= 4; ++k) {
    const double a = -std::pow(3 * M_PI * (4 * k - 1) / 8.0, 2.0 / 3.0);
    CHECK(airy_ai(a - 0.1) * airy_ai(a + 0.1) < 0.0);
  }
  int changes = 0;
  for (double x = -10.0; x < 0.0; x += 0.01) changes += airy_ai(x) * airy_ai(x + 0.01) < 0;
  CHECK(changes == 6);
}

TEST_CASE("airy kernel against direct quadrature") {
  const QuadratureRule q = build_interval_rule(0.0, 40.0, 200);
  auto direct = [&](double x, double y, double s) {
    return integrate(q, [&](double l) { return airy_ai(x + l + s) * airy_ai(y + l + s); });
  };
  CHECK(airy_kernel(0, 0, 0) == doctest::Approx(direct(0, 0, 0)).epsilon(1e-10));
  CHECK(std::fabs(airy_kernel(1, 2, 3) - direct(1, 2, 3)) <= 1e-10);
  CHECK(std::fabs(airy_kernel(-1.5, 0.25, -2) - direct(-1.5, 0.25, -2)) <= 1e-10);
  CHECK(airy_kernel(0.3, 1.7, -0.4) == airy_kernel(1.7, 0.3, -0.4));
  CHECK(airy_kernel(0.3, 0.3 + 1e-10, 0.0) == doctest::Approx(airy_kernel(0.3, 0.3, 0.0)).epsilon(1e-9));
}

TEST_CASE("integral of Ai over the half line") {
  const QuadratureRule q = build_semi_infinite_rule(0.0, 64, 4.0);
  auto ai = [](double x) { return x > 200.0 ? 0.0 : airy_ai(x); };
  CHECK(integrate(q, ai) == doctest::Approx(1.0 / 3.0).epsilon(1e-8));
}
