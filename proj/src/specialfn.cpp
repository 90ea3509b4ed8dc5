#include "kpz/specialfn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace kpz {
namespace {

constexpr long double kC1 = 0.355028053887817239260063186004183176L;  // Ai(0)
constexpr long double kC2 = 0.258819403792806798405183560189203963L;  // -Ai'(0)

AiryPair maclaurin(double xd) {
  const long double x = xd;
  const long double x3 = x * x * x;
  // f = sum 3^k (1/3)_k x^{3k}/(3k)!, g = sum 3^k (2/3)_k x^{3k+1}/(3k+1)!
  long double f = 1, g = x, fp = 0, gp = 1;
  long double tf = 1, tg = x;
  for (int k = 1; k < 200; ++k) {
    tf *= x3 / ((3.0L * k - 1) * (3.0L * k));
    tg *= x3 / ((3.0L * k) * (3.0L * k + 1));
    f += tf;
    g += tg;
    fp += tf * (3 * k) / x;
    gp += tg * (3 * k + 1) / x;
    if (std::fabs(tf) + std::fabs(tg) < 1e-24L * (std::fabs(f) + std::fabs(g)) && k > 3) break;
  }
  if (xd == 0.0) {
    fp = 0;
    gp = 1;
  }
  return {static_cast<double>(kC1 * f - kC2 * g), static_cast<double>(kC1 * fp - kC2 * gp)};
}

// e^z K_nu(z) = int_0^inf exp(-z (cosh t - 1)) cosh(nu t) dt
double scaled_bessel_k(double nu, double z) {
  // integrand width ~ 1/sqrt(z)
  const double h = std::min(0.05, 0.25 / std::sqrt(z));
  double sum = 0.5;
  for (int k = 1; k < 8000; ++k) {
    const double t = k * h;
    const double e = z * (std::cosh(t) - 1.0);
    const double term = std::exp(-e) * std::cosh(nu * t);
    sum += term;
    if (term < 1e-19 * sum) break;
  }
  return sum * h;
}

AiryPair asymptotic_negative(double xd) {
  const double z = -xd;
  const double zeta = 2.0 / 3.0 * z * std::sqrt(z);
  // u_k, v_k
  double u[40], v[40];
  u[0] = 1;
  v[0] = 1;
  for (int k = 1; k < 40; ++k) {
    u[k] = u[k - 1] * (6.0 * k - 5) * (6.0 * k - 3) * (6.0 * k - 1) / ((2.0 * k - 1) * 216.0 * k);
    v[k] = -u[k] * (6.0 * k + 1) / (6.0 * k - 1);
  }
  double p = 0, q = 0, r = 0, w = 0;
  double zp = 1;
  double last = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 40; ++k) {
    const double tu = u[k] / zp;
    const double tv = v[k] / zp;
    const double mag = std::fabs(tu) + std::fabs(tv);
    if (mag > last) break;
    last = mag;
    const int sgn = ((k / 2) % 2 == 0) ? 1 : -1;
    if (k % 2 == 0) {
      p += sgn * tu;
      r += sgn * tv;
    } else {
      q += sgn * tu;
      w += sgn * tv;
    }
    if (mag < 1e-18) break;
    zp *= zeta;
  }
  const double ph = zeta - std::numbers::pi / 4;
  const double c = std::cos(ph), s = std::sin(ph);
  const double z4 = std::sqrt(std::sqrt(z));
  const double isp = 1.0 / std::sqrt(std::numbers::pi);
  return {isp / z4 * (c * p + s * q), isp * z4 * (s * r - c * w)};
}

}  // namespace

AiryPair airy_scaled(double x) {
  if (!std::isfinite(x) || std::fabs(x) > 200.0) throw DomainError("airy: argument out of range");
  if (x < -8.0) return asymptotic_negative(x);
  if (x <= 1.5) {
    AiryPair p = maclaurin(x);
    if (x > 0) {
      const double e = std::exp(2.0 / 3.0 * x * std::sqrt(x));
      p.ai *= e;
      p.ai_prime *= e;
    }
    return p;
  }
  const double zeta = 2.0 / 3.0 * x * std::sqrt(x);
  const double pi = std::numbers::pi;
  return {std::sqrt(x / 3.0) / pi * scaled_bessel_k(1.0 / 3.0, zeta),
          -x / (pi * std::sqrt(3.0)) * scaled_bessel_k(2.0 / 3.0, zeta)};
}

AiryPair airy(double x) {
  AiryPair p = airy_scaled(x);
  if (x > 0) {
    const double e = std::exp(-2.0 / 3.0 * x * std::sqrt(x));
    p.ai *= e;
    p.ai_prime *= e;
  }
  return p;
}

double airy_ai(double x) { return airy(x).ai; }
double airy_ai_prime(double x) { return airy(x).ai_prime; }

double exp_times_ai(double c, double x) {
  if (x > 200.0) {
    const double zeta = 2.0 / 3.0 * x * std::sqrt(x);
    // leading term is enough once the result underflows anyway
    const double l = c - zeta - 0.25 * std::log(x) - 0.5 * std::log(4 * std::numbers::pi);
    return std::exp(l);
  }
  if (x <= 0) return std::exp(c) * airy(x).ai;
  const double zeta = 2.0 / 3.0 * x * std::sqrt(x);
  return std::exp(c - zeta) * airy_scaled(x).ai;
}

double airy_kernel(double x, double y, double s) {
  if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(s))
    throw DomainError("airy_kernel: non-finite argument");
  const double a = x + s, b = y + s;
  if (std::fabs(a - b) < 1e-8) {
    const double c = 0.5 * (a + b);
    if (c > 200.0) return 0.0;
    const AiryPair p = airy(c);
    return p.ai_prime * p.ai_prime - c * p.ai * p.ai;
  }
  if (a > 200.0 && b > 200.0) return 0.0;
  const AiryPair pa = a > 200.0 ? AiryPair{} : airy(a);
  const AiryPair pb = b > 200.0 ? AiryPair{} : airy(b);
  return (pa.ai * pb.ai_prime - pa.ai_prime * pb.ai) / (a - b);
}

}  // namespace kpz
