#pragma once

#include <stdexcept>

namespace kpz {

struct AiryPair {
  double ai = 0.0;
  double ai_prime = 0.0;
};

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// |x| <= 200
AiryPair airy(double x);
double airy_ai(double x);
double airy_ai_prime(double x);

// e^{zeta} Ai(x), e^{zeta} Ai'(x) with zeta = 2/3 x^{3/2}, for x > 0.
// For x <= 0 the unscaled values are returned.
AiryPair airy_scaled(double x);

// e^{c} Ai(x) without intermediate overflow/underflow.
double exp_times_ai(double c, double x);

double airy_kernel(double x, double y, double s);

}  // namespace kpz
