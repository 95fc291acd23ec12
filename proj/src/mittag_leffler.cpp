#include "fomas/mittag_leffler.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "fomas/linalg.hpp"

namespace fomas {
namespace fracsim {

namespace {

constexpr int kMaxTerms = 1000;

// 1/Γ(x), zero at the poles.
long double ReciprocalGamma(long double x) {
  if (x <= 0.0L && x == std::floor(x)) return 0.0L;
  return 1.0L / std::tgamma(x);
}

double Series(double q, double z) {
  long double sum = 0.0L;
  long double power = 1.0L;  // z^k
  for (int k = 0; k < kMaxTerms; ++k) {
    const long double term = power * ReciprocalGamma(q * k + 1.0L);
    sum += term;
    if (k > 0 && std::fabs(term) < 1e-16L * std::fabs(sum)) return static_cast<double>(sum);
    if (sum == 0.0L && term == 0.0L && k > 0) return 0.0;
    power *= z;
    if (!std::isfinite(static_cast<double>(power))) break;
  }
  throw NumericalError("MittagLeffler(): series did not converge for q = " +
                       std::to_string(q) + ", z = " + std::to_string(z));
}

// Valid for z → -∞. The terms shrink until the Γ poles stop helping; stop
// at the smallest one.
double Asymptotic(double q, double z) {
  long double sum = 0.0L;
  long double inv = 1.0L;
  long double last = INFINITY;
  for (int k = 1; k < 60; ++k) {
    inv /= z;
    const long double term = inv * ReciprocalGamma(1.0L - q * k);
    if (term != 0.0L && std::fabs(term) > last) break;
    sum -= term;
    if (term != 0.0L) last = std::fabs(term);
  }
  return static_cast<double>(sum);
}

}  // namespace

double MittagLeffler(double q, double z) {
  if (!(q > 0.0 && q <= 1.0)) throw std::invalid_argument("MittagLeffler(): q must lie in (0, 1]");
  if (q == 1.0) return std::exp(z);
  // The series loses about |z|^{1/q}/ln(10) digits to cancellation; past 20
  // nepers the asymptotic remainder is already below 1e-9.
  if (z < 0.0 && std::pow(-z, 1.0 / q) > 20.0) return Asymptotic(q, z);
  return Series(q, z);
}

}  // namespace fracsim
}  // namespace fomas
