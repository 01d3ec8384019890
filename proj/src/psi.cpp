#include "qdio/psi.hpp"

#include <cmath>

namespace qdio {

long double PsiFamily::operator()(long double q) const {
  const long double la = to_long_double(a), lb = to_long_double(b);
  return std::pow(q, -la) * std::pow(std::log2(q), -lb);
}

long double PsiFamily::log2_at_power(long double j) const {
  return -to_long_double(a) * j - to_long_double(b) * std::log2(j);
}

bool PsiFamily::tends_to_zero_faster_than_inverse() const { return a > 1 || (a == 1 && b > 0); }

}  // namespace qdio
