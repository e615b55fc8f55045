#include "lorakey/gf.hpp"

#include <stdexcept>
#include <string>

namespace lorakey {

namespace {

// x^m + ... + 1, one standard primitive polynomial per degree
unsigned default_primitive_poly(int m) {
  switch (m) {
    case 3: return 0b1011;        // x^3 + x + 1
    case 4: return 0b10011;       // x^4 + x + 1
    case 5: return 0b100101;      // x^5 + x^2 + 1
    case 6: return 0b1000011;     // x^6 + x + 1
    case 7: return 0b10001001;    // x^7 + x^3 + 1
    case 8: return 0b100011101;   // x^8 + x^4 + x^3 + x^2 + 1
    default: throw std::invalid_argument("field degree m must be in [3, 8]");
  }
}

}  // namespace

GfField::GfField(int m, unsigned primitive_poly) : m_(m), poly_(primitive_poly) {
  if (m < 3 || m > 8) throw std::invalid_argument("field degree m must be in [3, 8]");
  if ((primitive_poly >> m) != 1u) {
    throw std::invalid_argument("reduction polynomial must have degree m");
  }
  n_ = (1 << m) - 1;
  exp_.assign(2 * n_, 0);
  log_.assign(n_ + 1, -1);

  // generate powers of alpha by shift-and-reduce
  unsigned v = 1;
  for (int i = 0; i < n_; ++i) {
    if (static_cast<int>(v) == 1 && i > 0) {
      throw std::invalid_argument("polynomial 0x" + std::to_string(primitive_poly) +
                                  " is not primitive: alpha has order " + std::to_string(i));
    }
    exp_[i] = static_cast<int>(v);
    log_[v] = i;
    v <<= 1;
    if (v >> m) v ^= primitive_poly;
  }
  if (v != 1) throw std::invalid_argument("reduction polynomial is not primitive");
  for (int i = 0; i < n_; ++i) exp_[n_ + i] = exp_[i];
}

GfField GfField::with_default_poly(int m) { return GfField(m, default_primitive_poly(m)); }

int GfField::inv(int a) const {
  if (a == 0) throw std::domain_error("zero has no multiplicative inverse");
  return exp_[n_ - log_[a]];
}

int GfField::log(int a) const {
  if (a == 0) throw std::domain_error("log of zero");
  return log_[a];
}

int gf_mul(int a, int b, const GfField& f) { return f.mul(a, b); }

}  // namespace lorakey
