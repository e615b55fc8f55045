#pragma once

#include <cstdint>
#include <vector>

namespace lorakey {

// GF(2^m) with table-driven arithmetic, m in [3, 8]. Elements are packed
// polynomial representations (bit i = coefficient of x^i); alpha = x is the
// generator. Construction verifies that the reduction polynomial is
// primitive, i.e. alpha has multiplicative order 2^m - 1.
class GfField {
 public:
  GfField(int m, unsigned primitive_poly);
  static GfField with_default_poly(int m);

  int m() const { return m_; }
  int order() const { return n_; }  // multiplicative order 2^m - 1
  unsigned primitive_poly() const { return poly_; }

  int mul(int a, int b) const {
    if (a == 0 || b == 0) return 0;
    return exp_[log_[a] + log_[b]];
  }
  int inv(int a) const;
  int add(int a, int b) const { return a ^ b; }

  // alpha^e for any integer exponent
  int alpha_pow(long long e) const {
    long long r = e % n_;
    if (r < 0) r += n_;
    return exp_[r];
  }
  // discrete log of a nonzero element
  int log(int a) const;

 private:
  int m_;
  int n_;
  unsigned poly_;
  std::vector<int> exp_;  // exp_[i] = alpha^i, doubled so mul skips the mod
  std::vector<int> log_;
};

int gf_mul(int a, int b, const GfField& f);

}  // namespace lorakey
