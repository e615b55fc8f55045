#include <doctest.h>

#include "lorakey/gf.hpp"

using namespace lorakey;

TEST_CASE("multiplication identities") {
  const auto f = GfField::with_default_poly(4);
  for (int a = 0; a < 16; ++a) {
    CHECK(gf_mul(a, 0, f) == 0);
    CHECK(gf_mul(0, a, f) == 0);
    CHECK(gf_mul(a, 1, f) == a);
  }
}

TEST_CASE("worked product in GF(16) under x^4+x+1") {
  const auto f = GfField::with_default_poly(4);
  // alpha^7 = 0b1011 and alpha^9 = 0b1010; their product is alpha^16 = alpha
  CHECK(f.alpha_pow(7) == 0b1011);
  CHECK(f.alpha_pow(9) == 0b1010);
  CHECK(gf_mul(0b1011, 0b1010, f) == 0b0010);
}

TEST_CASE("log tables agree with shift-and-reduce") {
  // independent oracle: multiply polynomials directly modulo x^4+x+1
  const auto f = GfField::with_default_poly(4);
  auto poly_mul = [](int a, int b) {
    int prod = 0;
    for (int i = 0; i < 4; ++i) {
      if ((b >> i) & 1) prod ^= a << i;
    }
    for (int bit = 7; bit >= 4; --bit) {
      if ((prod >> bit) & 1) prod ^= 0b10011 << (bit - 4);
    }
    return prod;
  };
  for (int a = 0; a < 16; ++a) {
    for (int b = 0; b < 16; ++b) CHECK(gf_mul(a, b, f) == poly_mul(a, b));
  }
}

TEST_CASE("field axioms hold exhaustively for m=4") {
  const auto f = GfField::with_default_poly(4);
  for (int a = 0; a < 16; ++a) {
    for (int b = 0; b < 16; ++b) {
      CHECK(f.mul(a, b) == f.mul(b, a));
      for (int c = 0; c < 16; ++c) {
        CHECK(f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c)));
        CHECK(f.mul(a, b ^ c) == (f.mul(a, b) ^ f.mul(a, c)));
      }
    }
  }
}

TEST_CASE("inverses") {
  for (int m : {3, 4, 5, 6, 7, 8}) {
    const auto f = GfField::with_default_poly(m);
    for (int a = 1; a < (1 << m); ++a) CHECK(f.mul(a, f.inv(a)) == 1);
    CHECK_THROWS_AS(f.inv(0), std::domain_error);
  }
}

TEST_CASE("non-primitive polynomials are rejected") {
  // x^4 + x^3 + x^2 + x + 1 is irreducible but has order 5, not 15
  CHECK_THROWS_AS(GfField(4, 0b11111), std::invalid_argument);
  // reducible: x^4 + 1 = (x+1)^4
  CHECK_THROWS_AS(GfField(4, 0b10001), std::invalid_argument);
  CHECK_THROWS_AS(GfField::with_default_poly(2), std::invalid_argument);
  CHECK_THROWS_AS(GfField::with_default_poly(9), std::invalid_argument);
}

TEST_CASE("alpha_pow handles negative exponents") {
  const auto f = GfField::with_default_poly(4);
  for (int e = -40; e <= 40; ++e) {
    CHECK(f.mul(f.alpha_pow(e), f.alpha_pow(-e)) == 1);
  }
}
