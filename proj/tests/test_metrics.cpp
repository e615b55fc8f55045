#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "lorakey/metrics.hpp"
#include "lorakey/rng.hpp"

using namespace lorakey;

namespace {

std::span<const double> sp(const std::vector<double>& v) { return v; }

}  // namespace

TEST_CASE("pearson correlation basics") {
  const std::vector<double> x{-60, -55, -70, -61, -58};

  SUBCASE("identical non-constant series correlate to 1") {
    CHECK(pearson_rho(sp(x), sp(x)) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("mirrored series correlate to -1") {
    std::vector<double> y;
    for (double v : x) y.push_back(-120.0 - v);
    CHECK(pearson_rho(sp(x), sp(y)) == doctest::Approx(-1.0).epsilon(1e-12));
  }
  SUBCASE("hand-computed worked example") {
    // sums: cov 6.5, var_a 5, var_b 8.75 -> 6.5/sqrt(43.75)
    const std::vector<double> a{1, 2, 3, 4};
    const std::vector<double> b{1, 2, 3, 5};
    const double expected = 6.5 / std::sqrt(43.75);
    CHECK(pearson_rho(sp(a), sp(b)) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(pearson_rho(sp(a), sp(b)) == doctest::Approx(0.982708).epsilon(1e-5));
  }
  SUBCASE("constant series is a domain error") {
    const std::vector<double> c(5, -42.0);
    CHECK_THROWS_AS(pearson_rho(sp(c), sp(x)), std::domain_error);
    CHECK_THROWS_AS(pearson_rho(sp(x), sp(c)), std::domain_error);
  }
  SUBCASE("length mismatch and short input are rejected") {
    const std::vector<double> two{1, 2};
    CHECK_THROWS_AS(pearson_rho(sp(x), sp(two)), std::invalid_argument);
    const std::vector<double> one{1};
    CHECK_THROWS_AS(pearson_rho(sp(one), sp(one)), std::invalid_argument);
  }
}

TEST_CASE("pearson is invariant under positive affine maps") {
  Rng rng(8);
  std::vector<double> x, y;
  for (int i = 0; i < 300; ++i) {
    const double shared = rng.normal();
    x.push_back(shared + 0.3 * rng.normal());
    y.push_back(shared + 0.3 * rng.normal());
  }
  const double base = pearson_rho(sp(x), sp(y));
  std::vector<double> scaled, negated;
  for (double v : x) scaled.push_back(2.5 * v - 17.0);
  for (double v : x) negated.push_back(-1.5 * v + 3.0);
  CHECK(pearson_rho(sp(scaled), sp(y)) == doctest::Approx(base).epsilon(1e-12));
  CHECK(pearson_rho(sp(negated), sp(y)) == doctest::Approx(-base).epsilon(1e-12));
}

TEST_CASE("kdr basics and metric properties") {
  CHECK(kdr(bits_from_string("1100"), bits_from_string("1100")) == 0.0);
  CHECK(kdr(bits_from_string("1100"), bits_from_string("0011")) == 1.0);
  BitSeq a(20, 0), b(20, 0);
  b[7] = 1;
  CHECK(kdr(a, b) == doctest::Approx(0.05).epsilon(1e-15));
  CHECK_THROWS_AS(kdr(a, BitSeq(19, 0)), std::invalid_argument);
  CHECK_THROWS_AS(kdr(BitSeq{}, BitSeq{}), std::invalid_argument);

  // symmetry and triangle inequality over random triples
  Rng rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    BitSeq x(32), y(32), z(32);
    for (int i = 0; i < 32; ++i) {
      x[i] = rng.bit();
      y[i] = rng.bit();
      z[i] = rng.bit();
    }
    CHECK(kdr(x, y) == kdr(y, x));
    CHECK(kdr(x, z) <= kdr(x, y) + kdr(y, z) + 1e-15);
    CHECK((kdr(x, y) == 0.0) == (x == y));
  }
}

TEST_CASE("mutual information identity channel equals the empirical entropy") {
  Rng rng(10);
  std::vector<double> x;
  std::map<int, int> freq;
  for (int i = 0; i < 5000; ++i) {
    const int v = static_cast<int>(rng.uniform_int(8));
    x.push_back(v);
    ++freq[v];
  }
  double entropy = 0.0;
  for (const auto& [v, c] : freq) {
    const double p = c / 5000.0;
    entropy -= p * std::log2(p);
  }
  // 8 bins, integer values 0..7: binning is injective, so MI(x,x) = H(x)
  CHECK(mi_plugin(sp(x), sp(x), 8) == doctest::Approx(entropy).epsilon(1e-12));
}

TEST_CASE("mutual information of independent samples is near zero") {
  Rng rng(11);
  std::vector<double> x, y;
  for (int i = 0; i < 100000; ++i) {
    x.push_back(static_cast<double>(rng.uniform_int(8)));
    y.push_back(static_cast<double>(rng.uniform_int(8)));
  }
  CHECK(mi_plugin(sp(x), sp(y), 8) < 0.01);
}

TEST_CASE("half-dependent samples sit strictly between the extremes") {
  Rng rng(12);
  std::vector<double> x, y;
  for (int i = 0; i < 50000; ++i) {
    const int xv = static_cast<int>(rng.uniform_int(8));
    x.push_back(xv);
    y.push_back(i % 2 == 0 ? xv : static_cast<int>(rng.uniform_int(8)));
  }
  const double mi = mi_plugin(sp(x), sp(y), 8);
  const double h = mi_plugin(sp(x), sp(x), 8);
  CHECK(mi > 0.5);
  CHECK(mi < h - 0.5);
}

TEST_CASE("mutual information is symmetric and bounded") {
  Rng rng(13);
  std::vector<double> x, y;
  for (int i = 0; i < 2000; ++i) {
    const double shared = rng.normal();
    x.push_back(shared + 0.5 * rng.normal());
    y.push_back(0.7 * shared + 0.5 * rng.normal());
  }
  const double mi_xy = mi_plugin(sp(x), sp(y), 16);
  const double mi_yx = mi_plugin(sp(y), sp(x), 16);
  CHECK(mi_xy == mi_yx);  // bitwise, not approximate
  CHECK(mi_xy >= 0.0);
  CHECK(mi_xy <= mi_plugin(sp(x), sp(x), 16));
  CHECK(mi_xy <= mi_plugin(sp(y), sp(y), 16));
}

TEST_CASE("mi input validation") {
  const std::vector<double> x{1, 2, 3};
  CHECK_THROWS_AS(mi_plugin(sp(x), sp(std::vector<double>{1, 2}), 8), std::invalid_argument);
  CHECK_THROWS_AS(mi_plugin(sp(std::vector<double>{}), sp(std::vector<double>{}), 8),
                  std::invalid_argument);
  CHECK_THROWS_AS(mi_plugin(sp(x), sp(x), 1), std::invalid_argument);
}

TEST_CASE("capacity bound") {
  Rng rng(14);
  std::vector<double> a, b, e_far, e_same;
  for (int i = 0; i < 100000; ++i) {
    const double shared = rng.normal();
    const double xa = shared + 0.3 * rng.normal();
    a.push_back(xa);
    b.push_back(shared + 0.3 * rng.normal());
    e_far.push_back(rng.normal());
    e_same.push_back(xa);
  }
  SUBCASE("independent eavesdropper leaves the bound near I(A;B)") {
    const double bound = capacity_bound(sp(a), sp(b), sp(e_far), 16);
    const double mi_ab = mi_plugin(sp(a), sp(b), 16);
    CHECK(bound > 0.0);
    CHECK(bound == doctest::Approx(mi_ab).epsilon(0.05));
  }
  SUBCASE("eavesdropper with Alice's exact observations zeroes the bound") {
    const double bound = capacity_bound(sp(a), sp(b), sp(e_same), 16);
    CHECK(std::abs(bound) < 0.02);
  }
}

TEST_CASE("metrics report serializes with fixed field names") {
  MetricsReport m;
  m.rho = 0.95;
  m.kdr = 0.04;
  m.mi_ab_bits = 1.5;
  m.mi_ae_bits = 0.1;
  m.mi_be_bits = 0.2;
  m.csk_lower_bits = 1.4;
  const auto text = m.to_json();
  for (const char* key : {"rho", "kdr", "mi_ab_bits", "mi_ae_bits", "mi_be_bits",
                          "csk_lower_bits"}) {
    CHECK(text.find(key) != std::string::npos);
  }
}
