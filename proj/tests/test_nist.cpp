#include <doctest.h>

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>

#include "lorakey/nist.hpp"
#include "lorakey/rng.hpp"
#include "lorakey/sketch.hpp"

using namespace lorakey;

namespace {

BitSeq prng_bits(std::uint64_t seed, std::size_t n_bits) {
  // SHA-256 in counter mode; high-quality bits independent of the tests
  BitSeq bits;
  bits.reserve(n_bits);
  std::uint64_t counter = 0;
  while (bits.size() < n_bits) {
    std::vector<std::uint8_t> block(16);
    for (int i = 0; i < 8; ++i) block[i] = static_cast<std::uint8_t>(seed >> (56 - 8 * i));
    for (int i = 0; i < 8; ++i) {
      block[8 + i] = static_cast<std::uint8_t>(counter >> (56 - 8 * i));
    }
    for (auto byte : sha256(block)) {
      for (int b = 7; b >= 0 && bits.size() < n_bits; --b) bits.push_back((byte >> b) & 1);
    }
    ++counter;
  }
  return bits;
}

BitSeq alternating(std::size_t n) {
  BitSeq bits(n);
  for (std::size_t i = 0; i < n; ++i) bits[i] = i % 2;
  return bits;
}

double p0(const TestResult& r) { return r.p_values.at(0); }

}  // namespace

TEST_CASE("frequency test worked examples") {
  CHECK(p0(frequency_test(bits_from_string("1011010101"))) ==
        doctest::Approx(0.527089).epsilon(1e-5));
  // balanced sequence: S = 0, erfc(0) = 1
  CHECK(p0(frequency_test(alternating(100))) == 1.0);
  // all zeros, n = 100: p = erfc(100/sqrt(200)), computed directly
  const auto zeros = frequency_test(BitSeq(100, 0));
  CHECK(p0(zeros) == doctest::Approx(std::erfc(100.0 / std::sqrt(200.0))).epsilon(1e-12));
  CHECK_FALSE(zeros.pass);
  CHECK_THROWS_AS(frequency_test(BitSeq(9, 0)), std::invalid_argument);
}

TEST_CASE("frequency is invariant under complement and reversal") {
  Rng rng(20);
  for (int trial = 0; trial < 20; ++trial) {
    BitSeq bits(200);
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng.bit());
    BitSeq comp(bits);
    for (auto& b : comp) b ^= 1;
    BitSeq rev(bits.rbegin(), bits.rend());
    CHECK(p0(frequency_test(bits)) == p0(frequency_test(comp)));
    CHECK(p0(frequency_test(bits)) == p0(frequency_test(rev)));
    CHECK(p0(runs_test(bits)) == p0(runs_test(rev)));
  }
}

TEST_CASE("runs test worked examples") {
  // published example: pi = 0.6, V = 7
  CHECK(p0(runs_test(bits_from_string("1001101011"))) ==
        doctest::Approx(0.147232).epsilon(1e-5));
  // direct evaluation for the sibling string: V = 9, pi = 0.6
  const double expected =
      std::erfc(std::abs(9.0 - 2.0 * 10 * 0.6 * 0.4) /
                (2.0 * std::sqrt(20.0) * 0.6 * 0.4));
  CHECK(p0(runs_test(bits_from_string("1011010101"))) ==
        doctest::Approx(expected).epsilon(1e-12));
  // precheck failure is reported as p = 0
  const auto ones = runs_test(BitSeq(100, 1));
  CHECK(p0(ones) == 0.0);
  CHECK_FALSE(ones.pass);
  // strict alternation has far too many runs
  const auto alt = runs_test(alternating(100));
  CHECK(p0(alt) < 1e-10);
}

TEST_CASE("block frequency worked example and auto parameters") {
  CHECK(p0(block_frequency_test_m(bits_from_string("0110011010"), 3)) ==
        doctest::Approx(0.801252).epsilon(1e-5));
  CHECK_FALSE(block_frequency_test(BitSeq(400, 0)).pass);
  CHECK_THROWS_AS(block_frequency_test(BitSeq(99, 0)), std::invalid_argument);
}

TEST_CASE("longest run of ones worked example") {
  const char* example =
      "110011000001010101101100010011001110000000000010"
      "010011010101000100010011110101101000000011010111"
      "11001100111001101101100010110010";
  const auto bits = bits_from_string(example);
  REQUIRE(bits.size() == 128);
  CHECK(p0(longest_run_test(bits)) == doctest::Approx(0.180609).epsilon(1e-5));
  CHECK_THROWS_AS(longest_run_test(BitSeq(127, 0)), std::invalid_argument);
  CHECK_FALSE(longest_run_test(BitSeq(400, 1)).pass);
}

TEST_CASE("serial worked example") {
  const auto r = serial_test_m(bits_from_string("0011011101"), 3);
  REQUIRE(r.p_values.size() == 2);
  CHECK(r.p_values[0] == doctest::Approx(0.808793).epsilon(1e-5));
  CHECK(r.p_values[1] == doctest::Approx(0.670320).epsilon(1e-5));
  CHECK(r.pass);  // both p-values above alpha
}

TEST_CASE("approximate entropy worked example") {
  CHECK(p0(approximate_entropy_test_m(bits_from_string("0100110101"), 3)) ==
        doctest::Approx(0.261961).epsilon(1e-5));
}

TEST_CASE("approximate entropy against a naive pattern-counting oracle") {
  Rng rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    BitSeq bits(300);
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng.bit());
    const int m = 3;
    // naive oracle: count every m- and (m+1)-pattern by explicit comparison
    auto phi = [&](int mm) {
      std::map<std::string, int> counts;
      const std::size_t n = bits.size();
      for (std::size_t i = 0; i < n; ++i) {
        std::string pat;
        for (int j = 0; j < mm; ++j) pat.push_back(bits[(i + j) % n] ? '1' : '0');
        counts[pat]++;
      }
      double sum = 0.0;
      for (const auto& [pat, c] : counts) {
        const double p = static_cast<double>(c) / static_cast<double>(n);
        sum += p * std::log(p);
      }
      return sum;
    };
    const double apen = phi(m) - phi(m + 1);
    const double chi2 = 2.0 * bits.size() * (std::numbers::ln2 - apen);
    const double expected = boost::math::gamma_q(std::pow(2.0, m - 1), chi2 / 2.0);
    CHECK(p0(approximate_entropy_test_m(bits, m)) ==
          doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("cumulative sums worked example and symmetry") {
  CHECK(p0(cusum_test(bits_from_string("1011010111"), true)) ==
        doctest::Approx(0.4116588).epsilon(1e-5));
  // reversal maps forward mode onto reverse mode
  Rng rng(22);
  for (int trial = 0; trial < 10; ++trial) {
    BitSeq bits(250);
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng.bit());
    BitSeq rev(bits.rbegin(), bits.rend());
    CHECK(p0(cusum_test(rev, true)) == p0(cusum_test(bits, false)));
  }
  CHECK(p0(cusum_test(BitSeq(400, 0), true)) < 1e-10);
  CHECK(p0(cusum_test(BitSeq(400, 0), false)) < 1e-10);
}

TEST_CASE("dft test detects pure periodicity and matches a direct transform") {
  CHECK_FALSE(dft_test(alternating(400)).pass);
  CHECK(p0(dft_test(alternating(400))) < 1e-4);

  // independent oracle: std::complex direct DFT, same statistic
  Rng rng(23);
  BitSeq bits(200);
  for (auto& b : bits) b = static_cast<std::uint8_t>(rng.bit());
  const std::size_t n = bits.size();
  std::size_t below = 0;
  const double threshold = std::sqrt(std::log(1.0 / 0.05) * n);
  for (std::size_t k = 0; k < n / 2; ++k) {
    std::complex<double> s{0.0, 0.0};
    for (std::size_t j = 0; j < n; ++j) {
      const double x = bits[j] ? 1.0 : -1.0;
      const double ang = -2.0 * std::numbers::pi * static_cast<double>(j * k) / n;
      s += x * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    if (std::abs(s) < threshold) ++below;
  }
  const double d = (static_cast<double>(below) - 0.95 * n / 2.0) /
                   std::sqrt(n * 0.95 * 0.05 / 4.0);
  const double expected = std::erfc(std::abs(d) / std::numbers::sqrt2);
  CHECK(p0(dft_test(bits)) == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("all p-values stay in [0, 1] across many random inputs") {
  Rng rng(24);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 128 + rng.uniform_int(900);
    BitSeq bits(n);
    // biased sequences stress the tails
    const double bias = 0.2 + 0.6 * rng.uniform();
    for (auto& b : bits) b = rng.bernoulli(bias) ? 1 : 0;
    const auto report = run_suite(bits);
    for (const auto& r : report.results) {
      for (double p : r.p_values) {
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
        CHECK(std::isfinite(p));
      }
    }
  }
}

TEST_CASE("suite report has the nine tests in fixed order") {
  const auto bits = prng_bits(1, 397);
  const auto report = run_suite(bits, 0.01);
  REQUIRE(report.results.size() == 9);
  const char* expected[] = {"frequency",
                            "block_frequency",
                            "runs",
                            "longest_run_of_1s",
                            "dft",
                            "serial",
                            "approximate_entropy",
                            "cumulative_sums_fwd",
                            "cumulative_sums_rev"};
  for (std::size_t i = 0; i < 9; ++i) CHECK(report.results[i].test_name == expected[i]);
  CHECK(report.sequence_length == 397);
  CHECK(report.alpha == 0.01);
  for (const auto& r : report.results) CHECK(r.status == TestStatus::ok);
}

TEST_CASE("all-zero input fails the suite with the expected tests") {
  const auto report = run_suite(BitSeq(400, 0), 0.01);
  CHECK_FALSE(report.overall_pass);
  std::map<std::string, bool> pass;
  for (const auto& r : report.results) pass[r.test_name] = r.pass;
  CHECK_FALSE(pass["frequency"]);
  CHECK_FALSE(pass["runs"]);
  CHECK_FALSE(pass["cumulative_sums_fwd"]);
  CHECK_FALSE(pass["cumulative_sums_rev"]);
}

TEST_CASE("tests below their minimum length come back not applicable") {
  // 100 bits: longest_run_of_1s needs 128 and must be the only NA entry
  const auto report = run_suite(prng_bits(2, 100), 0.01);
  for (const auto& r : report.results) {
    if (r.test_name == "longest_run_of_1s") {
      CHECK(r.status == TestStatus::not_applicable);
      CHECK(r.p_values.empty());
      CHECK_FALSE(r.pass);
    } else {
      CHECK(r.status == TestStatus::ok);
    }
  }
}

TEST_CASE("dispatch accepts both cusum spellings") {
  const auto bits = prng_bits(3, 400);
  CHECK(run_test(bits, "cusum_fwd").p_values == run_test(bits, "cumulative_sums_fwd").p_values);
  CHECK(run_test(bits, "cusum_rev").p_values == run_test(bits, "cumulative_sums_rev").p_values);
  CHECK_THROWS_AS(run_test(bits, "nonsense"), std::invalid_argument);
}

TEST_CASE("a good PRNG passes the suite at typical lengths") {
  int passes = 0;
  for (int seed = 1; seed <= 20; ++seed) {
    if (run_suite(prng_bits(seed * 101, 1000), 0.01).overall_pass) ++passes;
  }
  // binomial(20, ~0.9); anything 14+ is comfortably consistent
  CHECK(passes >= 14);
}
