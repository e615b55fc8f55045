#include <doctest.h>

#include <vector>

#include "lorakey/errors.hpp"
#include "lorakey/quantizer.hpp"

using namespace lorakey;

namespace {

// Direct transliteration of the adjacent-sample comparison loop, kept
// independent of the implementation for oracle checks.
QuantizationResult oracle_quantize(const std::vector<int>& x, int eps) {
  QuantizationResult res;
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (x[i] > x[i - 1] + eps) {
      res.bits.push_back(1);
      res.kept_indices.push_back(i);
    } else if (x[i] < x[i - 1] - eps) {
      res.bits.push_back(0);
      res.kept_indices.push_back(i);
    } else {
      res.dropped_indices.push_back(i);
    }
  }
  return res;
}

bool same(const QuantizationResult& a, const QuantizationResult& b) {
  return a.bits == b.bits && a.kept_indices == b.kept_indices &&
         a.dropped_indices == b.dropped_indices;
}

}  // namespace

TEST_CASE("worked example with a drop inside the epsilon band") {
  const std::vector<int> x{-60, -55, -58, -57};
  const auto res = differential_quantize(x, {.epsilon = 2});
  CHECK(res.bits == BitSeq{1, 0});
  CHECK(res.kept_indices == std::vector<std::size_t>{1, 2});
  CHECK(res.dropped_indices == std::vector<std::size_t>{3});
}

TEST_CASE("monotone series keeps everything") {
  const std::vector<int> x{-80, -75, -70, -65, -60};
  const auto res = differential_quantize(x, {.epsilon = 2});
  CHECK(res.bits == BitSeq{1, 1, 1, 1});
  CHECK(res.dropped_indices.empty());
}

TEST_CASE("constant series drops everything") {
  const std::vector<int> x(10, -70);
  for (int eps : {0, 1, 5}) {
    const auto res = differential_quantize(x, {.epsilon = eps});
    CHECK(res.bits.empty());
    CHECK(res.dropped_indices.size() == 9);
  }
}

TEST_CASE("fewer than two samples is an error") {
  CHECK_THROWS_AS(differential_quantize(std::vector<int>{-60}, {.epsilon = 2}),
                  std::invalid_argument);
  CHECK_THROWS_AS(differential_quantize(std::vector<int>{}, {.epsilon = 2}),
                  std::invalid_argument);
}

TEST_CASE("oracle equivalence on short exhaustive series") {
  const int alphabet[5] = {-60, -59, -57, -54, -50};
  for (int eps : {0, 1, 2}) {
    for (int len = 2; len <= 4; ++len) {
      std::vector<int> digits(len, 0);
      while (true) {
        std::vector<int> x(len);
        for (int i = 0; i < len; ++i) x[i] = alphabet[digits[i]];
        CHECK(same(differential_quantize(x, {.epsilon = eps}), oracle_quantize(x, eps)));
        int pos = len - 1;
        while (pos >= 0 && ++digits[pos] == 5) digits[pos--] = 0;
        if (pos < 0) break;
      }
    }
  }
}

TEST_CASE("offset invariance") {
  const std::vector<int> x{-60, -55, -58, -57, -50, -52, -52};
  for (int c : {-20, 3, 40}) {
    std::vector<int> shifted;
    for (int v : x) shifted.push_back(v + c);
    const auto a = differential_quantize(x, {.epsilon = 2});
    const auto b = differential_quantize(shifted, {.epsilon = 2});
    CHECK(same(a, b));
  }
}

TEST_CASE("sign antisymmetry flips bits and keeps drops") {
  const std::vector<int> x{-60, -55, -58, -57, -50, -52, -52};
  std::vector<int> neg;
  for (int v : x) neg.push_back(-v);
  const auto pos_res = differential_quantize(x, {.epsilon = 2});
  const auto neg_res = differential_quantize(neg, {.epsilon = 2});
  REQUIRE(pos_res.bits.size() == neg_res.bits.size());
  for (std::size_t i = 0; i < pos_res.bits.size(); ++i) {
    CHECK(pos_res.bits[i] == 1 - neg_res.bits[i]);
  }
  CHECK(pos_res.dropped_indices == neg_res.dropped_indices);
}

TEST_CASE("larger epsilon keeps a subset of indices") {
  const std::vector<int> x{-60, -55, -58, -57, -50, -52, -52, -45, -47, -46};
  auto kept = [&](int eps) {
    return differential_quantize(x, {.epsilon = eps}).kept_indices;
  };
  const auto k0 = kept(0), k1 = kept(1), k2 = kept(2), k3 = kept(3);
  auto subset = [](const std::vector<std::size_t>& small, const std::vector<std::size_t>& big) {
    return std::includes(big.begin(), big.end(), small.begin(), small.end());
  };
  CHECK(subset(k1, k0));
  CHECK(subset(k2, k1));
  CHECK(subset(k3, k2));
}

TEST_CASE("merge keeps only indices kept by both") {
  SUBCASE("identical kept sets pass through") {
    const std::vector<int> x{-60, -55, -65, -58};
    const auto res = differential_quantize(x, {.epsilon = 2});
    const auto [a, b] = merge_kept_indices(res, res);
    CHECK(a == res.bits);
    CHECK(b == res.bits);
  }
  SUBCASE("hand-built partial overlap") {
    QuantizationResult ra{{1, 0, 1}, {1, 2, 3}, {4}};
    QuantizationResult rb{{0, 1, 0}, {2, 3, 4}, {1}};
    const auto [a, b] = merge_kept_indices(ra, rb);
    CHECK(a == BitSeq{0, 1});  // ra bits at indices 2, 3
    CHECK(b == BitSeq{0, 1});  // rb bits at indices 2, 3
  }
  SUBCASE("disjoint kept sets give empty sequences") {
    QuantizationResult ra{{1, 1}, {1, 2}, {3, 4}};
    QuantizationResult rb{{0, 0}, {3, 4}, {1, 2}};
    const auto [a, b] = merge_kept_indices(ra, rb);
    CHECK(a.empty());
    CHECK(b.empty());
  }
  SUBCASE("mismatched series lengths are rejected") {
    QuantizationResult ra{{1}, {1}, {2}};
    QuantizationResult rb{{1}, {1}, {2, 3}};
    CHECK_THROWS_AS(merge_kept_indices(ra, rb), IntegrityError);
  }
}

namespace {

RssiTrace trace_from_rssi(const std::vector<int>& rssi) {
  RssiTrace t;
  for (std::size_t i = 0; i < rssi.size(); ++i) {
    t.records.push_back({i + 1, i * 100, rssi[i], 868100000});
  }
  return t;
}

}  // namespace

TEST_CASE("epsilon calibration picks the quantile of adjacent diffs") {
  SUBCASE("constant trace calibrates to zero") {
    CHECK(calibrate_epsilon(trace_from_rssi(std::vector<int>(50, -33))) == 0);
  }
  SUBCASE("twenty diffs dominated by 2 give epsilon 2") {
    // diffs: 2,2,...(17 times),1,1,0 -> 19th smallest of 20 is 2
    std::vector<int> rssi{-40};
    for (int i = 0; i < 17; ++i) rssi.push_back(rssi.back() + ((i % 2) ? 2 : -2));
    rssi.push_back(rssi.back() + 1);
    rssi.push_back(rssi.back() - 1);
    rssi.push_back(rssi.back());
    REQUIRE(rssi.size() == 21);
    CHECK(calibrate_epsilon(trace_from_rssi(rssi), 0.95) == 2);
  }
  SUBCASE("a single spike is excluded at q=0.95") {
    // nineteen diffs of 1 and one of 30
    std::vector<int> rssi{-70};
    for (int i = 0; i < 10; ++i) rssi.push_back(rssi.back() + ((i % 2) ? 1 : -1));
    rssi.push_back(rssi.back() + 30);
    for (int i = 0; i < 9; ++i) rssi.push_back(rssi.back() + ((i % 2) ? 1 : -1));
    REQUIRE(rssi.size() == 21);
    CHECK(calibrate_epsilon(trace_from_rssi(rssi), 0.95) == 1);
  }
  SUBCASE("too short trace is an error") {
    CHECK_THROWS_AS(calibrate_epsilon(trace_from_rssi({-60})), std::invalid_argument);
  }
}

TEST_CASE("mean quantizer") {
  CHECK(mean_quantize(std::vector<int>{-60, -50}) == BitSeq{0, 1});
  CHECK(mean_quantize(std::vector<int>(5, -42)) == BitSeq(5, 0));

  // slow ramp comes out as a run of 0s then a run of 1s
  std::vector<int> ramp;
  for (int i = 0; i < 40; ++i) ramp.push_back(-100 + i);
  const auto bits = mean_quantize(ramp);
  CHECK(bits.front() == 0);
  CHECK(bits.back() == 1);
  std::size_t transitions = 0;
  for (std::size_t i = 1; i < bits.size(); ++i) transitions += bits[i] != bits[i - 1];
  CHECK(transitions == 1);
  CHECK_THROWS_AS(mean_quantize(std::vector<int>{}), std::invalid_argument);
}

TEST_CASE("hold-reference mode compares against the last kept sample") {
  // x: -60, -59, -58, -57: literal mode drops every step at eps=2, while
  // hold mode accumulates the drift until it crosses the band
  const std::vector<int> x{-60, -59, -58, -57};
  const auto literal = differential_quantize(x, {.epsilon = 2, .hold_reference = false});
  CHECK(literal.bits.empty());
  const auto hold = differential_quantize(x, {.epsilon = 2, .hold_reference = true});
  CHECK(hold.bits == BitSeq{1});
  CHECK(hold.kept_indices == std::vector<std::size_t>{3});
}
