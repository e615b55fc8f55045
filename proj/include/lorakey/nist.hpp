#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "lorakey/bits.hpp"

namespace lorakey {

enum class TestStatus { ok, not_applicable };

struct TestResult {
  std::string test_name;
  std::vector<double> p_values;  // serial yields two, every other test one
  bool pass = false;             // every p-value strictly above alpha
  TestStatus status = TestStatus::ok;
};

struct NistReport {
  std::size_t sequence_length = 0;
  double alpha = 0.01;
  bool overall_pass = false;  // all applicable tests pass
  std::vector<TestResult> results;

  std::string to_json() const;
};

// Statistical randomness tests. Parameters that the published suite leaves
// to the operator are derived from the sequence length:
//   block_frequency: M = clamp(n/10, 20, 128)
//   serial:          m = clamp(floor(log2 n) - 3, 2, 16)
//   approx_entropy:  m = clamp(floor(log2 n) - 6, 2, 8)
//   longest_run_of_1s and dft follow the published length tiers.
// Each test throws std::invalid_argument below its hard minimum length;
// run_suite instead records a not_applicable entry.

TestResult frequency_test(const BitSeq& bits, double alpha = 0.01);
TestResult block_frequency_test(const BitSeq& bits, double alpha = 0.01);
TestResult runs_test(const BitSeq& bits, double alpha = 0.01);
TestResult longest_run_test(const BitSeq& bits, double alpha = 0.01);
TestResult dft_test(const BitSeq& bits, double alpha = 0.01);
TestResult serial_test(const BitSeq& bits, double alpha = 0.01);
TestResult approximate_entropy_test(const BitSeq& bits, double alpha = 0.01);
TestResult cusum_test(const BitSeq& bits, bool forward, double alpha = 0.01);

// Explicit-parameter variants, used by the tests to pin published worked
// examples that fix M or m by hand.
TestResult block_frequency_test_m(const BitSeq& bits, std::size_t block_len, double alpha = 0.01);
TestResult serial_test_m(const BitSeq& bits, int m, double alpha = 0.01);
TestResult approximate_entropy_test_m(const BitSeq& bits, int m, double alpha = 0.01);

// Dispatch by name; accepts the report spellings (cumulative_sums_fwd) and
// the short forms (cusum_fwd).
TestResult run_test(const BitSeq& bits, std::string_view name, double alpha = 0.01);

// Runs all nine tests in the fixed report order: frequency, block_frequency,
// runs, longest_run_of_1s, dft, serial, approximate_entropy,
// cumulative_sums_fwd, cumulative_sums_rev.
NistReport run_suite(const BitSeq& bits, double alpha = 0.01);

}  // namespace lorakey
