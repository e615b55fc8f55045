#include "lorakey/nist.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <complex>
#include <nlohmann/json.hpp>
#include <numbers>
#include <stdexcept>

namespace lorakey {

namespace {

double igamc(double a, double x) { return boost::math::gamma_q(a, std::max(x, 0.0)); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

int ilog2(std::size_t n) {
  int v = -1;
  while (n) {
    n >>= 1;
    ++v;
  }
  return v;
}

void require_length(const BitSeq& bits, std::size_t min_len, const char* test) {
  if (bits.size() < min_len) {
    throw std::invalid_argument(std::string(test) + " needs at least " +
                                std::to_string(min_len) + " bits, got " +
                                std::to_string(bits.size()));
  }
}

TestResult make_result(std::string name, std::vector<double> p_values, double alpha) {
  TestResult r;
  r.test_name = std::move(name);
  r.p_values = std::move(p_values);
  r.pass = std::all_of(r.p_values.begin(), r.p_values.end(),
                       [alpha](double p) { return p > alpha; });
  return r;
}

// psi-square statistic of the serial test: overlapping mm-bit pattern counts
// with wraparound.
double psi_squared(const BitSeq& bits, int mm) {
  if (mm <= 0) return 0.0;
  const std::size_t n = bits.size();
  const std::size_t n_patterns = std::size_t{1} << mm;
  std::vector<std::size_t> counts(n_patterns, 0);
  const std::size_t mask = n_patterns - 1;
  std::size_t window = 0;
  for (std::size_t i = 0; i < static_cast<std::size_t>(mm) - 1; ++i) {
    window = (window << 1) | bits[i % n];
  }
  for (std::size_t i = 0; i < n; ++i) {
    window = ((window << 1) | bits[(i + mm - 1) % n]) & mask;
    ++counts[window];
  }
  double sum = 0.0;
  for (auto c : counts) sum += static_cast<double>(c) * static_cast<double>(c);
  return sum * static_cast<double>(n_patterns) / static_cast<double>(n) -
         static_cast<double>(n);
}

// ln-based phi statistic of the approximate entropy test, wraparound counts.
double apen_phi(const BitSeq& bits, int mm) {
  if (mm == 0) return 0.0;
  const std::size_t n = bits.size();
  const std::size_t n_patterns = std::size_t{1} << mm;
  std::vector<std::size_t> counts(n_patterns, 0);
  const std::size_t mask = n_patterns - 1;
  std::size_t window = 0;
  for (std::size_t i = 0; i < static_cast<std::size_t>(mm) - 1; ++i) {
    window = (window << 1) | bits[i % n];
  }
  for (std::size_t i = 0; i < n; ++i) {
    window = ((window << 1) | bits[(i + mm - 1) % n]) & mask;
    ++counts[window];
  }
  double phi = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(n);
    phi += p * std::log(p);
  }
  return phi;
}

}  // namespace

TestResult frequency_test(const BitSeq& bits, double alpha) {
  require_length(bits, 10, "frequency test");
  const auto n = static_cast<double>(bits.size());
  double s = 0.0;
  for (auto b : bits) s += b ? 1.0 : -1.0;
  const double p = std::erfc(std::abs(s) / std::sqrt(2.0 * n));
  return make_result("frequency", {p}, alpha);
}

TestResult block_frequency_test_m(const BitSeq& bits, std::size_t block_len, double alpha) {
  require_length(bits, block_len, "block frequency test");
  const std::size_t n_blocks = bits.size() / block_len;
  double chi2 = 0.0;
  for (std::size_t b = 0; b < n_blocks; ++b) {
    std::size_t ones = 0;
    for (std::size_t i = 0; i < block_len; ++i) ones += bits[b * block_len + i];
    const double pi = static_cast<double>(ones) / static_cast<double>(block_len);
    chi2 += (pi - 0.5) * (pi - 0.5);
  }
  chi2 *= 4.0 * static_cast<double>(block_len);
  const double p = igamc(static_cast<double>(n_blocks) / 2.0, chi2 / 2.0);
  return make_result("block_frequency", {p}, alpha);
}

TestResult block_frequency_test(const BitSeq& bits, double alpha) {
  require_length(bits, 100, "block frequency test");
  const std::size_t block_len = std::clamp<std::size_t>(bits.size() / 10, 20, 128);
  return block_frequency_test_m(bits, block_len, alpha);
}

TestResult runs_test(const BitSeq& bits, double alpha) {
  require_length(bits, 10, "runs test");
  const std::size_t n = bits.size();
  const double nd = static_cast<double>(n);
  const double pi = static_cast<double>(hamming_weight(bits)) / nd;

  // frequency precheck; a failed precheck is reported as p = 0
  if (std::abs(pi - 0.5) >= 2.0 / std::sqrt(nd)) {
    return make_result("runs", {0.0}, alpha);
  }
  std::size_t v = 1;
  for (std::size_t i = 1; i < n; ++i) v += bits[i] != bits[i - 1];
  const double expected = 2.0 * nd * pi * (1.0 - pi);
  const double p = std::erfc(std::abs(static_cast<double>(v) - expected) /
                             (2.0 * std::sqrt(2.0 * nd) * pi * (1.0 - pi)));
  return make_result("runs", {p}, alpha);
}

TestResult longest_run_test(const BitSeq& bits, double alpha) {
  require_length(bits, 128, "longest run of 1s test");
  const std::size_t n = bits.size();

  std::size_t block_len;
  std::vector<double> pi;
  std::size_t v_min;
  if (n < 6272) {
    block_len = 8;
    v_min = 1;
    pi = {0.21484375, 0.3671875, 0.23046875, 0.1875};
  } else if (n < 750000) {
    block_len = 128;
    v_min = 4;
    pi = {0.1174035788, 0.242955959, 0.249363483, 0.17517706, 0.102701071, 0.112398847};
  } else {
    block_len = 10000;
    v_min = 10;
    pi = {0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727};
  }
  const std::size_t n_classes = pi.size();
  const std::size_t n_blocks = n / block_len;

  std::vector<std::size_t> nu(n_classes, 0);
  for (std::size_t b = 0; b < n_blocks; ++b) {
    std::size_t longest = 0, run = 0;
    for (std::size_t i = 0; i < block_len; ++i) {
      run = bits[b * block_len + i] ? run + 1 : 0;
      longest = std::max(longest, run);
    }
    const std::size_t cls = longest <= v_min ? 0 : std::min(longest - v_min, n_classes - 1);
    ++nu[cls];
  }

  double chi2 = 0.0;
  for (std::size_t i = 0; i < n_classes; ++i) {
    const double expected = static_cast<double>(n_blocks) * pi[i];
    const double d = static_cast<double>(nu[i]) - expected;
    chi2 += d * d / expected;
  }
  const double p = igamc(static_cast<double>(n_classes - 1) / 2.0, chi2 / 2.0);
  return make_result("longest_run_of_1s", {p}, alpha);
}

TestResult dft_test(const BitSeq& bits, double alpha) {
  require_length(bits, 100, "dft test");
  const std::size_t n = bits.size();
  const std::size_t half = n / 2;

  // direct transform over the first n/2 bins; exact twiddles from one table
  std::vector<double> cos_tab(n), sin_tab(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
    cos_tab[j] = std::cos(angle);
    sin_tab[j] = std::sin(angle);
  }
  const double threshold = std::sqrt(std::log(1.0 / 0.05) * static_cast<double>(n));
  const double threshold_sq = threshold * threshold;

  std::size_t below = 0;
  for (std::size_t k = 0; k < half; ++k) {
    double re = 0.0, im = 0.0;
    std::size_t idx = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const double x = bits[j] ? 1.0 : -1.0;
      re += x * cos_tab[idx];
      im -= x * sin_tab[idx];
      idx += k;
      if (idx >= n) idx -= n;
    }
    if (re * re + im * im < threshold_sq) ++below;
  }

  const double n0 = 0.95 * static_cast<double>(half);
  const double d = (static_cast<double>(below) - n0) /
                   std::sqrt(static_cast<double>(n) * 0.95 * 0.05 / 4.0);
  const double p = std::erfc(std::abs(d) / std::numbers::sqrt2);
  return make_result("dft", {p}, alpha);
}

TestResult serial_test_m(const BitSeq& bits, int m, double alpha) {
  if (m < 2) throw std::invalid_argument("serial test needs m >= 2");
  require_length(bits, static_cast<std::size_t>(m) + 1, "serial test");
  const double psi_m = psi_squared(bits, m);
  const double psi_m1 = psi_squared(bits, m - 1);
  const double psi_m2 = psi_squared(bits, m - 2);
  const double del1 = psi_m - psi_m1;
  const double del2 = psi_m - 2.0 * psi_m1 + psi_m2;
  const double p1 = igamc(std::pow(2.0, m - 2), del1 / 2.0);
  const double p2 = igamc(std::pow(2.0, m - 3), del2 / 2.0);
  return make_result("serial", {p1, p2}, alpha);
}

TestResult serial_test(const BitSeq& bits, double alpha) {
  require_length(bits, 100, "serial test");
  const int m = std::clamp(ilog2(bits.size()) - 3, 2, 16);
  return serial_test_m(bits, m, alpha);
}

TestResult approximate_entropy_test_m(const BitSeq& bits, int m, double alpha) {
  if (m < 1) throw std::invalid_argument("approximate entropy test needs m >= 1");
  require_length(bits, static_cast<std::size_t>(m) + 2, "approximate entropy test");
  const double apen = apen_phi(bits, m) - apen_phi(bits, m + 1);
  const double chi2 = 2.0 * static_cast<double>(bits.size()) * (std::numbers::ln2 - apen);
  const double p = igamc(std::pow(2.0, m - 1), chi2 / 2.0);
  return make_result("approximate_entropy", {p}, alpha);
}

TestResult approximate_entropy_test(const BitSeq& bits, double alpha) {
  require_length(bits, 100, "approximate entropy test");
  const int m = std::clamp(ilog2(bits.size()) - 6, 2, 8);
  return approximate_entropy_test_m(bits, m, alpha);
}

TestResult cusum_test(const BitSeq& bits, bool forward, double alpha) {
  require_length(bits, 10, "cumulative sums test");
  const std::size_t n = bits.size();

  long long sum = 0, z = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t idx = forward ? i : n - 1 - i;
    sum += bits[idx] ? 1 : -1;
    z = std::max(z, std::llabs(sum));
  }
  if (z == 0) {
    // cannot happen for n >= 1; guard against division below
    return make_result(forward ? "cumulative_sums_fwd" : "cumulative_sums_rev", {0.0}, alpha);
  }

  const double zd = static_cast<double>(z);
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  // truncating integer bounds, matching the reference implementation
  const long long ratio = static_cast<long long>(n) / z;

  double sum1 = 0.0;
  for (long long k = (-ratio + 1) / 4; k <= (ratio - 1) / 4; ++k) {
    const double kd = static_cast<double>(k);
    sum1 += normal_cdf((4.0 * kd + 1.0) * zd / sqrt_n) -
            normal_cdf((4.0 * kd - 1.0) * zd / sqrt_n);
  }
  double sum2 = 0.0;
  for (long long k = (-ratio - 3) / 4; k <= (ratio - 1) / 4; ++k) {
    const double kd = static_cast<double>(k);
    sum2 += normal_cdf((4.0 * kd + 3.0) * zd / sqrt_n) -
            normal_cdf((4.0 * kd + 1.0) * zd / sqrt_n);
  }
  const double p = std::clamp(1.0 - sum1 + sum2, 0.0, 1.0);
  return make_result(forward ? "cumulative_sums_fwd" : "cumulative_sums_rev", {p}, alpha);
}

TestResult run_test(const BitSeq& bits, std::string_view name, double alpha) {
  if (name == "frequency") return frequency_test(bits, alpha);
  if (name == "block_frequency") return block_frequency_test(bits, alpha);
  if (name == "runs") return runs_test(bits, alpha);
  if (name == "longest_run_of_1s") return longest_run_test(bits, alpha);
  if (name == "dft") return dft_test(bits, alpha);
  if (name == "serial") return serial_test(bits, alpha);
  if (name == "approximate_entropy") return approximate_entropy_test(bits, alpha);
  if (name == "cumulative_sums_fwd" || name == "cusum_fwd") return cusum_test(bits, true, alpha);
  if (name == "cumulative_sums_rev" || name == "cusum_rev") return cusum_test(bits, false, alpha);
  throw std::invalid_argument("unknown randomness test '" + std::string(name) + "'");
}

NistReport run_suite(const BitSeq& bits, double alpha) {
  require_length(bits, 10, "randomness suite");

  struct Entry {
    const char* name;
    std::size_t min_len;
  };
  static constexpr Entry entries[] = {
      {"frequency", 10},         {"block_frequency", 100},
      {"runs", 10},              {"longest_run_of_1s", 128},
      {"dft", 100},              {"serial", 100},
      {"approximate_entropy", 100}, {"cumulative_sums_fwd", 100},
      {"cumulative_sums_rev", 100},
  };

  NistReport report;
  report.sequence_length = bits.size();
  report.alpha = alpha;
  report.overall_pass = true;
  for (const auto& e : entries) {
    if (bits.size() < e.min_len) {
      TestResult na;
      na.test_name = e.name;
      na.status = TestStatus::not_applicable;
      na.pass = false;
      report.results.push_back(std::move(na));
      continue;
    }
    auto result = run_test(bits, e.name, alpha);
    report.overall_pass = report.overall_pass && result.pass;
    report.results.push_back(std::move(result));
  }
  return report;
}

std::string NistReport::to_json() const {
  nlohmann::ordered_json j;
  j["sequence_length"] = sequence_length;
  j["alpha"] = alpha;
  j["overall_pass"] = overall_pass;
  auto& arr = j["results"] = nlohmann::json::array();
  for (const auto& r : results) {
    nlohmann::ordered_json e;
    e["test_name"] = r.test_name;
    e["p_values"] = r.p_values;
    e["pass"] = r.pass;
    e["status"] = r.status == TestStatus::ok ? "ok" : "not_applicable";
    arr.push_back(std::move(e));
  }
  return j.dump(2) + "\n";
}

}  // namespace lorakey
