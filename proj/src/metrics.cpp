#include "lorakey/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <stdexcept>

namespace lorakey {

namespace {

std::vector<double> to_doubles(std::span<const int> v) {
  return std::vector<double>(v.begin(), v.end());
}

int bin_of(double v, double lo, double width, int bins) {
  if (width <= 0.0) return 0;  // constant series collapse into one bin
  int b = static_cast<int>((v - lo) / width);
  return std::clamp(b, 0, bins - 1);
}

}  // namespace

std::string MetricsReport::to_json() const {
  nlohmann::ordered_json j;
  j["rho"] = rho;
  j["kdr"] = kdr;
  j["mi_ab_bits"] = mi_ab_bits;
  j["mi_ae_bits"] = mi_ae_bits;
  j["mi_be_bits"] = mi_be_bits;
  j["csk_lower_bits"] = csk_lower_bits;
  return j.dump(2) + "\n";
}

double pearson_rho(std::span<const double> x_a, std::span<const double> x_b) {
  if (x_a.size() != x_b.size()) throw std::invalid_argument("pearson_rho: length mismatch");
  const std::size_t n = x_a.size();
  if (n < 2) throw std::invalid_argument("pearson_rho needs at least 2 samples");

  double mu_a = 0.0, mu_b = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mu_a += x_a[i];
    mu_b += x_b[i];
  }
  mu_a /= static_cast<double>(n);
  mu_b /= static_cast<double>(n);

  double cov = 0.0, var_a = 0.0, var_b = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double da = x_a[i] - mu_a;
    const double db = x_b[i] - mu_b;
    cov += da * db;
    var_a += da * da;
    var_b += db * db;
  }
  if (var_a == 0.0 || var_b == 0.0) {
    throw std::domain_error("pearson_rho undefined for a constant series");
  }
  return cov / (std::sqrt(var_a) * std::sqrt(var_b));
}

double pearson_rho(std::span<const int> x_a, std::span<const int> x_b) {
  const auto a = to_doubles(x_a);
  const auto b = to_doubles(x_b);
  return pearson_rho(std::span<const double>(a), std::span<const double>(b));
}

double kdr(const BitSeq& k_a, const BitSeq& k_b) {
  if (k_a.size() != k_b.size()) throw std::invalid_argument("kdr: length mismatch");
  if (k_a.empty()) throw std::invalid_argument("kdr undefined for empty keys");
  return static_cast<double>(hamming_distance(k_a, k_b)) / static_cast<double>(k_a.size());
}

double mi_plugin(std::span<const double> x, std::span<const double> y, int bins) {
  if (x.size() != y.size()) throw std::invalid_argument("mi_plugin: length mismatch");
  if (x.empty()) throw std::invalid_argument("mi_plugin needs a non-empty series");
  if (bins < 2) throw std::invalid_argument("mi_plugin needs at least 2 bins");

  const auto [x_lo_it, x_hi_it] = std::minmax_element(x.begin(), x.end());
  const auto [y_lo_it, y_hi_it] = std::minmax_element(y.begin(), y.end());
  const double x_lo = *x_lo_it, y_lo = *y_lo_it;
  const double wx = (*x_hi_it - x_lo) / bins;
  const double wy = (*y_hi_it - y_lo) / bins;

  const std::size_t n = x.size();
  std::vector<std::size_t> joint(static_cast<std::size_t>(bins) * bins, 0);
  std::vector<std::size_t> px(bins, 0), py(bins, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const int bx = bin_of(x[i], x_lo, wx, bins);
    const int by = bin_of(y[i], y_lo, wy, bins);
    ++joint[static_cast<std::size_t>(bx) * bins + by];
    ++px[bx];
    ++py[by];
  }

  // Summing in sorted order makes the result invariant under swapping the
  // two arguments (the term multiset is symmetric, the loop order is not).
  const double total = static_cast<double>(n);
  std::vector<double> terms;
  for (int bx = 0; bx < bins; ++bx) {
    if (px[bx] == 0) continue;
    for (int by = 0; by < bins; ++by) {
      const std::size_t c = joint[static_cast<std::size_t>(bx) * bins + by];
      if (c == 0) continue;
      const double p_xy = static_cast<double>(c) / total;
      const double p_x = static_cast<double>(px[bx]) / total;
      const double p_y = static_cast<double>(py[by]) / total;
      terms.push_back(p_xy * std::log2(p_xy / (p_x * p_y)));
    }
  }
  std::sort(terms.begin(), terms.end());
  double mi = 0.0;
  for (double term : terms) mi += term;
  return std::max(mi, 0.0);  // clip the tiny negative residue of rounding
}

double mi_plugin(std::span<const int> x, std::span<const int> y, int bins) {
  const auto xd = to_doubles(x);
  const auto yd = to_doubles(y);
  return mi_plugin(std::span<const double>(xd), std::span<const double>(yd), bins);
}

double capacity_bound(std::span<const double> x_a, std::span<const double> x_b,
                      std::span<const double> x_e, int bins) {
  if (x_a.size() != x_b.size() || x_a.size() != x_e.size()) {
    throw std::invalid_argument("capacity_bound: length mismatch");
  }
  const double mi_ab = mi_plugin(x_a, x_b, bins);
  const double mi_ae = mi_plugin(x_a, x_e, bins);
  const double mi_be = mi_plugin(x_b, x_e, bins);
  return mi_ab - std::min(mi_ae, mi_be);
}

double capacity_bound(std::span<const int> x_a, std::span<const int> x_b,
                      std::span<const int> x_e, int bins) {
  const auto a = to_doubles(x_a);
  const auto b = to_doubles(x_b);
  const auto e = to_doubles(x_e);
  return capacity_bound(std::span<const double>(a), std::span<const double>(b),
                        std::span<const double>(e), bins);
}

}  // namespace lorakey
