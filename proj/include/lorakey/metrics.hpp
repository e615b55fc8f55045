#pragma once

#include <span>
#include <string>
#include <vector>

#include "lorakey/bits.hpp"

namespace lorakey {

struct MetricsReport {
  double rho = 0.0;
  double kdr = 0.0;
  double mi_ab_bits = 0.0;
  double mi_ae_bits = 0.0;
  double mi_be_bits = 0.0;
  double csk_lower_bits = 0.0;  // mi_ab - min(mi_ae, mi_be), may be negative

  std::string to_json() const;
};

// Pearson cross-correlation of two equal-length series. Throws
// std::domain_error when either series is constant (zero denominator).
double pearson_rho(std::span<const double> x_a, std::span<const double> x_b);
double pearson_rho(std::span<const int> x_a, std::span<const int> x_b);

// Key disagreement ratio: differing positions over the key length.
double kdr(const BitSeq& k_a, const BitSeq& k_b);

// Plug-in mutual information in bits from a joint histogram over equal-width
// bins spanning each series' range. Biased upward for small samples, but
// transparent; adequate for the capacity diagnostics here.
double mi_plugin(std::span<const double> x, std::span<const double> y, int bins);
double mi_plugin(std::span<const int> x, std::span<const int> y, int bins);

// Secret-key capacity lower bound I(A;B) - min(I(A;E), I(B;E)); negative
// results are reported as-is so insecure configurations are visible.
double capacity_bound(std::span<const double> x_a, std::span<const double> x_b,
                      std::span<const double> x_e, int bins);
double capacity_bound(std::span<const int> x_a, std::span<const int> x_b,
                      std::span<const int> x_e, int bins);

}  // namespace lorakey
