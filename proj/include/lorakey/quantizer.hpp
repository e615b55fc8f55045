#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "lorakey/bits.hpp"
#include "lorakey/trace.hpp"

namespace lorakey {

struct QuantizerConfig {
  int epsilon = 2;  // RSSI resolution in dBm, >= 0

  // When set, a dropped comparison keeps the previous *kept* sample as the
  // reference instead of always comparing adjacent raw samples. Off by
  // default; the adjacent-sample rule is the canonical behavior.
  bool hold_reference = false;
};

// Output of differential quantization. Comparison index i (1-based, i in
// 1..N-1) compares sample i against the reference (sample i-1 in the default
// mode). kept_indices and dropped_indices partition {1..N-1}; bits has one
// entry per kept index, in order.
struct QuantizationResult {
  BitSeq bits;
  std::vector<std::size_t> kept_indices;
  std::vector<std::size_t> dropped_indices;

  std::size_t comparison_count() const { return kept_indices.size() + dropped_indices.size(); }
};

// Emits 1 when the sample rises by more than epsilon, 0 when it falls by
// more than epsilon, and drops the comparison otherwise. Requires at least
// two samples.
QuantizationResult differential_quantize(std::span<const int> x, const QuantizerConfig& cfg);

// Keeps only the bits at comparison indices kept by BOTH parties, in index
// order. The two results must come from aligned series of equal length.
// Returns (bits_a, bits_b) of equal length.
std::pair<BitSeq, BitSeq> merge_kept_indices(const QuantizationResult& res_a,
                                             const QuantizationResult& res_b);

// Picks epsilon from a static calibration trace: the ceiling of the
// q-quantile of adjacent absolute RSSI differences. The empirical quantile
// is the ceil(q*m)-th smallest of m differences, so spikes above the
// quantile never inflate the result.
int calibrate_epsilon(const RssiTrace& static_trace, double quantile = 0.95);

// Mean-threshold baseline: bit i is 1 iff x(i) lies strictly above the mean.
// Kept for comparison experiments; long runs make it a poor key source.
BitSeq mean_quantize(std::span<const int> x);

}  // namespace lorakey
