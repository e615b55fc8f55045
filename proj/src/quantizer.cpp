#include "lorakey/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <stdexcept>

#include "lorakey/errors.hpp"

namespace lorakey {

QuantizationResult differential_quantize(std::span<const int> x, const QuantizerConfig& cfg) {
  if (cfg.epsilon < 0) throw std::invalid_argument("epsilon must be non-negative");
  if (x.size() < 2) {
    throw std::invalid_argument("differential quantization needs at least 2 samples");
  }

  QuantizationResult res;
  int reference = x[0];
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (x[i] > reference + cfg.epsilon) {
      res.bits.push_back(1);
      res.kept_indices.push_back(i);
    } else if (x[i] < reference - cfg.epsilon) {
      res.bits.push_back(0);
      res.kept_indices.push_back(i);
    } else {
      res.dropped_indices.push_back(i);
      if (cfg.hold_reference) continue;  // reference stays at the last kept sample
    }
    reference = x[i];
  }
  return res;
}

std::pair<BitSeq, BitSeq> merge_kept_indices(const QuantizationResult& res_a,
                                             const QuantizationResult& res_b) {
  if (res_a.comparison_count() != res_b.comparison_count()) {
    throw IntegrityError("merge_kept_indices: results cover series of different lengths");
  }
  BitSeq bits_a, bits_b;
  std::size_t ia = 0, ib = 0;
  while (ia < res_a.kept_indices.size() && ib < res_b.kept_indices.size()) {
    const std::size_t ka = res_a.kept_indices[ia];
    const std::size_t kb = res_b.kept_indices[ib];
    if (ka == kb) {
      bits_a.push_back(res_a.bits[ia]);
      bits_b.push_back(res_b.bits[ib]);
      ++ia;
      ++ib;
    } else if (ka < kb) {
      ++ia;
    } else {
      ++ib;
    }
  }
  return {std::move(bits_a), std::move(bits_b)};
}

int calibrate_epsilon(const RssiTrace& static_trace, double quantile) {
  if (quantile <= 0.0 || quantile > 1.0) {
    throw std::invalid_argument("quantile must lie in (0, 1]");
  }
  const auto& recs = static_trace.records;
  if (recs.size() < 2) {
    throw std::invalid_argument("calibration trace needs at least 2 samples");
  }
  std::vector<int> diffs;
  diffs.reserve(recs.size() - 1);
  for (std::size_t i = 1; i < recs.size(); ++i) {
    diffs.push_back(std::abs(recs[i].rssi_dbm - recs[i - 1].rssi_dbm));
  }
  std::sort(diffs.begin(), diffs.end());
  const std::size_t m = diffs.size();
  std::size_t rank = static_cast<std::size_t>(std::ceil(quantile * static_cast<double>(m)));
  rank = std::clamp<std::size_t>(rank, 1, m);
  return diffs[rank - 1];
}

BitSeq mean_quantize(std::span<const int> x) {
  if (x.empty()) throw std::invalid_argument("mean quantization needs at least 1 sample");
  const double mean =
      std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  BitSeq bits;
  bits.reserve(x.size());
  for (int v : x) bits.push_back(static_cast<double>(v) > mean ? 1 : 0);
  return bits;
}

}  // namespace lorakey
