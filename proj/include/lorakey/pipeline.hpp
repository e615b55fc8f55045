#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lorakey/bch.hpp"
#include "lorakey/bits.hpp"
#include "lorakey/metrics.hpp"
#include "lorakey/nist.hpp"
#include "lorakey/quantizer.hpp"
#include "lorakey/simulator.hpp"
#include "lorakey/sketch.hpp"
#include "lorakey/trace.hpp"

namespace lorakey {

struct PipelineConfig {
  SimConfig sim;
  int epsilon = 2;
  bool hold_reference = false;
  std::string code_id = "bch15_t3";
  int key_bits = 128;
  double alpha = 0.01;
  int mi_bins = 16;
  std::string salt_hex;  // privacy-amplification salt, may be empty

  std::string to_json_text() const;
  static PipelineConfig from_json_text(const std::string& text);
};

// ---- in-memory stage results --------------------------------------------

struct QuantizeStage {
  AlignedProbes aligned;
  QuantizationResult res_a;
  QuantizationResult res_b;
  BitSeq bits_a;  // merged to the shared kept-index set
  BitSeq bits_b;
};

QuantizeStage quantize_stage(const RssiTrace& trace_a, const RssiTrace& trace_b,
                             const QuantizerConfig& qc);

struct ReconcileStage {
  SketchMessage sketch;
  ReconcileResult result;
  std::string confirm_a;  // confirmation hash of Alice's key
  std::string confirm_b;  // confirmation hash of Bob's reconciled key ("" on failure)
  bool keys_match = false;
};

ReconcileStage reconcile_stage(const BitSeq& bits_a, const BitSeq& bits_b, const BchCode& code,
                               std::uint64_t seed);

struct AmplifyStage {
  std::ptrdiff_t effective_entropy_bits = 0;
  bool refused = false;     // entropy budget below the requested key length
  bool amplified = false;
  std::string key_a_hex;
  std::string key_b_hex;
};

AmplifyStage amplify_stage(const BitSeq& bits_a, const std::optional<BitSeq>& reconciled_b,
                           const BchCode& code, int key_bits, const std::string& salt_hex);

// ---- full pipeline --------------------------------------------------------

struct PipelineResult {
  PipelineConfig config;
  std::size_t n_aligned = 0;
  std::size_t n_kept_merged = 0;
  double bit_yield = 0.0;  // merged bits per aligned probe pair
  MetricsReport metrics;
  NistReport nist;  // on the pre-amplification key
  bool reconcile_ok = false;
  std::vector<std::size_t> failed_blocks;
  bool keys_match = false;
  double eve_kdr = 0.0;
  std::ptrdiff_t effective_entropy_bits = 0;
  bool budget_refused = false;
  bool amplified = false;
  std::string key_confirm_a;
  std::string key_confirm_b;
  std::string key_a_hex;
  std::string key_b_hex;

  std::string report_json() const;

  // 0 = keys agree, 2 = reconciliation failed or keys differ,
  // 3 = entropy budget refused amplification
  int exit_code() const;
};

// Runs probing, quantization, reconciliation, amplification and evaluation
// in one call. Deterministic in the config (including the seed).
PipelineResult run_pipeline(const PipelineConfig& cfg);
PipelineResult run_pipeline(const PipelineConfig& cfg, const SimOutput& sim);

// Writes the complete artifact set: config.json, trace_{a,b,e}.csv,
// events.csv, kept_{a,b}.csv, bits_{a,b}.txt, sketch.json, reconcile.json,
// reconciled_b.txt, amplify.json, key_{a,b}.hex, metrics.json, nist.json,
// report.json.
void write_pipeline_artifacts(const std::filesystem::path& dir, const PipelineConfig& cfg,
                              const SimOutput& sim, const PipelineResult& result);

// Reassembles the full report from stage artifacts on disk; byte-identical
// to the report.json a single run_pipeline invocation writes.
PipelineResult evaluate_from_artifacts(const std::filesystem::path& dir);

// ---- stage artifact IO ------------------------------------------------------

void write_index_file(const std::filesystem::path& path, const QuantizationResult& res);
// Reconstructs the kept/dropped partition; bit values must come from the
// bits files, so `bits` stays empty here.
QuantizationResult read_index_file(const std::filesystem::path& path);

void write_bits_file(const std::filesystem::path& path, const BitSeq& bits);
BitSeq read_bits_file(const std::filesystem::path& path);

void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

// Eavesdropper guessing: the sign of her own RSSI delta at every shared kept
// comparison index. Positions where her trace misses a sample are skipped on
// both sides.
double compute_eve_kdr(const AlignedProbes& aligned, const RssiTrace& trace_e,
                       const std::vector<std::size_t>& merged_indices, const BitSeq& bits_a);

std::vector<std::size_t> merged_kept_indices(const QuantizationResult& res_a,
                                             const QuantizationResult& res_b);

}  // namespace lorakey
