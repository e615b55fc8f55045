#include "lorakey/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <unordered_map>

#include "lorakey/errors.hpp"
#include "lorakey/rng.hpp"

namespace lorakey {

namespace {

using ordered_json = nlohmann::ordered_json;

std::vector<std::uint8_t> salt_from_hex(const std::string& hex) {
  if (hex.size() % 2 != 0) throw ConfigError("salt must be an even-length hex string");
  std::vector<std::uint8_t> out;
  out.reserve(hex.size() / 2);
  auto digit = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw ConfigError("salt contains a non-hex character");
  };
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    out.push_back(static_cast<std::uint8_t>(digit(hex[i]) * 16 + digit(hex[i + 1])));
  }
  return out;
}

ordered_json sim_to_json(const SimConfig& s) {
  ordered_json j;
  j["path_profile"] = std::string(to_string(s.path_profile));
  j["n_probes"] = s.n_probes;
  j["probe_interval_ms"] = s.probe_interval_ms;
  j["tx_power_dbm"] = s.tx_power_dbm;
  j["shadow_sigma_db"] = s.shadow_sigma_db;
  j["shadow_ar_coeff"] = s.shadow_ar_coeff;
  j["device_noise_sigma_db"] = s.device_noise_sigma_db;
  j["eve_noise_sigma_db"] = s.eve_noise_sigma_db;
  j["halfduplex_lag_ms"] = s.halfduplex_lag_ms;
  j["eve_correlation"] = s.eve_correlation;
  j["channel_plan"] = s.channel_plan;
  j["hopping"] = s.hopping;
  j["packet_loss_prob"] = s.packet_loss_prob;
  j["seed"] = s.seed;
  j["path_exponent"] = s.path_exponent;
  j["pathloss_ref_db"] = s.pathloss_ref_db;
  j["dist_min_m"] = s.dist_min_m;
  j["dist_max_m"] = s.dist_max_m;
  j["dist_start_m"] = s.dist_start_m;
  j["walk_speed_mps"] = s.walk_speed_mps;
  j["walk_ar_coeff"] = s.walk_ar_coeff;
  return j;
}

SimConfig sim_from_json(const nlohmann::json& j) {
  SimConfig s;
  s.path_profile = path_profile_from_string(j.value("path_profile", "outdoor_urban"));
  s.n_probes = j.value("n_probes", s.n_probes);
  s.probe_interval_ms = j.value("probe_interval_ms", s.probe_interval_ms);
  s.tx_power_dbm = j.value("tx_power_dbm", s.tx_power_dbm);
  s.shadow_sigma_db = j.value("shadow_sigma_db", s.shadow_sigma_db);
  s.shadow_ar_coeff = j.value("shadow_ar_coeff", s.shadow_ar_coeff);
  s.device_noise_sigma_db = j.value("device_noise_sigma_db", s.device_noise_sigma_db);
  s.eve_noise_sigma_db = j.value("eve_noise_sigma_db", s.eve_noise_sigma_db);
  s.halfduplex_lag_ms = j.value("halfduplex_lag_ms", s.halfduplex_lag_ms);
  s.eve_correlation = j.value("eve_correlation", s.eve_correlation);
  if (j.contains("channel_plan")) {
    s.channel_plan = j["channel_plan"].get<std::vector<std::uint64_t>>();
  }
  s.hopping = j.value("hopping", s.hopping);
  s.packet_loss_prob = j.value("packet_loss_prob", s.packet_loss_prob);
  s.seed = j.value("seed", s.seed);
  s.path_exponent = j.value("path_exponent", s.path_exponent);
  s.pathloss_ref_db = j.value("pathloss_ref_db", s.pathloss_ref_db);
  s.dist_min_m = j.value("dist_min_m", s.dist_min_m);
  s.dist_max_m = j.value("dist_max_m", s.dist_max_m);
  s.dist_start_m = j.value("dist_start_m", s.dist_start_m);
  s.walk_speed_mps = j.value("walk_speed_mps", s.walk_speed_mps);
  s.walk_ar_coeff = j.value("walk_ar_coeff", s.walk_ar_coeff);
  s.validate();
  return s;
}

ordered_json config_to_json(const PipelineConfig& cfg) {
  ordered_json j;
  j["sim"] = sim_to_json(cfg.sim);
  j["epsilon"] = cfg.epsilon;
  j["hold_reference"] = cfg.hold_reference;
  j["code_id"] = cfg.code_id;
  j["key_bits"] = cfg.key_bits;
  j["alpha"] = cfg.alpha;
  j["mi_bins"] = cfg.mi_bins;
  j["salt_hex"] = cfg.salt_hex;
  return j;
}

}  // namespace

std::string PipelineConfig::to_json_text() const { return config_to_json(*this).dump(2) + "\n"; }

PipelineConfig PipelineConfig::from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("pipeline config JSON: ") + e.what());
  }
  PipelineConfig cfg;
  if (j.contains("sim")) cfg.sim = sim_from_json(j["sim"]);
  cfg.epsilon = j.value("epsilon", cfg.epsilon);
  cfg.hold_reference = j.value("hold_reference", cfg.hold_reference);
  cfg.code_id = j.value("code_id", cfg.code_id);
  cfg.key_bits = j.value("key_bits", cfg.key_bits);
  cfg.alpha = j.value("alpha", cfg.alpha);
  cfg.mi_bins = j.value("mi_bins", cfg.mi_bins);
  cfg.salt_hex = j.value("salt_hex", cfg.salt_hex);
  return cfg;
}

QuantizeStage quantize_stage(const RssiTrace& trace_a, const RssiTrace& trace_b,
                             const QuantizerConfig& qc) {
  QuantizeStage st;
  st.aligned = align_traces(trace_a, trace_b);
  if (st.aligned.size() < 2) {
    throw IntegrityError("fewer than 2 aligned probe rounds; cannot quantize");
  }
  st.res_a = differential_quantize(st.aligned.x_a, qc);
  st.res_b = differential_quantize(st.aligned.x_b, qc);
  std::tie(st.bits_a, st.bits_b) = merge_kept_indices(st.res_a, st.res_b);
  return st;
}

ReconcileStage reconcile_stage(const BitSeq& bits_a, const BitSeq& bits_b, const BchCode& code,
                               std::uint64_t seed) {
  ReconcileStage st;
  Rng rng(seed, "sketch");
  st.sketch = make_sketch(bits_a, code, rng);
  st.result = recover_key(bits_b, st.sketch, code);
  st.confirm_a = key_confirmation_hex(bits_a);
  if (st.result.ok) {
    st.confirm_b = key_confirmation_hex(st.result.key.bits);
    st.keys_match = st.confirm_a == st.confirm_b;
  }
  return st;
}

AmplifyStage amplify_stage(const BitSeq& bits_a, const std::optional<BitSeq>& reconciled_b,
                           const BchCode& code, int key_bits, const std::string& salt_hex) {
  AmplifyStage st;
  st.effective_entropy_bits = effective_entropy_bits(bits_a.size(), code);
  if (st.effective_entropy_bits < key_bits) {
    st.refused = true;
    return st;
  }
  const auto salt = salt_from_hex(salt_hex);
  st.key_a_hex = bits_to_hex(amplify(bits_a, static_cast<std::size_t>(key_bits), salt).bits);
  if (reconciled_b) {
    st.key_b_hex =
        bits_to_hex(amplify(*reconciled_b, static_cast<std::size_t>(key_bits), salt).bits);
  }
  st.amplified = true;
  return st;
}

std::vector<std::size_t> merged_kept_indices(const QuantizationResult& res_a,
                                             const QuantizationResult& res_b) {
  std::vector<std::size_t> out;
  std::set_intersection(res_a.kept_indices.begin(), res_a.kept_indices.end(),
                        res_b.kept_indices.begin(), res_b.kept_indices.end(),
                        std::back_inserter(out));
  return out;
}

double compute_eve_kdr(const AlignedProbes& aligned, const RssiTrace& trace_e,
                       const std::vector<std::size_t>& merged_indices, const BitSeq& bits_a) {
  std::unordered_map<std::uint64_t, int> eve_rssi;
  eve_rssi.reserve(trace_e.records.size());
  for (const auto& r : trace_e.records) eve_rssi.emplace(r.seq_index, r.rssi_dbm);

  std::size_t counted = 0, mismatched = 0;
  for (std::size_t p = 0; p < merged_indices.size(); ++p) {
    const std::size_t i = merged_indices[p];  // 1-based comparison index
    const auto cur = eve_rssi.find(aligned.indices[i]);
    const auto prev = eve_rssi.find(aligned.indices[i - 1]);
    if (cur == eve_rssi.end() || prev == eve_rssi.end()) continue;
    const int delta = cur->second - prev->second;
    const std::uint8_t guess = delta > 0 ? 1 : 0;
    ++counted;
    mismatched += guess != bits_a[p];
  }
  // no overlap means the eavesdropper learned nothing; a coin flip is the
  // honest summary
  if (counted == 0) return 0.5;
  return static_cast<double>(mismatched) / static_cast<double>(counted);
}

namespace {

MetricsReport compute_metrics(const AlignedProbes& aligned, const RssiTrace& trace_e,
                              const BitSeq& bits_a, const BitSeq& bits_b, int bins) {
  MetricsReport m;
  m.rho = pearson_rho(std::span<const int>(aligned.x_a), std::span<const int>(aligned.x_b));
  m.kdr = kdr(bits_a, bits_b);

  std::unordered_map<std::uint64_t, int> eve_rssi;
  eve_rssi.reserve(trace_e.records.size());
  for (const auto& r : trace_e.records) eve_rssi.emplace(r.seq_index, r.rssi_dbm);

  std::vector<int> xa3, xb3, xe3;
  for (std::size_t i = 0; i < aligned.size(); ++i) {
    const auto it = eve_rssi.find(aligned.indices[i]);
    if (it == eve_rssi.end()) continue;
    xa3.push_back(aligned.x_a[i]);
    xb3.push_back(aligned.x_b[i]);
    xe3.push_back(it->second);
  }

  if (xe3.empty()) {
    // no eavesdropper observations: her information terms are zero
    m.mi_ab_bits = mi_plugin(std::span<const int>(aligned.x_a),
                             std::span<const int>(aligned.x_b), bins);
    m.mi_ae_bits = 0.0;
    m.mi_be_bits = 0.0;
    m.csk_lower_bits = m.mi_ab_bits;
    return m;
  }
  m.mi_ab_bits = mi_plugin(std::span<const int>(xa3), std::span<const int>(xb3), bins);
  m.mi_ae_bits = mi_plugin(std::span<const int>(xa3), std::span<const int>(xe3), bins);
  m.mi_be_bits = mi_plugin(std::span<const int>(xb3), std::span<const int>(xe3), bins);
  m.csk_lower_bits = m.mi_ab_bits - std::min(m.mi_ae_bits, m.mi_be_bits);
  return m;
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& cfg, const SimOutput& sim) {
  PipelineResult out;
  out.config = cfg;

  const auto code = BchCode::from_preset(cfg.code_id);
  QuantizerConfig qc{cfg.epsilon, cfg.hold_reference};
  const auto qs = quantize_stage(sim.trace_a, sim.trace_b, qc);

  out.n_aligned = qs.aligned.size();
  out.n_kept_merged = qs.bits_a.size();
  out.bit_yield = static_cast<double>(out.n_kept_merged) / static_cast<double>(out.n_aligned);

  out.metrics = compute_metrics(qs.aligned, sim.trace_e, qs.bits_a, qs.bits_b, cfg.mi_bins);
  out.nist = run_suite(qs.bits_a, cfg.alpha);
  out.eve_kdr = compute_eve_kdr(qs.aligned, sim.trace_e,
                                merged_kept_indices(qs.res_a, qs.res_b), qs.bits_a);

  const auto rs = reconcile_stage(qs.bits_a, qs.bits_b, code, cfg.sim.seed);
  out.reconcile_ok = rs.result.ok;
  out.failed_blocks = rs.result.failed_blocks;
  out.keys_match = rs.keys_match;
  out.key_confirm_a = rs.confirm_a;
  out.key_confirm_b = rs.confirm_b;

  std::optional<BitSeq> reconciled;
  if (rs.result.ok) reconciled = rs.result.key.bits;
  const auto as = amplify_stage(qs.bits_a, reconciled, code, cfg.key_bits, cfg.salt_hex);
  out.effective_entropy_bits = as.effective_entropy_bits;
  out.budget_refused = as.refused;
  out.amplified = as.amplified;
  out.key_a_hex = as.key_a_hex;
  out.key_b_hex = as.key_b_hex;
  return out;
}

PipelineResult run_pipeline(const PipelineConfig& cfg) {
  const auto sim = simulate_probing(cfg.sim);
  return run_pipeline(cfg, sim);
}

std::string PipelineResult::report_json() const {
  ordered_json j;
  j["config_echo"] = config_to_json(config);
  j["n_aligned"] = n_aligned;
  j["n_kept_merged"] = n_kept_merged;
  j["bit_yield"] = bit_yield;
  j["metrics"] = ordered_json::parse(metrics.to_json());
  j["nist"] = ordered_json::parse(nist.to_json());
  j["reconcile_status"] = reconcile_ok ? "success" : "failure";
  j["failed_blocks"] = failed_blocks;
  j["keys_match"] = keys_match;
  j["eve_kdr"] = eve_kdr;
  j["effective_entropy_bits"] = effective_entropy_bits;
  j["budget_refused"] = budget_refused;
  j["amplified"] = amplified;
  j["key_confirm_a"] = key_confirm_a;
  j["key_confirm_b"] = key_confirm_b;
  j["final_key_bits"] = amplified ? config.key_bits : 0;
  return j.dump(2) + "\n";
}

int PipelineResult::exit_code() const {
  if (!reconcile_ok || !keys_match) return 2;
  if (budget_refused) return 3;
  return 0;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

std::string indices_to_csv(const std::vector<std::size_t>& v) {
  std::ostringstream out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out << ',';
    out << v[i];
  }
  return out.str();
}

std::vector<std::size_t> csv_to_indices(const std::string& line, const char* what) {
  std::vector<std::size_t> out;
  if (line.empty()) return out;
  std::istringstream in(line);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      out.push_back(std::stoull(item));
    } catch (const std::exception&) {
      throw ParseError(std::string(what) + ": invalid index '" + item + "'");
    }
  }
  return out;
}

}  // namespace

void write_index_file(const std::filesystem::path& path, const QuantizationResult& res) {
  write_text_file(path, indices_to_csv(res.kept_indices) + "\n" +
                            indices_to_csv(res.dropped_indices) + "\n");
}

QuantizationResult read_index_file(const std::filesystem::path& path) {
  std::istringstream in(read_text_file(path));
  std::string kept_line, dropped_line;
  std::getline(in, kept_line);
  std::getline(in, dropped_line);
  if (!kept_line.empty() && kept_line.back() == '\r') kept_line.pop_back();
  if (!dropped_line.empty() && dropped_line.back() == '\r') dropped_line.pop_back();
  QuantizationResult res;
  res.kept_indices = csv_to_indices(kept_line, path.string().c_str());
  res.dropped_indices = csv_to_indices(dropped_line, path.string().c_str());
  return res;
}

void write_bits_file(const std::filesystem::path& path, const BitSeq& bits) {
  write_text_file(path, bits_to_string(bits) + "\n");
}

BitSeq read_bits_file(const std::filesystem::path& path) {
  std::string text = read_text_file(path);
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
  return bits_from_string(text);
}

void write_pipeline_artifacts(const std::filesystem::path& dir, const PipelineConfig& cfg,
                              const SimOutput& sim, const PipelineResult& result) {
  std::filesystem::create_directories(dir);
  write_text_file(dir / "config.json", cfg.to_json_text());
  save_trace(dir / "trace_a.csv", sim.trace_a);
  save_trace(dir / "trace_b.csv", sim.trace_b);
  save_trace(dir / "trace_e.csv", sim.trace_e);
  {
    std::ostringstream ev;
    write_events(ev, sim.events);
    write_text_file(dir / "events.csv", ev.str());
  }

  // quantization artifacts have to be regenerated to be written out
  QuantizerConfig qc{cfg.epsilon, cfg.hold_reference};
  const auto qs = quantize_stage(sim.trace_a, sim.trace_b, qc);
  write_index_file(dir / "kept_a.csv", qs.res_a);
  write_index_file(dir / "kept_b.csv", qs.res_b);
  write_bits_file(dir / "bits_a.txt", qs.bits_a);
  write_bits_file(dir / "bits_b.txt", qs.bits_b);

  const auto code = BchCode::from_preset(cfg.code_id);
  const auto rs = reconcile_stage(qs.bits_a, qs.bits_b, code, cfg.sim.seed);
  write_text_file(dir / "sketch.json", rs.sketch.to_json());
  {
    ordered_json j;
    j["code_id"] = cfg.code_id;
    j["status"] = rs.result.ok ? "success" : "failure";
    j["failed_blocks"] = rs.result.failed_blocks;
    j["key_confirm_a"] = rs.confirm_a;
    j["key_confirm_b"] = rs.confirm_b;
    j["keys_match"] = rs.keys_match;
    write_text_file(dir / "reconcile.json", j.dump(2) + "\n");
  }
  if (rs.result.ok) write_bits_file(dir / "reconciled_b.txt", rs.result.key.bits);

  {
    ordered_json j;
    j["key_bits"] = cfg.key_bits;
    j["effective_entropy_bits"] = result.effective_entropy_bits;
    j["budget_refused"] = result.budget_refused;
    j["amplified"] = result.amplified;
    write_text_file(dir / "amplify.json", j.dump(2) + "\n");
  }
  if (result.amplified) {
    write_text_file(dir / "key_a.hex", result.key_a_hex + "\n");
    if (!result.key_b_hex.empty()) write_text_file(dir / "key_b.hex", result.key_b_hex + "\n");
  }

  write_text_file(dir / "metrics.json", result.metrics.to_json());
  write_text_file(dir / "nist.json", result.nist.to_json());
  write_text_file(dir / "report.json", result.report_json());
}

PipelineResult evaluate_from_artifacts(const std::filesystem::path& dir) {
  PipelineResult out;
  out.config = PipelineConfig::from_json_text(read_text_file(dir / "config.json"));

  const auto trace_a = load_trace(dir / "trace_a.csv", "alice");
  const auto trace_b = load_trace(dir / "trace_b.csv", "bob");
  RssiTrace trace_e;
  if (std::filesystem::exists(dir / "trace_e.csv")) {
    trace_e = load_trace(dir / "trace_e.csv", "eve");
  }

  const auto aligned = align_traces(trace_a, trace_b);
  auto res_a = read_index_file(dir / "kept_a.csv");
  auto res_b = read_index_file(dir / "kept_b.csv");
  const auto bits_a = read_bits_file(dir / "bits_a.txt");
  const auto bits_b = read_bits_file(dir / "bits_b.txt");

  out.n_aligned = aligned.size();
  out.n_kept_merged = bits_a.size();
  out.bit_yield = static_cast<double>(out.n_kept_merged) / static_cast<double>(out.n_aligned);
  out.metrics = compute_metrics(aligned, trace_e, bits_a, bits_b, out.config.mi_bins);
  out.nist = run_suite(bits_a, out.config.alpha);
  out.eve_kdr = compute_eve_kdr(aligned, trace_e, merged_kept_indices(res_a, res_b), bits_a);

  {
    const auto j = nlohmann::json::parse(read_text_file(dir / "reconcile.json"));
    out.reconcile_ok = j.at("status").get<std::string>() == "success";
    out.failed_blocks = j.at("failed_blocks").get<std::vector<std::size_t>>();
    out.keys_match = j.at("keys_match").get<bool>();
    out.key_confirm_a = j.at("key_confirm_a").get<std::string>();
    out.key_confirm_b = j.at("key_confirm_b").get<std::string>();
  }
  {
    const auto j = nlohmann::json::parse(read_text_file(dir / "amplify.json"));
    out.effective_entropy_bits = j.at("effective_entropy_bits").get<std::ptrdiff_t>();
    out.budget_refused = j.at("budget_refused").get<bool>();
    out.amplified = j.at("amplified").get<bool>();
  }
  if (out.amplified) {
    auto strip = [](std::string s) {
      while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
      return s;
    };
    out.key_a_hex = strip(read_text_file(dir / "key_a.hex"));
    if (std::filesystem::exists(dir / "key_b.hex")) {
      out.key_b_hex = strip(read_text_file(dir / "key_b.hex"));
    }
  }

  write_text_file(dir / "metrics.json", out.metrics.to_json());
  write_text_file(dir / "nist.json", out.nist.to_json());
  write_text_file(dir / "report.json", out.report_json());
  return out;
}

}  // namespace lorakey
