#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>

#include "lorakey/errors.hpp"
#include "lorakey/pipeline.hpp"

namespace fs = std::filesystem;
using namespace lorakey;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;

struct SimSelection {
  std::string preset = "outdoor_urban";
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> probes;
  std::optional<bool> hopping;
  std::optional<double> loss;
  std::optional<double> eve_correlation;
  std::optional<double> device_noise;

  SimConfig resolve() const {
    SimConfig sim;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw ConfigError("cannot open config file " + config_path);
      sim = SimConfig::parse(in);
    } else {
      sim = SimConfig::from_profile(path_profile_from_string(preset));
    }
    if (seed) sim.seed = *seed;
    if (probes) sim.n_probes = *probes;
    if (hopping) sim.hopping = *hopping;
    if (loss) sim.packet_loss_prob = *loss;
    if (eve_correlation) sim.eve_correlation = *eve_correlation;
    if (device_noise) sim.device_noise_sigma_db = *device_noise;
    sim.validate();
    return sim;
  }
};

void add_sim_options(CLI::App* cmd, SimSelection& sel) {
  cmd->add_option("--preset", sel.preset, "Channel preset: outdoor_urban, indoor, static_chamber")
      ->default_val("outdoor_urban");
  cmd->add_option("--config", sel.config_path, "Simulator config file (key = value lines)");
  cmd->add_option("--seed", sel.seed, "Simulation seed");
  cmd->add_option("--probes", sel.probes, "Number of probe rounds");
  cmd->add_flag("--hopping,!--no-hopping", sel.hopping, "Enable pseudo-random channel hopping");
  cmd->add_option("--loss", sel.loss, "Per-direction packet loss probability");
  cmd->add_option("--eve-correlation", sel.eve_correlation, "Target eavesdropper correlation");
  cmd->add_option("--device-noise", sel.device_noise, "Per-device noise sigma in dB");
}

PipelineConfig load_dir_config(const fs::path& dir) {
  return PipelineConfig::from_json_text(read_text_file(dir / "config.json"));
}

void store_dir_config(const fs::path& dir, const PipelineConfig& cfg) {
  write_text_file(dir / "config.json", cfg.to_json_text());
}

void print_nist_table(std::ostream& out, const NistReport& report) {
  out << "randomness tests (n=" << report.sequence_length << ", alpha=" << report.alpha << ")\n";
  for (const auto& r : report.results) {
    std::ostringstream ps;
    if (r.status == TestStatus::not_applicable) {
      ps << "not applicable";
    } else {
      ps << std::fixed << std::setprecision(4);
      for (std::size_t i = 0; i < r.p_values.size(); ++i) {
        if (i) ps << ", ";
        ps << r.p_values[i];
      }
    }
    out << "  " << std::left << std::setw(22) << r.test_name << std::setw(18) << ps.str()
        << (r.status == TestStatus::not_applicable ? "-" : (r.pass ? "pass" : "FAIL")) << "\n";
  }
  out << "  overall: " << (report.overall_pass ? "pass" : "FAIL") << "\n";
}

void print_summary(std::ostream& out, const PipelineResult& res) {
  out << "aligned probe pairs: " << res.n_aligned << "\n";
  out << "merged key bits:     " << res.n_kept_merged << " (yield "
      << std::fixed << std::setprecision(4) << res.bit_yield << " bits/pair)\n";
  out << "rho:                 " << std::setprecision(4) << res.metrics.rho << "\n";
  out << "kdr:                 " << res.metrics.kdr << "\n";
  out << "capacity bound:      " << res.metrics.csk_lower_bits << " bits\n";
  out << "eve kdr:             " << res.eve_kdr << "\n";
  out << "reconcile:           " << (res.reconcile_ok ? "success" : "failure");
  if (!res.failed_blocks.empty()) {
    out << " (blocks";
    for (auto b : res.failed_blocks) out << ' ' << b;
    out << ")";
  }
  out << "\n";
  out << "keys match:          " << (res.keys_match ? "yes" : "no") << "\n";
  out << "effective entropy:   " << res.effective_entropy_bits << " bits\n";
  if (res.budget_refused) {
    out << "amplification:       refused (budget below " << res.config.key_bits << " bits)\n";
  } else if (res.amplified) {
    out << "amplified key:       " << res.config.key_bits << " bits\n";
  }
  print_nist_table(out, res.nist);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Physical-layer secret key generation toolkit"};
  app.require_subcommand(1);

  // ---- simulate ----
  SimSelection sim_sel;
  std::string sim_out;
  bool dump_config = false;
  auto* cmd_sim = app.add_subcommand("simulate", "Generate probing traces");
  add_sim_options(cmd_sim, sim_sel);
  cmd_sim->add_option("--out", sim_out, "Output directory");
  cmd_sim->add_flag("--dump-config", dump_config, "Print the effective simulator config");

  // ---- quantize ----
  std::string q_dir;
  std::optional<int> q_epsilon;
  bool q_hold = false;
  auto* cmd_quant = app.add_subcommand("quantize", "Differential quantization of a trace pair");
  cmd_quant->add_option("--dir", q_dir, "Stage directory (from simulate)")->required();
  cmd_quant->add_option("--epsilon", q_epsilon, "RSSI resolution in dBm");
  cmd_quant->add_flag("--hold-reference", q_hold, "Hold the last kept sample as reference");

  // ---- reconcile ----
  std::string r_dir, r_code, r_sketch;
  auto* cmd_rec = app.add_subcommand("reconcile", "Secure-sketch information reconciliation");
  cmd_rec->add_option("--dir", r_dir, "Stage directory (from quantize)")->required();
  cmd_rec->add_option("--code", r_code, "Code preset: bch15_t3, bch31_t3, bch63_t5");
  cmd_rec->add_option("--sketch", r_sketch, "Recover against an existing sketch file");

  // ---- amplify ----
  std::string a_dir, a_salt;
  std::optional<int> a_bits;
  auto* cmd_amp = app.add_subcommand("amplify", "Privacy amplification of the reconciled key");
  cmd_amp->add_option("--dir", a_dir, "Stage directory (from reconcile)")->required();
  cmd_amp->add_option("--key-bits", a_bits, "Final key length in bits");
  cmd_amp->add_option("--salt", a_salt, "Hex salt for the extraction hash");

  // ---- evaluate ----
  std::string e_dir, e_trace_a, e_trace_b, e_trace_e, e_out;
  int e_bins = 16;
  int e_epsilon = 2;
  auto* cmd_eval = app.add_subcommand("evaluate", "Reciprocity metrics and randomness report");
  cmd_eval->add_option("--dir", e_dir, "Stage directory: assemble metrics/nist/report");
  cmd_eval->add_option("--trace-a", e_trace_a, "Trace CSV of side A (standalone mode)");
  cmd_eval->add_option("--trace-b", e_trace_b, "Trace CSV of side B (standalone mode)");
  cmd_eval->add_option("--trace-e", e_trace_e, "Eavesdropper trace CSV (optional)");
  cmd_eval->add_option("--epsilon", e_epsilon, "RSSI resolution for the KDR computation");
  cmd_eval->add_option("--bins", e_bins, "Histogram bins for mutual information");
  cmd_eval->add_option("--out", e_out, "Write the metrics JSON to this file");

  // ---- run ----
  SimSelection run_sel;
  std::string run_out = "out";
  PipelineConfig run_cfg;
  auto* cmd_run = app.add_subcommand("run", "Full pipeline: simulate through evaluate");
  add_sim_options(cmd_run, run_sel);
  cmd_run->add_option("--epsilon", run_cfg.epsilon, "RSSI resolution in dBm")->default_val(2);
  cmd_run->add_flag("--hold-reference", run_cfg.hold_reference,
                    "Hold the last kept sample as reference");
  cmd_run->add_option("--code", run_cfg.code_id, "Code preset")->default_val("bch15_t3");
  cmd_run->add_option("--key-bits", run_cfg.key_bits, "Final key length")->default_val(128);
  cmd_run->add_option("--alpha", run_cfg.alpha, "Randomness test threshold")->default_val(0.01);
  cmd_run->add_option("--bins", run_cfg.mi_bins, "Histogram bins for mutual information")
      ->default_val(16);
  cmd_run->add_option("--salt", run_cfg.salt_hex, "Hex salt for the extraction hash");
  cmd_run->add_option("--out", run_out, "Output directory")->default_val("out");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (cmd_sim->parsed()) {
      const auto sim_cfg = sim_sel.resolve();
      if (dump_config) {
        std::cout << sim_cfg.to_text();
        if (sim_out.empty()) return kExitOk;
      }
      if (sim_out.empty()) throw ConfigError("simulate needs --out DIR (or --dump-config)");
      const auto sim = simulate_probing(sim_cfg);
      fs::create_directories(sim_out);
      PipelineConfig cfg;
      cfg.sim = sim_cfg;
      store_dir_config(sim_out, cfg);
      save_trace(fs::path(sim_out) / "trace_a.csv", sim.trace_a);
      save_trace(fs::path(sim_out) / "trace_b.csv", sim.trace_b);
      save_trace(fs::path(sim_out) / "trace_e.csv", sim.trace_e);
      std::ostringstream ev;
      write_events(ev, sim.events);
      write_text_file(fs::path(sim_out) / "events.csv", ev.str());
      std::cout << "wrote traces for " << sim.trace_b.size() << " delivered probes to " << sim_out
                << "\n";
      return kExitOk;
    }

    if (cmd_quant->parsed()) {
      const fs::path dir = q_dir;
      auto cfg = load_dir_config(dir);
      if (q_epsilon) cfg.epsilon = *q_epsilon;
      if (q_hold) cfg.hold_reference = true;
      const auto trace_a = load_trace(dir / "trace_a.csv", "alice");
      const auto trace_b = load_trace(dir / "trace_b.csv", "bob");
      const auto qs = quantize_stage(trace_a, trace_b, {cfg.epsilon, cfg.hold_reference});
      write_index_file(dir / "kept_a.csv", qs.res_a);
      write_index_file(dir / "kept_b.csv", qs.res_b);
      write_bits_file(dir / "bits_a.txt", qs.bits_a);
      write_bits_file(dir / "bits_b.txt", qs.bits_b);
      store_dir_config(dir, cfg);
      std::cout << "kept " << qs.bits_a.size() << " of " << qs.res_a.comparison_count()
                << " comparisons\n";
      return kExitOk;
    }

    if (cmd_rec->parsed()) {
      const fs::path dir = r_dir;
      auto cfg = load_dir_config(dir);
      if (!r_code.empty()) cfg.code_id = r_code;
      const auto code = BchCode::from_preset(cfg.code_id);
      const auto bits_b = read_bits_file(dir / "bits_b.txt");

      if (!r_sketch.empty()) {
        // one-sided recovery against an externally produced sketch
        const auto sketch = SketchMessage::from_json(read_text_file(r_sketch));
        const auto rec = recover_key(bits_b, sketch, code);
        if (!rec.ok) {
          std::cerr << "reconciliation failed for " << rec.failed_blocks.size() << " block(s)\n";
          return 2;
        }
        write_bits_file(dir / "reconciled_b.txt", rec.key.bits);
        std::cout << "recovered " << rec.key.bits.size() << " bits\n";
        store_dir_config(dir, cfg);
        return kExitOk;
      }

      const auto bits_a = read_bits_file(dir / "bits_a.txt");
      const auto rs = reconcile_stage(bits_a, bits_b, code, cfg.sim.seed);
      write_text_file(dir / "sketch.json", rs.sketch.to_json());
      nlohmann::ordered_json j;
      j["code_id"] = cfg.code_id;
      j["status"] = rs.result.ok ? "success" : "failure";
      j["failed_blocks"] = rs.result.failed_blocks;
      j["key_confirm_a"] = rs.confirm_a;
      j["key_confirm_b"] = rs.confirm_b;
      j["keys_match"] = rs.keys_match;
      write_text_file(dir / "reconcile.json", j.dump(2) + "\n");
      if (rs.result.ok) write_bits_file(dir / "reconciled_b.txt", rs.result.key.bits);
      store_dir_config(dir, cfg);
      std::cout << "reconcile: " << (rs.result.ok ? "success" : "failure") << ", keys "
                << (rs.keys_match ? "match" : "differ") << "\n";
      return rs.keys_match ? kExitOk : 2;
    }

    if (cmd_amp->parsed()) {
      const fs::path dir = a_dir;
      auto cfg = load_dir_config(dir);
      if (a_bits) cfg.key_bits = *a_bits;
      if (!a_salt.empty()) cfg.salt_hex = a_salt;
      const auto code = BchCode::from_preset(cfg.code_id);
      const auto bits_a = read_bits_file(dir / "bits_a.txt");
      std::optional<BitSeq> reconciled;
      if (fs::exists(dir / "reconciled_b.txt")) {
        reconciled = read_bits_file(dir / "reconciled_b.txt");
      }
      const auto as = amplify_stage(bits_a, reconciled, code, cfg.key_bits, cfg.salt_hex);
      nlohmann::ordered_json j;
      j["key_bits"] = cfg.key_bits;
      j["effective_entropy_bits"] = as.effective_entropy_bits;
      j["budget_refused"] = as.refused;
      j["amplified"] = as.amplified;
      write_text_file(dir / "amplify.json", j.dump(2) + "\n");
      store_dir_config(dir, cfg);
      if (as.refused) {
        std::cerr << "refusing to amplify: effective entropy " << as.effective_entropy_bits
                  << " bits < requested " << cfg.key_bits << " bits\n";
        return 3;
      }
      write_text_file(dir / "key_a.hex", as.key_a_hex + "\n");
      if (!as.key_b_hex.empty()) write_text_file(dir / "key_b.hex", as.key_b_hex + "\n");
      std::cout << "amplified to " << cfg.key_bits << " bits (effective entropy "
                << as.effective_entropy_bits << ")\n";
      return kExitOk;
    }

    if (cmd_eval->parsed()) {
      if (!e_dir.empty()) {
        const auto res = evaluate_from_artifacts(e_dir);
        print_summary(std::cout, res);
        return kExitOk;
      }
      if (e_trace_a.empty() || e_trace_b.empty()) {
        throw ConfigError("evaluate needs either --dir or --trace-a plus --trace-b");
      }
      const auto trace_a = load_trace(e_trace_a, "a");
      const auto trace_b = load_trace(e_trace_b, "b");
      RssiTrace trace_e;
      if (!e_trace_e.empty()) trace_e = load_trace(e_trace_e, "e");
      const auto qs = quantize_stage(trace_a, trace_b, {e_epsilon, false});

      MetricsReport m;
      m.rho = pearson_rho(std::span<const int>(qs.aligned.x_a),
                          std::span<const int>(qs.aligned.x_b));
      m.kdr = kdr(qs.bits_a, qs.bits_b);
      if (trace_e.size() > 0) {
        std::vector<int> xe;
        std::vector<int> xa, xb;
        std::size_t ei = 0;
        for (std::size_t i = 0; i < qs.aligned.size(); ++i) {
          while (ei < trace_e.records.size() &&
                 trace_e.records[ei].seq_index < qs.aligned.indices[i]) {
            ++ei;
          }
          if (ei < trace_e.records.size() &&
              trace_e.records[ei].seq_index == qs.aligned.indices[i]) {
            xa.push_back(qs.aligned.x_a[i]);
            xb.push_back(qs.aligned.x_b[i]);
            xe.push_back(trace_e.records[ei].rssi_dbm);
          }
        }
        m.mi_ab_bits = mi_plugin(std::span<const int>(xa), std::span<const int>(xb), e_bins);
        m.mi_ae_bits = mi_plugin(std::span<const int>(xa), std::span<const int>(xe), e_bins);
        m.mi_be_bits = mi_plugin(std::span<const int>(xb), std::span<const int>(xe), e_bins);
        m.csk_lower_bits = m.mi_ab_bits - std::min(m.mi_ae_bits, m.mi_be_bits);
      } else {
        m.mi_ab_bits = mi_plugin(std::span<const int>(qs.aligned.x_a),
                                 std::span<const int>(qs.aligned.x_b), e_bins);
        m.csk_lower_bits = m.mi_ab_bits;
      }
      const auto text = m.to_json();
      if (!e_out.empty()) write_text_file(e_out, text);
      std::cout << text;
      return kExitOk;
    }

    if (cmd_run->parsed()) {
      run_cfg.sim = run_sel.resolve();
      const auto sim = simulate_probing(run_cfg.sim);
      const auto res = run_pipeline(run_cfg, sim);
      write_pipeline_artifacts(run_out, run_cfg, sim, res);
      print_summary(std::cout, res);
      std::cout << "artifacts written to " << run_out << "\n";
      return res.exit_code();
    }
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const EntropyBudgetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
