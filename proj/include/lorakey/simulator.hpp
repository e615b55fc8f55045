#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lorakey/trace.hpp"

namespace lorakey {

enum class PathProfile { outdoor_urban, indoor, static_chamber };

std::string_view to_string(PathProfile p);
PathProfile path_profile_from_string(std::string_view s);

// Bidirectional probing simulator configuration. The common large-scale
// process is tx_power - pathloss(d(t)) + S(t) with S an AR(1) shadowing
// process in dB and d(t) a reflected random walk between dist_min_m and
// dist_max_m. Both sides sample that process, one probe-response lag apart,
// through their own white measurement noise; integer rounding mirrors the
// hardware's RSSI reporting.
struct SimConfig {
  int n_probes = 4000;
  int probe_interval_ms = 315;
  int tx_power_dbm = 13;
  PathProfile path_profile = PathProfile::outdoor_urban;

  double shadow_sigma_db = 6.0;
  double shadow_ar_coeff = 0.95;  // correlation across one probe interval, in [0, 1)
  double device_noise_sigma_db = 1.0;
  int halfduplex_lag_ms = 50;

  double eve_correlation = 0.1;      // target correlation of Eve's trace, in [0, 1]
  double eve_noise_sigma_db = 1.0;

  std::vector<std::uint64_t> channel_plan;  // defaults to the 8 EU868 uplink channels
  bool hopping = false;
  double packet_loss_prob = 0.03;
  std::uint64_t seed = 1;

  // propagation geometry
  double path_exponent = 3.2;
  double pathloss_ref_db = 31.5;  // pathloss at 1 m
  double dist_min_m = 50.0;
  double dist_max_m = 400.0;
  double dist_start_m = 70.0;
  double walk_speed_mps = 1.6;    // stationary std of the AR(1) velocity
  double walk_ar_coeff = 0.5;

  SimConfig();  // fills channel_plan with the default 8 channels

  static SimConfig from_profile(PathProfile profile);

  // key=value text, '#' comments; unknown keys are rejected
  static SimConfig parse(std::istream& in);
  static SimConfig parse(const std::string& text);
  std::string to_text() const;

  void validate() const;  // throws ConfigError
};

struct LinkEvent {
  enum class Direction { uplink, downlink };

  std::uint64_t seq_index = 0;
  Direction direction = Direction::uplink;
  std::uint64_t freq_hz = 0;
  int rssi_dbm = 0;  // at the receiver; meaningful only when delivered
  bool delivered = false;
};

struct SimOutput {
  RssiTrace trace_a;  // initiator side, measured on the ACKs it receives
  RssiTrace trace_b;  // responder side, measured on the uplink probes
  RssiTrace trace_e;  // eavesdropper overhearing the uplink probes
  std::vector<LinkEvent> events;
};

// Deterministic: identical configs (including the seed) give bit-identical
// output. Every emitted RSSI is clamped to [-148, 0] dBm.
SimOutput simulate_probing(const SimConfig& cfg);

// The per-uplink carrier choice the simulator uses: a seeded pseudo-random
// pick from channel_plan when hopping is on, otherwise channel_plan[0].
std::vector<std::uint64_t> hop_sequence(const SimConfig& cfg);

// Pairs delivered uplinks with their delivered same-seq ACKs. An ACK on a
// different frequency than its uplink violates the MAC rule and raises
// ProtocolViolation naming the sequence index. Unpaired events are dropped.
AlignedProbes pair_uplink_ack(std::span<const LinkEvent> events);

// Removes each record independently with probability p (seeded).
RssiTrace apply_packet_loss(const RssiTrace& trace, double p, std::uint64_t seed);

void write_events(std::ostream& out, std::span<const LinkEvent> events);
std::vector<LinkEvent> parse_events(std::istream& in);

}  // namespace lorakey
