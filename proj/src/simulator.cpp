#include "lorakey/simulator.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "lorakey/errors.hpp"
#include "lorakey/rng.hpp"

namespace lorakey {

namespace {

// The Things Network EU868 uplink channels.
const std::vector<std::uint64_t> kDefaultChannels = {
    868100000, 868300000, 868500000, 867100000,
    867300000, 867500000, 867700000, 867900000,
};

int clamp_rssi(double v) {
  const double r = std::round(v);
  return static_cast<int>(std::clamp(r, static_cast<double>(kRssiFloorDbm),
                                     static_cast<double>(kRssiCeilDbm)));
}

}  // namespace

std::string_view to_string(PathProfile p) {
  switch (p) {
    case PathProfile::outdoor_urban: return "outdoor_urban";
    case PathProfile::indoor: return "indoor";
    case PathProfile::static_chamber: return "static_chamber";
  }
  return "outdoor_urban";
}

PathProfile path_profile_from_string(std::string_view s) {
  if (s == "outdoor_urban") return PathProfile::outdoor_urban;
  if (s == "indoor") return PathProfile::indoor;
  if (s == "static_chamber") return PathProfile::static_chamber;
  throw ConfigError("unknown path profile '" + std::string(s) + "'");
}

SimConfig::SimConfig() : channel_plan(kDefaultChannels) {}

SimConfig SimConfig::from_profile(PathProfile profile) {
  SimConfig cfg;
  cfg.path_profile = profile;
  switch (profile) {
    case PathProfile::outdoor_urban:
      // walking probe through shadowed streets; values are the struct
      // defaults, restated so the profiles stand on their own
      cfg.n_probes = 4000;
      cfg.probe_interval_ms = 315;
      cfg.shadow_sigma_db = 6.0;
      cfg.shadow_ar_coeff = 0.95;
      cfg.device_noise_sigma_db = 1.0;
      cfg.eve_noise_sigma_db = 1.0;
      cfg.packet_loss_prob = 0.03;
      cfg.path_exponent = 3.2;
      cfg.pathloss_ref_db = 31.5;
      cfg.dist_min_m = 50.0;
      cfg.dist_max_m = 400.0;
      cfg.dist_start_m = 70.0;
      cfg.walk_speed_mps = 1.6;
      break;
    case PathProfile::indoor:
      // multipath-rich building walk, shorter run
      cfg.n_probes = 2300;
      cfg.probe_interval_ms = 260;
      cfg.shadow_sigma_db = 5.0;
      cfg.shadow_ar_coeff = 0.95;
      cfg.device_noise_sigma_db = 0.9;
      cfg.eve_noise_sigma_db = 0.9;
      cfg.packet_loss_prob = 0.01;
      cfg.path_exponent = 2.8;
      cfg.pathloss_ref_db = 45.0;
      cfg.dist_min_m = 5.0;
      cfg.dist_max_m = 60.0;
      cfg.dist_start_m = 10.0;
      cfg.walk_speed_mps = 1.0;
      break;
    case PathProfile::static_chamber:
      // anechoic calibration: fixed short distance, hardware noise only
      cfg.n_probes = 4000;
      cfg.probe_interval_ms = 225;
      cfg.shadow_sigma_db = 0.4;
      cfg.shadow_ar_coeff = 0.95;
      cfg.device_noise_sigma_db = 0.8;
      cfg.eve_noise_sigma_db = 0.8;
      cfg.packet_loss_prob = 0.0;
      cfg.path_exponent = 2.0;
      cfg.pathloss_ref_db = 40.0;
      cfg.dist_min_m = 2.0;
      cfg.dist_max_m = 2.0;
      cfg.dist_start_m = 2.0;
      cfg.walk_speed_mps = 0.0;
      break;
  }
  return cfg;
}

void SimConfig::validate() const {
  if (n_probes < 2) throw ConfigError("n_probes must be >= 2");
  if (probe_interval_ms <= 0) throw ConfigError("probe_interval_ms must be positive");
  if (shadow_sigma_db < 0) throw ConfigError("shadow_sigma_db must be >= 0");
  if (shadow_ar_coeff < 0.0 || shadow_ar_coeff >= 1.0) {
    throw ConfigError("shadow_ar_coeff must lie in [0, 1)");
  }
  if (device_noise_sigma_db < 0) throw ConfigError("device_noise_sigma_db must be >= 0");
  if (eve_noise_sigma_db < 0) throw ConfigError("eve_noise_sigma_db must be >= 0");
  if (halfduplex_lag_ms < 0) throw ConfigError("halfduplex_lag_ms must be >= 0");
  if (eve_correlation < 0.0 || eve_correlation > 1.0) {
    throw ConfigError("eve_correlation must lie in [0, 1]");
  }
  if (channel_plan.empty()) throw ConfigError("channel_plan must not be empty");
  if (packet_loss_prob < 0.0 || packet_loss_prob >= 1.0) {
    throw ConfigError("packet_loss_prob must lie in [0, 1)");
  }
  if (path_exponent <= 0) throw ConfigError("path_exponent must be positive");
  if (dist_min_m <= 0 || dist_max_m < dist_min_m) {
    throw ConfigError("need 0 < dist_min_m <= dist_max_m");
  }
  if (dist_start_m < dist_min_m || dist_start_m > dist_max_m) {
    throw ConfigError("dist_start_m must lie in [dist_min_m, dist_max_m]");
  }
  if (walk_speed_mps < 0) throw ConfigError("walk_speed_mps must be >= 0");
  if (walk_ar_coeff < 0.0 || walk_ar_coeff >= 1.0) {
    throw ConfigError("walk_ar_coeff must lie in [0, 1)");
  }
}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  const auto last = s.find_last_not_of(" \t");
  if (first == std::string_view::npos) return {};
  return std::string(s.substr(first, last - first + 1));
}

bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("config key '" + key + "': expected a boolean, got '" + v + "'");
}

template <typename T>
T parse_number(const std::string& v, const std::string& key) {
  std::istringstream in(v);
  T out{};
  in >> out;
  if (in.fail() || !(in >> std::ws).eof()) {
    throw ConfigError("config key '" + key + "': invalid value '" + v + "'");
  }
  return out;
}

}  // namespace

SimConfig SimConfig::parse(std::istream& in) {
  SimConfig cfg;
  bool profile_seen = false;
  std::map<std::string, std::string> kv;
  std::vector<std::string> order;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    }
    if (kv.count(key)) {
      throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key '" + key +
                        "'");
    }
    kv[key] = value;
    order.push_back(key);
  }

  // apply the profile first so explicit keys override its defaults
  if (auto it = kv.find("path_profile"); it != kv.end()) {
    cfg = SimConfig::from_profile(path_profile_from_string(it->second));
    profile_seen = true;
  }
  (void)profile_seen;

  for (const auto& key : order) {
    const std::string& value = kv[key];
    if (key == "path_profile") {
      continue;  // already applied
    } else if (key == "n_probes") {
      cfg.n_probes = parse_number<int>(value, key);
    } else if (key == "probe_interval_ms") {
      cfg.probe_interval_ms = parse_number<int>(value, key);
    } else if (key == "tx_power_dbm") {
      cfg.tx_power_dbm = parse_number<int>(value, key);
    } else if (key == "shadow_sigma_db") {
      cfg.shadow_sigma_db = parse_number<double>(value, key);
    } else if (key == "shadow_ar_coeff") {
      cfg.shadow_ar_coeff = parse_number<double>(value, key);
    } else if (key == "device_noise_sigma_db") {
      cfg.device_noise_sigma_db = parse_number<double>(value, key);
    } else if (key == "eve_noise_sigma_db") {
      cfg.eve_noise_sigma_db = parse_number<double>(value, key);
    } else if (key == "halfduplex_lag_ms") {
      cfg.halfduplex_lag_ms = parse_number<int>(value, key);
    } else if (key == "eve_correlation") {
      cfg.eve_correlation = parse_number<double>(value, key);
    } else if (key == "channel_plan") {
      cfg.channel_plan.clear();
      std::istringstream list(value);
      std::string item;
      while (std::getline(list, item, ',')) {
        cfg.channel_plan.push_back(parse_number<std::uint64_t>(trim(item), key));
      }
      if (cfg.channel_plan.empty()) throw ConfigError("channel_plan must not be empty");
    } else if (key == "hopping") {
      cfg.hopping = parse_bool(value, key);
    } else if (key == "packet_loss_prob") {
      cfg.packet_loss_prob = parse_number<double>(value, key);
    } else if (key == "seed") {
      cfg.seed = parse_number<std::uint64_t>(value, key);
    } else if (key == "path_exponent") {
      cfg.path_exponent = parse_number<double>(value, key);
    } else if (key == "pathloss_ref_db") {
      cfg.pathloss_ref_db = parse_number<double>(value, key);
    } else if (key == "dist_min_m") {
      cfg.dist_min_m = parse_number<double>(value, key);
    } else if (key == "dist_max_m") {
      cfg.dist_max_m = parse_number<double>(value, key);
    } else if (key == "dist_start_m") {
      cfg.dist_start_m = parse_number<double>(value, key);
    } else if (key == "walk_speed_mps") {
      cfg.walk_speed_mps = parse_number<double>(value, key);
    } else if (key == "walk_ar_coeff") {
      cfg.walk_ar_coeff = parse_number<double>(value, key);
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

SimConfig SimConfig::parse(const std::string& text) {
  std::istringstream in(text);
  return parse(in);
}

namespace {

// shortest representation that parses back to the same double
std::string format_double(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

}  // namespace

std::string SimConfig::to_text() const {
  std::ostringstream out;
  out << "path_profile = " << to_string(path_profile) << '\n';
  out << "n_probes = " << n_probes << '\n';
  out << "probe_interval_ms = " << probe_interval_ms << '\n';
  out << "tx_power_dbm = " << tx_power_dbm << '\n';
  out << "shadow_sigma_db = " << format_double(shadow_sigma_db) << '\n';
  out << "shadow_ar_coeff = " << format_double(shadow_ar_coeff) << '\n';
  out << "device_noise_sigma_db = " << format_double(device_noise_sigma_db) << '\n';
  out << "eve_noise_sigma_db = " << format_double(eve_noise_sigma_db) << '\n';
  out << "halfduplex_lag_ms = " << halfduplex_lag_ms << '\n';
  out << "eve_correlation = " << format_double(eve_correlation) << '\n';
  out << "channel_plan = ";
  for (std::size_t i = 0; i < channel_plan.size(); ++i) {
    if (i) out << ',';
    out << channel_plan[i];
  }
  out << '\n';
  out << "hopping = " << (hopping ? "true" : "false") << '\n';
  out << "packet_loss_prob = " << format_double(packet_loss_prob) << '\n';
  out << "seed = " << seed << '\n';
  out << "path_exponent = " << format_double(path_exponent) << '\n';
  out << "pathloss_ref_db = " << format_double(pathloss_ref_db) << '\n';
  out << "dist_min_m = " << format_double(dist_min_m) << '\n';
  out << "dist_max_m = " << format_double(dist_max_m) << '\n';
  out << "dist_start_m = " << format_double(dist_start_m) << '\n';
  out << "walk_speed_mps = " << format_double(walk_speed_mps) << '\n';
  out << "walk_ar_coeff = " << format_double(walk_ar_coeff) << '\n';
  return out.str();
}

std::vector<std::uint64_t> hop_sequence(const SimConfig& cfg) {
  if (cfg.channel_plan.empty()) throw ConfigError("channel_plan must not be empty");
  std::vector<std::uint64_t> seq(static_cast<std::size_t>(cfg.n_probes));
  if (!cfg.hopping) {
    std::fill(seq.begin(), seq.end(), cfg.channel_plan[0]);
    return seq;
  }
  Rng rng(cfg.seed, "hop");
  for (auto& f : seq) f = cfg.channel_plan[rng.uniform_int(cfg.channel_plan.size())];
  return seq;
}

namespace {

// Common large-scale signal (pathloss trend + shadowing) sampled at the
// uplink instant and again one half-duplex lag later.
struct LargeScale {
  std::vector<double> at_uplink;
  std::vector<double> at_ack;
};

LargeScale generate_large_scale(const SimConfig& cfg, std::string_view shadow_stream,
                                std::string_view walk_stream) {
  Rng shadow_rng(cfg.seed, shadow_stream);
  Rng walk_rng(cfg.seed, walk_stream);

  const double interval_s = cfg.probe_interval_ms / 1000.0;
  const double lag_frac = static_cast<double>(cfg.halfduplex_lag_ms) /
                          static_cast<double>(cfg.probe_interval_ms);
  // AR(1) correlation split across the lag and the remainder of the interval
  const double c_lag = std::pow(cfg.shadow_ar_coeff, lag_frac);
  const double c_rest = std::pow(cfg.shadow_ar_coeff, std::max(1.0 - lag_frac, 0.0));
  const double sig = cfg.shadow_sigma_db;

  LargeScale out;
  out.at_uplink.resize(static_cast<std::size_t>(cfg.n_probes));
  out.at_ack.resize(static_cast<std::size_t>(cfg.n_probes));

  double dist = cfg.dist_start_m;
  double velocity = 0.0;
  double s_up = sig * shadow_rng.normal();
  for (int i = 0; i < cfg.n_probes; ++i) {
    if (i > 0) {
      // reflected random walk in distance
      velocity = cfg.walk_ar_coeff * velocity +
                 cfg.walk_speed_mps * std::sqrt(1.0 - cfg.walk_ar_coeff * cfg.walk_ar_coeff) *
                     walk_rng.normal();
      dist += velocity * interval_s;
      if (dist < cfg.dist_min_m) {
        dist = std::min(2.0 * cfg.dist_min_m - dist, cfg.dist_max_m);
        velocity = -velocity;
      } else if (dist > cfg.dist_max_m) {
        dist = std::max(2.0 * cfg.dist_max_m - dist, cfg.dist_min_m);
        velocity = -velocity;
      }
    }
    const double pathloss =
        cfg.pathloss_ref_db + 10.0 * cfg.path_exponent * std::log10(std::max(dist, 1.0));
    const double trend = static_cast<double>(cfg.tx_power_dbm) - pathloss;

    const double s_ack = c_lag * s_up + sig * std::sqrt(1.0 - c_lag * c_lag) * shadow_rng.normal();
    out.at_uplink[static_cast<std::size_t>(i)] = trend + s_up;
    out.at_ack[static_cast<std::size_t>(i)] = trend + s_ack;

    s_up = c_rest * s_ack + sig * std::sqrt(1.0 - c_rest * c_rest) * shadow_rng.normal();
  }
  return out;
}

}  // namespace

SimOutput simulate_probing(const SimConfig& cfg) {
  cfg.validate();

  const auto n = static_cast<std::size_t>(cfg.n_probes);
  const auto legit = generate_large_scale(cfg, "shadow", "walk");
  const auto replica = generate_large_scale(cfg, "eve-shadow", "eve-walk");

  // Eve's large-scale process: mix the legitimate process with an
  // independent replica. The replica is orthogonalized against the
  // legitimate signal empirically so that the achieved correlation tracks
  // eve_correlation instead of drifting with the replica's random overlap.
  std::vector<double> eve_large(n);
  {
    double mean_u = 0.0, mean_v = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      mean_u += legit.at_uplink[i];
      mean_v += replica.at_uplink[i];
    }
    mean_u /= static_cast<double>(n);
    mean_v /= static_cast<double>(n);

    std::vector<double> u(n), v(n);
    double uu = 0.0, uv = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      u[i] = legit.at_uplink[i] - mean_u;
      v[i] = replica.at_uplink[i] - mean_v;
      uu += u[i] * u[i];
      uv += u[i] * v[i];
    }
    double vv_orth = 0.0;
    const double proj = uu > 0.0 ? uv / uu : 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      v[i] -= proj * u[i];
      vv_orth += v[i] * v[i];
    }
    const double scale = (vv_orth > 0.0 && uu > 0.0) ? std::sqrt(uu / vv_orth) : 1.0;
    const double w = cfg.eve_correlation;
    const double w_orth = std::sqrt(std::max(0.0, 1.0 - w * w));
    for (std::size_t i = 0; i < n; ++i) {
      eve_large[i] = mean_u + w * u[i] + w_orth * scale * v[i];
    }
  }

  Rng noise_a(cfg.seed, "noise-a");
  Rng noise_b(cfg.seed, "noise-b");
  Rng noise_e(cfg.seed, "noise-e");
  Rng loss_rng(cfg.seed, "loss");
  const auto freqs = hop_sequence(cfg);

  SimOutput out;
  out.trace_a.device_id = "alice";
  out.trace_b.device_id = "bob";
  out.trace_e.device_id = "eve";
  out.events.reserve(2 * n);

  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t seq = i + 1;
    const std::uint64_t t_up = static_cast<std::uint64_t>(i) *
                               static_cast<std::uint64_t>(cfg.probe_interval_ms);
    const std::uint64_t freq = freqs[i];

    const int x_b = clamp_rssi(legit.at_uplink[i] + cfg.device_noise_sigma_db * noise_b.normal());
    const int x_a = clamp_rssi(legit.at_ack[i] + cfg.device_noise_sigma_db * noise_a.normal());
    const int x_e = clamp_rssi(eve_large[i] + cfg.eve_noise_sigma_db * noise_e.normal());

    // draw both loss decisions every round to keep the stream aligned
    const bool up_delivered = !loss_rng.bernoulli(cfg.packet_loss_prob);
    const bool ack_lost_draw = loss_rng.bernoulli(cfg.packet_loss_prob);
    const bool ack_delivered = up_delivered && !ack_lost_draw;

    out.events.push_back({seq, LinkEvent::Direction::uplink, freq,
                          up_delivered ? x_b : 0, up_delivered});
    if (up_delivered) {
      out.trace_b.records.push_back({seq, t_up, x_b, freq});
      out.trace_e.records.push_back({seq, t_up, x_e, freq});
      // Class A: the responder only transmits after a received uplink
      out.events.push_back({seq, LinkEvent::Direction::downlink, freq,
                            ack_delivered ? x_a : 0, ack_delivered});
      if (ack_delivered) {
        out.trace_a.records.push_back(
            {seq, t_up + static_cast<std::uint64_t>(cfg.halfduplex_lag_ms), x_a, freq});
      }
    }
  }
  return out;
}

AlignedProbes pair_uplink_ack(std::span<const LinkEvent> events) {
  struct Half {
    bool have_up = false, have_down = false;
    std::uint64_t up_freq = 0, down_freq = 0;
    int up_rssi = 0, down_rssi = 0;
  };
  std::map<std::uint64_t, Half> rounds;
  for (const auto& e : events) {
    if (!e.delivered) continue;
    auto& half = rounds[e.seq_index];
    if (e.direction == LinkEvent::Direction::uplink) {
      half.have_up = true;
      half.up_freq = e.freq_hz;
      half.up_rssi = e.rssi_dbm;
    } else {
      half.have_down = true;
      half.down_freq = e.freq_hz;
      half.down_rssi = e.rssi_dbm;
    }
  }

  AlignedProbes out;
  for (const auto& [seq, half] : rounds) {
    if (!half.have_up || !half.have_down) continue;
    if (half.up_freq != half.down_freq) {
      throw ProtocolViolation("ACK for seq " + std::to_string(seq) + " arrived on " +
                              std::to_string(half.down_freq) + " Hz but the uplink used " +
                              std::to_string(half.up_freq) + " Hz");
    }
    out.indices.push_back(seq);
    out.x_a.push_back(half.down_rssi);
    out.x_b.push_back(half.up_rssi);
  }
  return out;
}

RssiTrace apply_packet_loss(const RssiTrace& trace, double p, std::uint64_t seed) {
  if (p < 0.0 || p >= 1.0) throw std::invalid_argument("loss probability must lie in [0, 1)");
  Rng rng(seed, "packet-loss");
  RssiTrace out;
  out.device_id = trace.device_id;
  for (const auto& rec : trace.records) {
    if (!rng.bernoulli(p)) out.records.push_back(rec);
  }
  return out;
}

void write_events(std::ostream& out, std::span<const LinkEvent> events) {
  out << "seq,direction,freq_hz,rssi_dbm,delivered\n";
  for (const auto& e : events) {
    out << e.seq_index << ','
        << (e.direction == LinkEvent::Direction::uplink ? "uplink" : "downlink") << ','
        << e.freq_hz << ',' << e.rssi_dbm << ',' << (e.delivered ? 1 : 0) << '\n';
  }
}

std::vector<LinkEvent> parse_events(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("line 1: missing events header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "seq,direction,freq_hz,rssi_dbm,delivered") {
    throw ParseError("line 1: bad events header");
  }
  std::vector<LinkEvent> events;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string seq_s, dir_s, freq_s, rssi_s, del_s;
    if (!std::getline(row, seq_s, ',') || !std::getline(row, dir_s, ',') ||
        !std::getline(row, freq_s, ',') || !std::getline(row, rssi_s, ',') ||
        !std::getline(row, del_s)) {
      throw ParseError("line " + std::to_string(line_no) + ": expected 5 fields");
    }
    LinkEvent e;
    try {
      e.seq_index = std::stoull(seq_s);
      e.freq_hz = std::stoull(freq_s);
      e.rssi_dbm = std::stoi(rssi_s);
      e.delivered = std::stoi(del_s) != 0;
    } catch (const std::exception&) {
      throw ParseError("line " + std::to_string(line_no) + ": invalid integer field");
    }
    if (dir_s == "uplink") {
      e.direction = LinkEvent::Direction::uplink;
    } else if (dir_s == "downlink") {
      e.direction = LinkEvent::Direction::downlink;
    } else {
      throw ParseError("line " + std::to_string(line_no) + ": bad direction '" + dir_s + "'");
    }
    events.push_back(e);
  }
  return events;
}

}  // namespace lorakey
