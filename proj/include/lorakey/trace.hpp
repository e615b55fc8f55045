#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace lorakey {

inline constexpr int kRssiFloorDbm = -148;  // receiver sensitivity floor
inline constexpr int kRssiCeilDbm = 0;

// One received probe packet and the RSSI it was measured at.
struct ProbeRecord {
  std::uint64_t seq_index = 0;
  std::uint64_t timestamp_ms = 0;
  int rssi_dbm = kRssiFloorDbm;
  std::uint64_t freq_hz = 0;

  friend bool operator==(const ProbeRecord&, const ProbeRecord&) = default;
};

// The RSSI observations of one device, sorted by sequence index with no
// duplicates.
struct RssiTrace {
  std::string device_id;
  std::vector<ProbeRecord> records;

  std::size_t size() const { return records.size(); }
  std::vector<int> rssi_values() const;
};

// Probe rounds observed by both sides, paired by sequence index.
struct AlignedProbes {
  std::vector<std::uint64_t> indices;
  std::vector<int> x_a;
  std::vector<int> x_b;

  std::size_t size() const { return indices.size(); }
};

// CSV schema: header `seq,timestamp_ms,rssi_dbm,freq_hz`, one record per
// line, UTF-8, LF or CRLF. Rows may arrive unordered; the result is sorted.
// Throws ParseError for malformed rows, IntegrityError for duplicate
// sequence indices or RSSI outside [-148, 0].
RssiTrace parse_trace(std::istream& in, std::string device_id = "");
RssiTrace parse_trace(const std::string& text, std::string device_id = "");
RssiTrace load_trace(const std::filesystem::path& path, std::string device_id = "");

// Writes the CSV form with LF line endings.
void write_trace(std::ostream& out, const RssiTrace& trace);
std::string trace_to_csv(const RssiTrace& trace);
void save_trace(const std::filesystem::path& path, const RssiTrace& trace);

// Pairs the probe rounds present in both traces, in increasing seq order.
// Packet loss is modeled by exclusion; disjoint traces give an empty result.
AlignedProbes align_traces(const RssiTrace& a, const RssiTrace& b);

}  // namespace lorakey
