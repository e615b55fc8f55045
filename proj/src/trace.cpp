#include "lorakey/trace.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <utility>

#include "lorakey/errors.hpp"

namespace lorakey {

namespace {

constexpr const char* kHeader = "seq,timestamp_ms,rssi_dbm,freq_hz";

// Strips a trailing CR so CRLF input parses like LF.
void chomp(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

std::int64_t parse_int_field(std::string_view field, std::size_t line_no, const char* what) {
  std::int64_t value = 0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || field.empty()) {
    throw ParseError("line " + std::to_string(line_no) + ": invalid " + what + " field '" +
                     std::string(field) + "'");
  }
  return value;
}

}  // namespace

std::vector<int> RssiTrace::rssi_values() const {
  std::vector<int> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.rssi_dbm);
  return out;
}

RssiTrace parse_trace(std::istream& in, std::string device_id) {
  RssiTrace trace;
  trace.device_id = std::move(device_id);

  std::string line;
  if (!std::getline(in, line)) throw ParseError("line 1: missing header");
  chomp(line);
  if (line != kHeader) {
    throw ParseError("line 1: expected header '" + std::string(kHeader) + "', got '" + line + "'");
  }

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    chomp(line);
    if (line.empty()) continue;

    std::array<std::string_view, 4> fields;
    std::string_view rest = line;
    for (std::size_t f = 0; f < 4; ++f) {
      auto comma = rest.find(',');
      if (f < 3) {
        if (comma == std::string_view::npos) {
          throw ParseError("line " + std::to_string(line_no) + ": expected 4 fields");
        }
        fields[f] = rest.substr(0, comma);
        rest.remove_prefix(comma + 1);
      } else {
        if (comma != std::string_view::npos) {
          throw ParseError("line " + std::to_string(line_no) + ": expected 4 fields");
        }
        fields[f] = rest;
      }
    }

    ProbeRecord rec;
    std::int64_t seq = parse_int_field(fields[0], line_no, "seq");
    std::int64_t ts = parse_int_field(fields[1], line_no, "timestamp_ms");
    std::int64_t rssi = parse_int_field(fields[2], line_no, "rssi_dbm");
    std::int64_t freq = parse_int_field(fields[3], line_no, "freq_hz");
    if (seq < 0) throw ParseError("line " + std::to_string(line_no) + ": seq must be non-negative");
    if (ts < 0) {
      throw ParseError("line " + std::to_string(line_no) + ": timestamp_ms must be non-negative");
    }
    if (freq <= 0) {
      throw ParseError("line " + std::to_string(line_no) + ": freq_hz must be positive");
    }
    if (rssi < kRssiFloorDbm || rssi > kRssiCeilDbm) {
      throw IntegrityError("line " + std::to_string(line_no) + ": rssi_dbm " +
                           std::to_string(rssi) + " outside [" + std::to_string(kRssiFloorDbm) +
                           ", " + std::to_string(kRssiCeilDbm) + "]");
    }
    rec.seq_index = static_cast<std::uint64_t>(seq);
    rec.timestamp_ms = static_cast<std::uint64_t>(ts);
    rec.rssi_dbm = static_cast<int>(rssi);
    rec.freq_hz = static_cast<std::uint64_t>(freq);
    trace.records.push_back(rec);
  }

  std::stable_sort(trace.records.begin(), trace.records.end(),
                   [](const ProbeRecord& a, const ProbeRecord& b) { return a.seq_index < b.seq_index; });
  for (std::size_t i = 1; i < trace.records.size(); ++i) {
    if (trace.records[i].seq_index == trace.records[i - 1].seq_index) {
      throw IntegrityError("duplicate seq_index " + std::to_string(trace.records[i].seq_index));
    }
  }
  return trace;
}

RssiTrace parse_trace(const std::string& text, std::string device_id) {
  std::istringstream in(text);
  return parse_trace(in, std::move(device_id));
}

RssiTrace load_trace(const std::filesystem::path& path, std::string device_id) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open trace file " + path.string());
  if (device_id.empty()) device_id = path.stem().string();
  return parse_trace(in, std::move(device_id));
}

void write_trace(std::ostream& out, const RssiTrace& trace) {
  out << kHeader << '\n';
  for (const auto& r : trace.records) {
    out << r.seq_index << ',' << r.timestamp_ms << ',' << r.rssi_dbm << ',' << r.freq_hz << '\n';
  }
}

std::string trace_to_csv(const RssiTrace& trace) {
  std::ostringstream out;
  write_trace(out, trace);
  return out.str();
}

void save_trace(const std::filesystem::path& path, const RssiTrace& trace) {
  std::ofstream out(path, std::ios::binary);  // binary keeps LF endings everywhere
  if (!out) throw Error("cannot write trace file " + path.string());
  write_trace(out, trace);
}

AlignedProbes align_traces(const RssiTrace& a, const RssiTrace& b) {
  AlignedProbes out;
  std::size_t i = 0, j = 0;
  while (i < a.records.size() && j < b.records.size()) {
    const auto& ra = a.records[i];
    const auto& rb = b.records[j];
    if (ra.seq_index == rb.seq_index) {
      out.indices.push_back(ra.seq_index);
      out.x_a.push_back(ra.rssi_dbm);
      out.x_b.push_back(rb.rssi_dbm);
      ++i;
      ++j;
    } else if (ra.seq_index < rb.seq_index) {
      ++i;
    } else {
      ++j;
    }
  }
  return out;
}

}  // namespace lorakey
