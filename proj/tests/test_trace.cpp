#include <doctest.h>

#include <sstream>

#include "lorakey/errors.hpp"
#include "lorakey/rng.hpp"
#include "lorakey/trace.hpp"

using namespace lorakey;

namespace {

const char* kTwoRows =
    "seq,timestamp_ms,rssi_dbm,freq_hz\n"
    "1,10,-60,868100000\n"
    "2,120,-61,868100000\n";

}  // namespace

TEST_CASE("parse_trace reads the documented schema") {
  const auto trace = parse_trace(std::string(kTwoRows), "a");
  REQUIRE(trace.size() == 2);
  CHECK(trace.records[0].seq_index == 1);
  CHECK(trace.records[0].timestamp_ms == 10);
  CHECK(trace.records[0].rssi_dbm == -60);
  CHECK(trace.records[0].freq_hz == 868100000);
  CHECK(trace.records[1].rssi_dbm == -61);
}

TEST_CASE("header-only file gives an empty trace") {
  CHECK(parse_trace(std::string("seq,timestamp_ms,rssi_dbm,freq_hz\n")).size() == 0);
}

TEST_CASE("CRLF input is accepted") {
  const auto trace =
      parse_trace(std::string("seq,timestamp_ms,rssi_dbm,freq_hz\r\n1,10,-60,868100000\r\n"));
  REQUIRE(trace.size() == 1);
  CHECK(trace.records[0].rssi_dbm == -60);
}

TEST_CASE("duplicate seq_index is an integrity error") {
  const std::string text =
      "seq,timestamp_ms,rssi_dbm,freq_hz\n5,10,-60,868100000\n5,20,-61,868100000\n";
  CHECK_THROWS_AS(parse_trace(text), IntegrityError);
}

TEST_CASE("rssi outside the receive range is rejected") {
  CHECK_THROWS_AS(parse_trace(std::string("seq,timestamp_ms,rssi_dbm,freq_hz\n1,0,-149,868100000\n")),
                  IntegrityError);
  CHECK_THROWS_AS(parse_trace(std::string("seq,timestamp_ms,rssi_dbm,freq_hz\n1,0,1,868100000\n")),
                  IntegrityError);
}

TEST_CASE("malformed rows name the line") {
  try {
    parse_trace(std::string("seq,timestamp_ms,rssi_dbm,freq_hz\n1,10,-60,868100000\nbroken\n"));
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("rows may arrive unordered, output is sorted") {
  const std::string text =
      "seq,timestamp_ms,rssi_dbm,freq_hz\n3,30,-62,868100000\n1,10,-60,868100000\n";
  const auto trace = parse_trace(text);
  REQUIRE(trace.size() == 2);
  CHECK(trace.records[0].seq_index == 1);
  CHECK(trace.records[1].seq_index == 3);
}

TEST_CASE("serialize then parse is the identity") {
  Rng rng(4242);
  RssiTrace trace;
  trace.device_id = "prop";
  std::uint64_t seq = 0;
  for (int i = 0; i < 200; ++i) {
    seq += 1 + rng.uniform_int(3);
    trace.records.push_back({seq, static_cast<std::uint64_t>(i) * 100,
                             static_cast<int>(rng.uniform_int(149)) - 148,
                             868100000 + rng.uniform_int(8) * 200000});
  }
  const auto round = parse_trace(trace_to_csv(trace), "prop");
  CHECK(round.records == trace.records);
}

TEST_CASE("align_traces intersects by seq index") {
  auto mk = [](std::initializer_list<std::uint64_t> seqs, int rssi) {
    RssiTrace t;
    for (auto s : seqs) t.records.push_back({s, s * 10, rssi, 868100000});
    return t;
  };
  SUBCASE("identical index sets") {
    const auto al = align_traces(mk({1, 2, 3}, -60), mk({1, 2, 3}, -61));
    CHECK(al.size() == 3);
  }
  SUBCASE("partial overlap") {
    const auto al = align_traces(mk({1, 2, 3}, -60), mk({2, 3, 4}, -61));
    REQUIRE(al.size() == 2);
    CHECK(al.indices == std::vector<std::uint64_t>{2, 3});
  }
  SUBCASE("empty trace gives empty result") {
    CHECK(align_traces(mk({}, 0), mk({1, 2}, -61)).size() == 0);
  }
  SUBCASE("index selection is symmetric") {
    const auto ab = align_traces(mk({1, 3, 5, 7}, -60), mk({3, 4, 5}, -61));
    const auto ba = align_traces(mk({3, 4, 5}, -61), mk({1, 3, 5, 7}, -60));
    CHECK(ab.indices == ba.indices);
    CHECK(ab.x_a == ba.x_b);  // sides swap with the argument order
  }
}
