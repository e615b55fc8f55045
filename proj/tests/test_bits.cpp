#include <doctest.h>

#include "lorakey/bits.hpp"
#include "lorakey/rng.hpp"

using namespace lorakey;

TEST_CASE("bit string round trip") {
  const BitSeq bits = bits_from_string("1011010101");
  CHECK(bits.size() == 10);
  CHECK(bits_to_string(bits) == "1011010101");
  CHECK_THROWS_AS(bits_from_string("10x1"), std::invalid_argument);
}

TEST_CASE("xor and hamming") {
  const BitSeq a = bits_from_string("1100");
  const BitSeq b = bits_from_string("1010");
  CHECK(bits_to_string(xor_bits(a, b)) == "0110");
  CHECK(hamming_distance(a, b) == 2);
  CHECK(hamming_weight(a) == 2);
  CHECK_THROWS_AS(xor_bits(a, bits_from_string("11")), std::invalid_argument);
}

TEST_CASE("hex round trip keeps length and pads with zeros") {
  Rng rng(99);
  for (std::size_t len : {1u, 7u, 8u, 15u, 16u, 127u}) {
    BitSeq bits(len);
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng.bit());
    const auto hex = bits_to_hex(bits);
    CHECK(hex.size() == 2 * ((len + 7) / 8));
    CHECK(bits_from_hex(hex, len) == bits);
  }
  CHECK_THROWS_AS(bits_from_hex("ff", 7), std::invalid_argument);  // nonzero pad
  CHECK_THROWS_AS(bits_from_hex("0", 8), std::invalid_argument);   // too short
}

TEST_CASE("pack_bits carries an explicit length prefix") {
  const auto packed_a = pack_bits(bits_from_string("10"));
  const auto packed_b = pack_bits(bits_from_string("100"));
  CHECK(packed_a != packed_b);  // same byte payload, different declared length
  CHECK(packed_a.size() == 9);
  CHECK(packed_a[7] == 2);      // length lives in the prefix
  CHECK(packed_a[8] == 0x80);   // MSB-first packing
}
