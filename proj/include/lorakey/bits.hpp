#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace lorakey {

// Bit sequences are kept unpacked, one bit per element, values 0 or 1.
using BitSeq = std::vector<std::uint8_t>;

BitSeq bits_from_string(const std::string& s);
std::string bits_to_string(const BitSeq& bits);

BitSeq xor_bits(const BitSeq& a, const BitSeq& b);
std::size_t hamming_distance(const BitSeq& a, const BitSeq& b);
std::size_t hamming_weight(const BitSeq& bits);

// MSB-first packing preceded by an 8-byte big-endian bit count. This is the
// canonical form used wherever a bit sequence is hashed.
std::vector<std::uint8_t> pack_bits(const BitSeq& bits);

// Plain MSB-first hex, zero-padded to whole bytes; the bit count must be
// carried out of band.
std::string bits_to_hex(const BitSeq& bits);
BitSeq bits_from_hex(const std::string& hex, std::size_t n_bits);

}  // namespace lorakey
