#include "lorakey/bits.hpp"

#include <stdexcept>

namespace lorakey {

BitSeq bits_from_string(const std::string& s) {
  BitSeq bits;
  bits.reserve(s.size());
  for (char c : s) {
    if (c == '0') {
      bits.push_back(0);
    } else if (c == '1') {
      bits.push_back(1);
    } else {
      throw std::invalid_argument("bit string may contain only '0' and '1'");
    }
  }
  return bits;
}

std::string bits_to_string(const BitSeq& bits) {
  std::string s;
  s.reserve(bits.size());
  for (auto b : bits) s.push_back(b ? '1' : '0');
  return s;
}

BitSeq xor_bits(const BitSeq& a, const BitSeq& b) {
  if (a.size() != b.size()) throw std::invalid_argument("xor_bits: length mismatch");
  BitSeq out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] ^ b[i];
  return out;
}

std::size_t hamming_distance(const BitSeq& a, const BitSeq& b) {
  if (a.size() != b.size()) throw std::invalid_argument("hamming_distance: length mismatch");
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
  return d;
}

std::size_t hamming_weight(const BitSeq& bits) {
  std::size_t w = 0;
  for (auto b : bits) w += b != 0;
  return w;
}

std::vector<std::uint8_t> pack_bits(const BitSeq& bits) {
  std::vector<std::uint8_t> out;
  out.reserve(8 + (bits.size() + 7) / 8);
  std::uint64_t n = bits.size();
  for (int shift = 56; shift >= 0; shift -= 8) {
    out.push_back(static_cast<std::uint8_t>(n >> shift));
  }
  std::uint8_t cur = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    cur = static_cast<std::uint8_t>((cur << 1) | (bits[i] & 1));
    if (i % 8 == 7) {
      out.push_back(cur);
      cur = 0;
    }
  }
  if (bits.size() % 8 != 0) {
    cur = static_cast<std::uint8_t>(cur << (8 - bits.size() % 8));
    out.push_back(cur);
  }
  return out;
}

namespace {

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::string bits_to_hex(const BitSeq& bits) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  const std::size_t n_bytes = (bits.size() + 7) / 8;
  out.reserve(2 * n_bytes);
  for (std::size_t byte = 0; byte < n_bytes; ++byte) {
    unsigned v = 0;
    for (std::size_t j = 0; j < 8; ++j) {
      std::size_t idx = byte * 8 + j;
      v = (v << 1) | (idx < bits.size() ? (bits[idx] & 1) : 0);
    }
    out.push_back(digits[v >> 4]);
    out.push_back(digits[v & 0xf]);
  }
  return out;
}

BitSeq bits_from_hex(const std::string& hex, std::size_t n_bits) {
  if (hex.size() * 4 < n_bits) throw std::invalid_argument("hex string too short");
  BitSeq bits(n_bits);
  for (std::size_t i = 0; i < n_bits; ++i) {
    int d = hex_digit(hex[i / 4]);
    if (d < 0) throw std::invalid_argument("invalid hex digit");
    bits[i] = static_cast<std::uint8_t>((d >> (3 - i % 4)) & 1);
  }
  // trailing pad bits must be zero
  for (std::size_t i = n_bits; i < hex.size() * 4; ++i) {
    int d = hex_digit(hex[i / 4]);
    if (d < 0) throw std::invalid_argument("invalid hex digit");
    if ((d >> (3 - i % 4)) & 1) throw std::invalid_argument("nonzero padding in hex bit string");
  }
  return bits;
}

}  // namespace lorakey
