#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lorakey/bits.hpp"
#include "lorakey/gf.hpp"

namespace lorakey {

// Binary primitive BCH code of length n = 2^m - 1 correcting t errors.
// The generator polynomial is the lcm of the minimal polynomials of
// alpha^1..alpha^2t; k = n - deg(g) follows from it. Immutable after
// construction and safe to share across threads.
class BchCode {
 public:
  BchCode(int m, int t);
  BchCode(GfField field, int t);

  // Preset names: bch15_t3, bch31_t3, bch63_t5.
  static BchCode from_preset(std::string_view name);
  static const std::vector<std::string>& preset_names();

  const GfField& field() const { return field_; }
  int n() const { return n_; }
  int k() const { return k_; }
  int t() const { return t_; }
  const std::string& id() const { return id_; }

  // generator polynomial coefficients, index = power of x, degree n-k
  const std::vector<std::uint8_t>& generator() const { return generator_; }

 private:
  GfField field_;
  int n_;
  int k_;
  int t_;
  std::string id_;
  std::vector<std::uint8_t> generator_;
};

// Systematic encoding: the k message bits followed by n-k parity bits, the
// remainder of x^(n-k) * msg(x) modulo the generator. Bit i of a codeword is
// the coefficient of x^(n-1-i).
BitSeq bch_encode(const BitSeq& msg, const BchCode& code);

struct BchDecodeResult {
  BitSeq codeword;
  std::vector<std::size_t> error_positions;  // flipped bit indices
};

// Bounded-distance decoding: syndromes, Berlekamp-Massey, Chien search.
// Returns the nearest codeword when the input lies within Hamming distance t
// of one, nullopt otherwise. Inputs farther than t may still decode to some
// other codeword; that is inherent to the construction.
std::optional<BchDecodeResult> bch_decode(const BitSeq& word, const BchCode& code);

// Syndrome check only: true iff word is a codeword.
bool bch_is_codeword(const BitSeq& word, const BchCode& code);

}  // namespace lorakey
