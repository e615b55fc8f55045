#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "lorakey/bch.hpp"
#include "lorakey/bits.hpp"
#include "lorakey/rng.hpp"

namespace lorakey {

// Public helper data for code-offset reconciliation: per block, the XOR of
// the key block with a random codeword. Safe to transmit in the clear; it
// pins the key down only to a coset of the code.
struct SketchMessage {
  std::string code_id;
  std::size_t block_count = 0;
  std::size_t pad_len = 0;              // zero-pad bits in the final block
  std::vector<BitSeq> s_blocks;         // each exactly n bits

  std::string to_json() const;
  static SketchMessage from_json(const std::string& text);
};

enum class KeyStage { quantized, reconciled, amplified };

struct KeyMaterial {
  BitSeq bits;
  KeyStage stage = KeyStage::quantized;
};

// Splits k_a into ceil(|k_a|/n) blocks (last block zero-padded) and draws one
// uniformly random codeword per block. The codewords never leave this
// function; only the XOR masks are returned.
SketchMessage make_sketch(const BitSeq& k_a, const BchCode& code, Rng& rng);

struct ReconcileResult {
  bool ok = false;
  KeyMaterial key;                          // reconciled key when ok
  std::vector<std::size_t> failed_blocks;   // indices that did not decode
};

// Recovers Alice's key from Bob's key and the sketch. Succeeds iff every
// block decodes; when the per-block disagreement is at most t the output
// equals k_a exactly.
ReconcileResult recover_key(const BitSeq& k_b, const SketchMessage& sketch, const BchCode& code);

// Hash-truncation privacy amplification: the first out_len_bits of
// SHA-256(salt || canonical packing of key). out_len_bits must not exceed
// the digest length, and the input key must be at least out_len_bits long.
KeyMaterial amplify(const BitSeq& key, std::size_t out_len_bits,
                    std::span<const std::uint8_t> salt);

// Domain-separated hash of a key for equality checks over a public channel;
// reveals nothing useful about the key itself.
std::string key_confirmation_hex(const BitSeq& key);

// Entropy left after publishing the sketch: |key| minus (n-k) bits per
// block. Negative values mean the sketch already gave everything away.
std::ptrdiff_t effective_entropy_bits(std::size_t key_len, const BchCode& code);

std::vector<std::uint8_t> sha256(std::span<const std::uint8_t> data);

}  // namespace lorakey
