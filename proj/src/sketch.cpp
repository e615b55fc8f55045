#include "lorakey/sketch.hpp"

#include <openssl/evp.h>

#include <nlohmann/json.hpp>
#include <stdexcept>

#include "lorakey/errors.hpp"

namespace lorakey {

std::vector<std::uint8_t> sha256(std::span<const std::uint8_t> data) {
  std::vector<std::uint8_t> digest(EVP_MAX_MD_SIZE);
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 computation failed");
  }
  digest.resize(len);
  return digest;
}

std::string SketchMessage::to_json() const {
  nlohmann::ordered_json j;
  j["code_id"] = code_id;
  j["block_count"] = block_count;
  j["pad_len"] = pad_len;
  auto& blocks = j["s_blocks"] = nlohmann::json::array();
  for (const auto& b : s_blocks) blocks.push_back(bits_to_hex(b));
  return j.dump(2) + "\n";
}

SketchMessage SketchMessage::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("sketch JSON: ") + e.what());
  }
  SketchMessage msg;
  try {
    msg.code_id = j.at("code_id").get<std::string>();
    msg.block_count = j.at("block_count").get<std::size_t>();
    msg.pad_len = j.at("pad_len").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("sketch JSON: ") + e.what());
  }
  const auto code = BchCode::from_preset(msg.code_id);
  const auto n = static_cast<std::size_t>(code.n());
  if (!j.contains("s_blocks") || !j["s_blocks"].is_array() ||
      j["s_blocks"].size() != msg.block_count) {
    throw IntegrityError("sketch JSON: s_blocks does not match block_count");
  }
  if (msg.pad_len >= n) throw IntegrityError("sketch JSON: pad_len must be < n");
  for (const auto& entry : j["s_blocks"]) {
    msg.s_blocks.push_back(bits_from_hex(entry.get<std::string>(), n));
  }
  return msg;
}

SketchMessage make_sketch(const BitSeq& k_a, const BchCode& code, Rng& rng) {
  if (k_a.empty()) throw std::invalid_argument("cannot sketch an empty key");
  const auto n = static_cast<std::size_t>(code.n());
  const auto k = static_cast<std::size_t>(code.k());

  SketchMessage msg;
  msg.code_id = code.id();
  msg.block_count = (k_a.size() + n - 1) / n;
  msg.pad_len = msg.block_count * n - k_a.size();

  for (std::size_t b = 0; b < msg.block_count; ++b) {
    BitSeq block(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t pos = b * n + i;
      if (pos < k_a.size()) block[i] = k_a[pos];
    }
    BitSeq message(k);
    for (auto& bit : message) bit = static_cast<std::uint8_t>(rng.bit());
    msg.s_blocks.push_back(xor_bits(block, bch_encode(message, code)));
  }
  return msg;
}

ReconcileResult recover_key(const BitSeq& k_b, const SketchMessage& sketch, const BchCode& code) {
  const auto n = static_cast<std::size_t>(code.n());
  if (sketch.code_id != code.id()) {
    throw ConfigError("sketch was made with code '" + sketch.code_id + "', not '" + code.id() +
                      "'");
  }
  if (sketch.s_blocks.size() != sketch.block_count || sketch.pad_len >= n) {
    throw IntegrityError("sketch block structure is inconsistent");
  }
  if (k_b.size() != sketch.block_count * n - sketch.pad_len) {
    throw std::invalid_argument("key length does not match the sketch layout");
  }

  ReconcileResult res;
  BitSeq recovered;
  recovered.reserve(k_b.size());
  for (std::size_t b = 0; b < sketch.block_count; ++b) {
    BitSeq block(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t pos = b * n + i;
      if (pos < k_b.size()) block[i] = k_b[pos];
    }
    const BitSeq c_b = xor_bits(block, sketch.s_blocks[b]);
    auto decoded = bch_decode(c_b, code);
    if (!decoded) {
      res.failed_blocks.push_back(b);
      continue;
    }
    const BitSeq recovered_block = xor_bits(decoded->codeword, sketch.s_blocks[b]);
    const std::size_t take = (b + 1 == sketch.block_count) ? n - sketch.pad_len : n;
    recovered.insert(recovered.end(), recovered_block.begin(), recovered_block.begin() + take);
  }

  if (!res.failed_blocks.empty()) return res;
  res.ok = true;
  res.key = KeyMaterial{std::move(recovered), KeyStage::reconciled};
  return res;
}

KeyMaterial amplify(const BitSeq& key, std::size_t out_len_bits,
                    std::span<const std::uint8_t> salt) {
  constexpr std::size_t kDigestBits = 256;
  if (out_len_bits == 0 || out_len_bits > kDigestBits) {
    throw std::invalid_argument("amplified key length must be in [1, 256] bits");
  }
  if (key.size() < out_len_bits) {
    throw EntropyBudgetError("input key shorter than the requested output length");
  }
  std::vector<std::uint8_t> material(salt.begin(), salt.end());
  const auto packed = pack_bits(key);
  material.insert(material.end(), packed.begin(), packed.end());
  const auto digest = sha256(material);

  BitSeq out(out_len_bits);
  for (std::size_t i = 0; i < out_len_bits; ++i) {
    out[i] = (digest[i / 8] >> (7 - i % 8)) & 1;
  }
  return KeyMaterial{std::move(out), KeyStage::amplified};
}

std::string key_confirmation_hex(const BitSeq& key) {
  static constexpr char tag[] = "key-confirm-v1";
  std::vector<std::uint8_t> material(tag, tag + sizeof(tag) - 1);
  const auto packed = pack_bits(key);
  material.insert(material.end(), packed.begin(), packed.end());
  const auto digest = sha256(material);
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * digest.size());
  for (auto byte : digest) {
    out.push_back(hex[byte >> 4]);
    out.push_back(hex[byte & 0xf]);
  }
  return out;
}

std::ptrdiff_t effective_entropy_bits(std::size_t key_len, const BchCode& code) {
  const auto n = static_cast<std::size_t>(code.n());
  const std::size_t blocks = (key_len + n - 1) / n;
  return static_cast<std::ptrdiff_t>(key_len) -
         static_cast<std::ptrdiff_t>(blocks * (n - static_cast<std::size_t>(code.k())));
}

}  // namespace lorakey
