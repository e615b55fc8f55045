#include "lorakey/bch.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "lorakey/errors.hpp"

namespace lorakey {

namespace {

// Minimal polynomial of alpha^c: product of (x - alpha^j) over the
// cyclotomic coset of c. Coefficients land in GF(2).
std::vector<std::uint8_t> minimal_polynomial(const GfField& f, int c, std::vector<bool>& seen) {
  std::vector<int> coset;
  int j = c;
  do {
    coset.push_back(j);
    seen[j] = true;
    j = (2 * j) % f.order();
  } while (j != c);

  // poly over GF(2^m), index = power of x
  std::vector<int> poly{1};
  for (int e : coset) {
    const int root = f.alpha_pow(e);
    std::vector<int> next(poly.size() + 1, 0);
    for (std::size_t d = 0; d < poly.size(); ++d) {
      next[d + 1] ^= poly[d];               // x * poly
      next[d] ^= f.mul(poly[d], root);      // root * poly
    }
    poly = std::move(next);
  }

  std::vector<std::uint8_t> out(poly.size());
  for (std::size_t d = 0; d < poly.size(); ++d) {
    if (poly[d] != 0 && poly[d] != 1) {
      throw std::logic_error("minimal polynomial has a coefficient outside GF(2)");
    }
    out[d] = static_cast<std::uint8_t>(poly[d]);
  }
  return out;
}

std::vector<std::uint8_t> poly_mul_gf2(const std::vector<std::uint8_t>& a,
                                       const std::vector<std::uint8_t>& b) {
  std::vector<std::uint8_t> out(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i]) continue;
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] ^= b[j];
  }
  return out;
}

// remainder of a(x) mod g(x) over GF(2); index = power of x, leading
// coefficient of g must be 1
std::vector<std::uint8_t> poly_mod_gf2(std::vector<std::uint8_t> a,
                                       const std::vector<std::uint8_t>& g) {
  const std::size_t dg = g.size() - 1;
  for (std::size_t d = a.size(); d-- > dg;) {
    if (a[d]) {
      for (std::size_t j = 0; j < g.size(); ++j) a[d - dg + j] ^= g[j];
    }
  }
  a.resize(dg);
  return a;
}

}  // namespace

BchCode::BchCode(int m, int t) : BchCode(GfField::with_default_poly(m), t) {}

BchCode::BchCode(GfField field, int t) : field_(std::move(field)), t_(t) {
  n_ = field_.order();
  if (t < 1) throw std::invalid_argument("error correction capability t must be >= 1");
  if (2 * t >= n_) throw std::invalid_argument("t too large for code length");

  std::vector<bool> seen(n_, false);
  generator_ = {1};
  for (int c = 1; c <= 2 * t; ++c) {
    if (seen[c]) continue;
    generator_ = poly_mul_gf2(generator_, minimal_polynomial(field_, c, seen));
  }
  k_ = n_ - static_cast<int>(generator_.size() - 1);
  if (k_ < 1) throw std::invalid_argument("t too large: generator degree reaches code length");

  // g must divide x^n + 1
  std::vector<std::uint8_t> xn1(n_ + 1, 0);
  xn1[0] = 1;
  xn1[n_] = 1;
  auto rem = poly_mod_gf2(xn1, generator_);
  if (std::any_of(rem.begin(), rem.end(), [](std::uint8_t b) { return b != 0; })) {
    throw std::logic_error("generator polynomial does not divide x^n + 1");
  }

  id_ = "bch" + std::to_string(n_) + "_t" + std::to_string(t_);
}

BchCode BchCode::from_preset(std::string_view name) {
  if (name == "bch15_t3") return BchCode(4, 3);
  if (name == "bch31_t3") return BchCode(5, 3);
  if (name == "bch63_t5") return BchCode(6, 5);
  throw ConfigError("unknown code preset '" + std::string(name) +
                    "' (expected bch15_t3, bch31_t3 or bch63_t5)");
}

const std::vector<std::string>& BchCode::preset_names() {
  static const std::vector<std::string> names{"bch15_t3", "bch31_t3", "bch63_t5"};
  return names;
}

BitSeq bch_encode(const BitSeq& msg, const BchCode& code) {
  const int n = code.n();
  const int k = code.k();
  if (static_cast<int>(msg.size()) != k) {
    throw std::invalid_argument("message length " + std::to_string(msg.size()) +
                                " does not match k=" + std::to_string(k));
  }
  // x^(n-k) * msg(x), msg bit 0 being the coefficient of x^(n-1)
  std::vector<std::uint8_t> shifted(n, 0);
  for (int i = 0; i < k; ++i) shifted[n - 1 - i] = msg[i];
  auto parity = poly_mod_gf2(shifted, code.generator());

  BitSeq word(n);
  for (int i = 0; i < k; ++i) word[i] = msg[i];
  for (int i = k; i < n; ++i) word[i] = parity[n - 1 - i];
  return word;
}

namespace {

// syndromes S_j = r(alpha^j), j = 1..2t; returns true if all zero
bool compute_syndromes(const BitSeq& word, const BchCode& code, std::vector<int>& out) {
  const GfField& f = code.field();
  const int n = code.n();
  out.assign(2 * code.t() + 1, 0);
  bool all_zero = true;
  for (int j = 1; j <= 2 * code.t(); ++j) {
    int s = 0;
    for (int i = 0; i < n; ++i) {
      if (word[i]) s ^= f.alpha_pow(static_cast<long long>(j) * (n - 1 - i));
    }
    out[j] = s;
    if (s != 0) all_zero = false;
  }
  return all_zero;
}

}  // namespace

bool bch_is_codeword(const BitSeq& word, const BchCode& code) {
  if (static_cast<int>(word.size()) != code.n()) return false;
  std::vector<int> syn;
  return compute_syndromes(word, code, syn);
}

std::optional<BchDecodeResult> bch_decode(const BitSeq& word, const BchCode& code) {
  const int n = code.n();
  const int t = code.t();
  const GfField& f = code.field();
  if (static_cast<int>(word.size()) != n) {
    throw std::invalid_argument("received word length does not match code length");
  }

  std::vector<int> syn;
  if (compute_syndromes(word, code, syn)) {
    return BchDecodeResult{word, {}};
  }

  // Berlekamp-Massey for the error locator sigma(x)
  std::vector<int> sigma{1};   // current locator
  std::vector<int> prev{1};    // copy from the last length change
  int L = 0;
  int shift = 1;
  int prev_disc = 1;
  for (int i = 1; i <= 2 * t; ++i) {
    int disc = syn[i];
    for (int j = 1; j <= L && j < static_cast<int>(sigma.size()); ++j) {
      if (sigma[j]) disc ^= f.mul(sigma[j], syn[i - j]);
    }
    if (disc == 0) {
      ++shift;
      continue;
    }
    // sigma' = sigma - (disc/prev_disc) * x^shift * prev
    std::vector<int> next = sigma;
    const int scale = f.mul(disc, f.inv(prev_disc));
    if (next.size() < prev.size() + shift) next.resize(prev.size() + shift, 0);
    for (std::size_t j = 0; j < prev.size(); ++j) {
      if (prev[j]) next[j + shift] ^= f.mul(scale, prev[j]);
    }
    if (2 * L <= i - 1) {
      prev = sigma;
      prev_disc = disc;
      L = i - L;
      shift = 1;
    } else {
      ++shift;
    }
    sigma = std::move(next);
  }

  while (!sigma.empty() && sigma.back() == 0) sigma.pop_back();
  const int degree = static_cast<int>(sigma.size()) - 1;
  if (degree > t || degree != L) return std::nullopt;

  // Chien search: position with polynomial degree d is in error iff
  // sigma(alpha^(-d)) = 0.
  std::vector<std::size_t> error_positions;
  for (int d = 0; d < n; ++d) {
    int value = 0;
    for (int j = 0; j < static_cast<int>(sigma.size()); ++j) {
      if (sigma[j]) value ^= f.mul(sigma[j], f.alpha_pow(static_cast<long long>(-d) * j));
    }
    if (value == 0) error_positions.push_back(static_cast<std::size_t>(n - 1 - d));
  }
  if (static_cast<int>(error_positions.size()) != degree) return std::nullopt;

  BitSeq corrected = word;
  for (auto pos : error_positions) corrected[pos] ^= 1;

  std::vector<int> check;
  if (!compute_syndromes(corrected, code, check)) return std::nullopt;

  std::sort(error_positions.begin(), error_positions.end());
  return BchDecodeResult{std::move(corrected), std::move(error_positions)};
}

}  // namespace lorakey
