#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <gmpxx.h>
#include <nlohmann/json.hpp>

#include "aos/core/crypto.hpp"
#include "aos/core/error.hpp"

namespace aos::privacy {

/// Modular arithmetic over the integer type backing a group.
template <typename Int>
struct Arith;

template <>
struct Arith<std::uint64_t> {
  using Int = std::uint64_t;
  static Int mul(Int a, Int b, Int m) { return static_cast<Int>((static_cast<unsigned __int128>(a) * b) % m); }
  static Int pow(Int base, Int exp, Int m) {
    Int result = 1 % m;
    base %= m;
    while (exp > 0) {
      if (exp & 1) result = mul(result, base, m);
      base = mul(base, base, m);
      exp >>= 1;
    }
    return result;
  }
  /// Deterministic Miller-Rabin for 64-bit inputs.
  static bool is_prime(Int n) {
    if (n < 2) return false;
    for (Int sp : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
      if (n % sp == 0) return n == sp;
    }
    Int d = n - 1;
    int r = 0;
    while ((d & 1) == 0) {
      d >>= 1;
      ++r;
    }
    for (Int a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
      Int x = pow(a, d, n);
      if (x == 1 || x == n - 1) continue;
      bool composite = true;
      for (int i = 1; i < r && composite; ++i) {
        x = mul(x, x, n);
        if (x == n - 1) composite = false;
      }
      if (composite) return false;
    }
    return true;
  }
  static bool negative(Int) { return false; }
  static std::string to_decimal(Int v) { return std::to_string(v); }
  static Int from_decimal(const std::string& s) {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(s, &pos, 10);
    if (pos != s.size()) throw Error(Errc::Malformed, "not a decimal integer: " + s);
    return v;
  }
  template <typename Rng>
  static Int uniform_below(Int q, Rng& rng) {
    return std::uniform_int_distribution<Int>(0, q - 1)(rng);
  }
};

template <>
struct Arith<mpz_class> {
  using Int = mpz_class;
  static Int mul(const Int& a, const Int& b, const Int& m) { return (a * b) % m; }
  static Int pow(const Int& base, const Int& exp, const Int& m) {
    Int r;
    mpz_powm(r.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), m.get_mpz_t());
    return r;
  }
  static bool is_prime(const Int& n) { return mpz_probab_prime_p(n.get_mpz_t(), 40) > 0; }
  static bool negative(const Int& v) { return sgn(v) < 0; }
  static std::string to_decimal(const Int& v) { return v.get_str(10); }
  static Int from_decimal(const std::string& s) {
    Int v;
    if (s.empty() || s[0] == '-' || v.set_str(s, 10) != 0) throw Error(Errc::Malformed, "not a decimal integer: " + s);
    return v;
  }
  /// Draws from libsodium's CSPRNG; the injected rng is not used, since
  /// blinding factors for real commitments must not be replayable.
  template <typename Rng>
  static Int uniform_below(const Int& q, Rng&) {
    detail::ensure_sodium();
    const std::size_t nbytes = (mpz_sizeinbase(q.get_mpz_t(), 2) + 7) / 8 + 16;
    std::vector<unsigned char> buf(nbytes);
    randombytes_buf(buf.data(), buf.size());
    Int v;
    mpz_import(v.get_mpz_t(), buf.size(), 1, 1, 1, 0, buf.data());
    return v % q;
  }
};

/// Prime-order subgroup G_q of Z_p^* with two generators whose mutual
/// discrete log nobody knows.
template <typename Int>
struct CommitmentParams {
  Int p;
  Int q;
  Int g;
  Int h;

  /// q prime, q | p-1, g and h of order q, g != h.
  bool valid() const {
    using A = Arith<Int>;
    if (!(p > Int(3)) || !(q > Int(1)) || !A::is_prime(p) || !A::is_prime(q)) return false;
    if (Int((p - 1) % q) != Int(0)) return false;
    auto order_q = [&](const Int& x) { return x > Int(1) && x < p && A::pow(x, q, p) == Int(1); };
    return order_q(g) && order_q(h) && g != h;
  }
};

template <typename Int>
struct Commitment {
  Int value;
  bool operator==(const Commitment&) const = default;
};

/// Exhaustive-test profile: p = 23, q = 11, g = 2, h = 3.
inline CommitmentParams<std::uint64_t> toy_params() { return {23, 11, 2, 3}; }

namespace detail {

inline const char* kModp2048Hex =
    "FFFFFFFFFFFFFFFFC90FDAA22168C234C4C6628B80DC1CD129024E088A67CC74020BBEA63B139B22514A08798E3404DD"
    "EF9519B3CD3A431B302B0A6DF25F14374FE1356D6D51C245E485B576625E7EC6F44C42E9A637ED6B0BFF5CB6F406B7ED"
    "EE386BFB5A899FA5AE9F24117C4B1FE649286651ECE45B3DC2007CB8A163BF0598DA48361C55D39A69163FA8FD24CF5F"
    "83655D23DCA3AD961C62F356208552BB9ED529077096966D670C354E4ABC9804F1746C08CA18217C32905E462E36CE3B"
    "E39E772C180E86039B2783A2EC07A28FB5C55DF06F4C52C9DE2BCBF6955817183995497CEA956AE515D2261898FA0510"
    "15728E5A8AACAA68FFFFFFFFFFFFFFFF";

/// Hash-to-group: SHA-256 in counter mode expanded past |p|, reduced mod p,
/// then squared into the quadratic residues (the order-q subgroup of a safe
/// prime). Anyone can recompute h from the label, so nobody chose it.
inline mpz_class hash_to_group(const mpz_class& p, std::string_view label) {
  const std::size_t need = (mpz_sizeinbase(p.get_mpz_t(), 2) + 7) / 8 + 32;
  for (std::uint32_t attempt = 0;; ++attempt) {
    Bytes stream;
    for (std::uint32_t ctr = 0; stream.size() < need; ++ctr) {
      ByteWriter w;
      w.str(label).u32(attempt).u32(ctr);
      const Digest d = hash(w.data());
      stream.insert(stream.end(), d.bytes.begin(), d.bytes.end());
    }
    mpz_class x;
    mpz_import(x.get_mpz_t(), stream.size(), 1, 1, 1, 0, stream.data());
    x %= p;
    mpz_class h = (x * x) % p;
    if (h > 1 && h != p - 1) return h;
  }
}

}  // namespace detail

/// 2048-bit MODP safe prime, q = (p-1)/2, g = 2 (a quadratic residue since
/// p = 7 mod 8), h hashed to the group from `label`.
inline CommitmentParams<mpz_class> production_params(std::string_view label = "aos/pedersen/h/v1") {
  CommitmentParams<mpz_class> c;
  c.p = mpz_class(detail::kModp2048Hex, 16);
  c.q = (c.p - 1) / 2;
  c.g = 2;
  c.h = detail::hash_to_group(c.p, label);
  return c;
}

template <typename Int>
void check_exponent(const CommitmentParams<Int>& params, const Int& x, const char* what) {
  if (Arith<Int>::negative(x) || !(x < params.q)) throw Error(Errc::OutOfRange, std::string(what) + " must lie in [0, q)");
}

/// E(s, t) = g^s * h^t mod p.
template <typename Int>
Commitment<Int> commit(const CommitmentParams<Int>& params, const Int& s, const Int& t) {
  using A = Arith<Int>;
  check_exponent(params, s, "s");
  check_exponent(params, t, "t");
  return {A::mul(A::pow(params.g, s, params.p), A::pow(params.h, t, params.p), params.p)};
}

template <typename Int>
bool open_commitment(const CommitmentParams<Int>& params, const Commitment<Int>& c, const Int& s, const Int& t) {
  using A = Arith<Int>;
  if (A::negative(s) || !(s < params.q) || A::negative(t) || !(t < params.q)) return false;
  return commit(params, s, t) == c;
}

/// Uniform blinding factor t in Z_q.
template <typename Int, typename Rng>
Int random_blinding(const CommitmentParams<Int>& params, Rng& rng) {
  return Arith<Int>::uniform_below(params.q, rng);
}

/// Config form: {"p": "...", "q": "...", "g": "...", "h": "..."} in decimal.
template <typename Int>
nlohmann::json params_to_json(const CommitmentParams<Int>& c) {
  using A = Arith<Int>;
  return {{"p", A::to_decimal(c.p)}, {"q", A::to_decimal(c.q)}, {"g", A::to_decimal(c.g)}, {"h", A::to_decimal(c.h)}};
}

template <typename Int>
CommitmentParams<Int> params_from_json(const nlohmann::json& j) {
  using A = Arith<Int>;
  try {
    CommitmentParams<Int> c{A::from_decimal(j.at("p").get<std::string>()), A::from_decimal(j.at("q").get<std::string>()),
                            A::from_decimal(j.at("g").get<std::string>()), A::from_decimal(j.at("h").get<std::string>())};
    if (!c.valid()) throw Error(Errc::InvalidParameters, "commitment parameters fail the group checks");
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::Malformed, e.what());
  } catch (const std::invalid_argument& e) {
    throw Error(Errc::Malformed, e.what());
  } catch (const std::out_of_range& e) {
    throw Error(Errc::Malformed, e.what());
  }
}

}  // namespace aos::privacy
