#pragma once

#include <sodium.h>

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>

#include "aos/core/bytes.hpp"
#include "aos/core/error.hpp"

namespace aos {

namespace detail {
inline void ensure_sodium() {
  static const bool ready = [] {
    if (sodium_init() < 0) throw Error(Errc::Io, "libsodium initialisation failed");
    return true;
  }();
  (void)ready;
}
}  // namespace detail

/// 32-byte SHA-256 value.
struct Digest {
  std::array<std::uint8_t, 32> bytes{};

  std::string hex() const { return to_hex(bytes); }
  static Digest from_hex(std::string_view h) { return Digest{fixed_from_hex<32>(h)}; }

  auto operator<=>(const Digest&) const = default;
};

inline std::ostream& operator<<(std::ostream& os, const Digest& d) { return os << d.hex(); }

inline Digest hash(ByteView data) {
  detail::ensure_sodium();
  Digest d;
  crypto_hash_sha256(d.bytes.data(), data.data(), data.size());
  return d;
}

inline Digest hash(std::string_view s) { return hash(as_bytes(s)); }

/// hash(a || b) without building the concatenation.
inline Digest hash_concat(ByteView a, ByteView b) {
  detail::ensure_sodium();
  crypto_hash_sha256_state st;
  crypto_hash_sha256_init(&st);
  crypto_hash_sha256_update(&st, a.data(), a.size());
  crypto_hash_sha256_update(&st, b.data(), b.size());
  Digest d;
  crypto_hash_sha256_final(&st, d.bytes.data());
  return d;
}

struct PublicKey {
  std::array<std::uint8_t, crypto_sign_PUBLICKEYBYTES> bytes{};

  std::string hex() const { return to_hex(bytes); }
  static PublicKey from_hex(std::string_view h) {
    return PublicKey{fixed_from_hex<crypto_sign_PUBLICKEYBYTES>(h)};
  }
  auto operator<=>(const PublicKey&) const = default;
};

struct SecretKey {
  std::array<std::uint8_t, crypto_sign_SECRETKEYBYTES> bytes{};

  std::string hex() const { return to_hex(bytes); }
  static SecretKey from_hex(std::string_view h) {
    return SecretKey{fixed_from_hex<crypto_sign_SECRETKEYBYTES>(h)};
  }
  bool operator==(const SecretKey&) const = default;
};

struct Signature {
  std::array<std::uint8_t, crypto_sign_BYTES> bytes{};

  std::string hex() const { return to_hex(bytes); }
  static Signature from_hex(std::string_view h) { return Signature{fixed_from_hex<crypto_sign_BYTES>(h)}; }
  bool operator==(const Signature&) const = default;
};

/// Ed25519 signing pair. The same pair doubles as an encryption identity
/// through the birational map to X25519, so one published key serves both
/// signature verification and sealing.
struct KeyPair {
  SecretKey private_key;
  PublicKey public_key;

  bool operator==(const KeyPair&) const = default;
};

inline constexpr std::size_t kMinSeedBytes = 16;

/// Deterministic for a fixed seed. Seeds shorter than kMinSeedBytes are
/// rejected; longer seeds are compressed with SHA-256.
inline KeyPair generate_keypair(ByteView seed) {
  if (seed.size() < kMinSeedBytes)
    throw Error(Errc::SeedTooShort, "need at least " + std::to_string(kMinSeedBytes) + " bytes");
  detail::ensure_sodium();
  const Digest compressed = hash(seed);
  KeyPair kp;
  crypto_sign_seed_keypair(kp.public_key.bytes.data(), kp.private_key.bytes.data(), compressed.bytes.data());
  return kp;
}

inline KeyPair generate_keypair(std::string_view seed) { return generate_keypair(as_bytes(seed)); }

/// Fresh keypair from the OS entropy source.
inline KeyPair random_keypair() {
  detail::ensure_sodium();
  std::array<std::uint8_t, 32> seed{};
  randombytes_buf(seed.data(), seed.size());
  return generate_keypair(ByteView(seed));
}

inline PublicKey public_key_of(const SecretKey& sk) {
  detail::ensure_sodium();
  PublicKey pk;
  crypto_sign_ed25519_sk_to_pk(pk.bytes.data(), sk.bytes.data());
  return pk;
}

inline Signature sign(const SecretKey& sk, ByteView message) {
  detail::ensure_sodium();
  Signature sig;
  crypto_sign_detached(sig.bytes.data(), nullptr, message.data(), message.size(), sk.bytes.data());
  return sig;
}

inline bool verify(const PublicKey& pk, const Signature& sig, ByteView message) {
  detail::ensure_sodium();
  return crypto_sign_verify_detached(sig.bytes.data(), message.data(), message.size(), pk.bytes.data()) == 0;
}

/// Anonymous public-key encryption to `recipient` (X25519 + XSalsa20-Poly1305
/// sealed box). Each call uses a fresh ephemeral key, so ciphertexts of the
/// same plaintext differ.
inline Bytes seal_bytes(ByteView plaintext, const PublicKey& recipient) {
  detail::ensure_sodium();
  std::array<std::uint8_t, crypto_box_PUBLICKEYBYTES> curve_pk{};
  if (crypto_sign_ed25519_pk_to_curve25519(curve_pk.data(), recipient.bytes.data()) != 0)
    throw Error(Errc::KeyMismatch, "recipient key is not a valid curve point");
  Bytes out(plaintext.size() + crypto_box_SEALBYTES);
  crypto_box_seal(out.data(), plaintext.data(), plaintext.size(), curve_pk.data());
  return out;
}

inline Bytes open_bytes(ByteView ciphertext, const SecretKey& sk) {
  detail::ensure_sodium();
  if (ciphertext.size() < crypto_box_SEALBYTES) throw Error(Errc::DecryptFailed, "ciphertext too short");
  std::array<std::uint8_t, crypto_box_PUBLICKEYBYTES> curve_pk{};
  std::array<std::uint8_t, crypto_box_SECRETKEYBYTES> curve_sk{};
  const PublicKey pk = public_key_of(sk);
  if (crypto_sign_ed25519_pk_to_curve25519(curve_pk.data(), pk.bytes.data()) != 0)
    throw Error(Errc::DecryptFailed, "bad key");
  crypto_sign_ed25519_sk_to_curve25519(curve_sk.data(), sk.bytes.data());
  Bytes out(ciphertext.size() - crypto_box_SEALBYTES);
  const int rc = crypto_box_seal_open(out.data(), ciphertext.data(), ciphertext.size(), curve_pk.data(),
                                      curve_sk.data());
  sodium_memzero(curve_sk.data(), curve_sk.size());
  if (rc != 0) throw Error(Errc::DecryptFailed, "sealed box did not open");
  return out;
}

}  // namespace aos

template <>
struct std::hash<aos::Digest> {
  std::size_t operator()(const aos::Digest& d) const noexcept {
    std::size_t h = 0;
    for (int i = 0; i < 8; ++i) h = (h << 8) | d.bytes[i];
    return h;
  }
};
