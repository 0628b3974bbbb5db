#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace aos {

enum class Errc {
  // core
  SeedTooShort,
  BadHex,
  // ledger
  LinkMismatch,
  IndexGap,
  HashMismatch,
  NotFound,
  Corrupt,
  // proposals / agreement
  NotElected,
  InvalidNodeCount,
  NodeOutOfRange,
  BadSignature,
  LocalInconsistency,
  // transactions
  KeyMismatch,
  DecryptFailed,
  AlreadyConsumed,
  UnboundVariable,
  TargetNotFound,
  InsufficientFunds,
  Malformed,
  // txalgebra
  ParseError,
  UnknownBallot,
  InvalidVote,
  NotDoubleNegation,
  // mechanisms
  LambdaOutOfRange,
  InvalidParameters,
  InvalidTolerance,
  // privacy
  OutOfRange,
  InvalidEpsilon,
  // node
  DirNotEmpty,
  NotInitialized,
  QueueFull,
  BindFailed,
  PeerKeyMismatch,
  UnsupportedVersion,
  Io,
};

constexpr std::string_view to_string(Errc c) noexcept {
  switch (c) {
    case Errc::SeedTooShort: return "SeedTooShort";
    case Errc::BadHex: return "BadHex";
    case Errc::LinkMismatch: return "LinkMismatch";
    case Errc::IndexGap: return "IndexGap";
    case Errc::HashMismatch: return "HashMismatch";
    case Errc::NotFound: return "NotFound";
    case Errc::Corrupt: return "Corrupt";
    case Errc::NotElected: return "NotElected";
    case Errc::InvalidNodeCount: return "InvalidNodeCount";
    case Errc::NodeOutOfRange: return "NodeOutOfRange";
    case Errc::BadSignature: return "BadSignature";
    case Errc::LocalInconsistency: return "LocalInconsistency";
    case Errc::KeyMismatch: return "KeyMismatch";
    case Errc::DecryptFailed: return "DecryptFailed";
    case Errc::AlreadyConsumed: return "AlreadyConsumed";
    case Errc::UnboundVariable: return "UnboundVariable";
    case Errc::TargetNotFound: return "TargetNotFound";
    case Errc::InsufficientFunds: return "InsufficientFunds";
    case Errc::Malformed: return "Malformed";
    case Errc::ParseError: return "ParseError";
    case Errc::UnknownBallot: return "UnknownBallot";
    case Errc::InvalidVote: return "InvalidVote";
    case Errc::NotDoubleNegation: return "NotDoubleNegation";
    case Errc::LambdaOutOfRange: return "LambdaOutOfRange";
    case Errc::InvalidParameters: return "InvalidParameters";
    case Errc::InvalidTolerance: return "InvalidTolerance";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::InvalidEpsilon: return "InvalidEpsilon";
    case Errc::DirNotEmpty: return "DirNotEmpty";
    case Errc::NotInitialized: return "NotInitialized";
    case Errc::QueueFull: return "QueueFull";
    case Errc::BindFailed: return "BindFailed";
    case Errc::PeerKeyMismatch: return "PeerKeyMismatch";
    case Errc::UnsupportedVersion: return "UnsupportedVersion";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (and tests) can branch on the kind rather than the message.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  explicit Error(Errc code) : std::runtime_error(std::string(to_string(code))), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace aos
