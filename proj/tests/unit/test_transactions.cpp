#include <gtest/gtest.h>

#include "aos/transactions.hpp"
#include "aos/txalgebra.hpp"
#include "../support.hpp"

using namespace aos;
using namespace aos::tx;

namespace {

const KeyPair& alice() {
  static const KeyPair k = generate_keypair("alice test key seed");
  return k;
}
const KeyPair& bob() {
  static const KeyPair k = generate_keypair("bob test key seed 00");
  return k;
}
const KeyPair& carol() {
  static const KeyPair k = generate_keypair("carol test key seed0");
  return k;
}

SignedTransaction type_a(const char* program, Units value, const KeyPair& from = alice(), const KeyPair& to = bob()) {
  return sign(make_type_a(from.public_key, to.public_key, txalgebra::parse(program), value), from.private_key);
}

SignedTransaction type_b(const SignedTransaction& target, txalgebra::Binding b, const KeyPair& invoker = bob()) {
  return sign(make_type_b(target, std::move(b)), invoker.private_key);
}

}  // namespace

TEST(Transaction, IdIsStableAndSensitive) {
  const auto a = type_a("A & B", 10);
  EXPECT_EQ(a.tx_id(), type_a("A & B", 10).tx_id());
  EXPECT_NE(a.tx_id(), type_a("A & B", 11).tx_id());
  EXPECT_NE(a.tx_id(), type_a("A | B", 10).tx_id());
  EXPECT_TRUE(a.verify());
}

TEST(Transaction, SignRequiresSenderKey) {
  const auto body = make_type_a(alice().public_key, bob().public_key, txalgebra::parse("A"), 1);
  EXPECT_ERRC(sign(body, bob().private_key), Errc::KeyMismatch);
}

TEST(Transaction, TamperedSignatureFails) {
  auto a = type_a("A", 3);
  a.body.value = 4;
  EXPECT_FALSE(a.verify());
}

TEST(Envelope, SealOpenRoundTrip) {
  const auto a = type_a("A & B", 10);
  const auto s = seal(a, bob().public_key);
  EXPECT_EQ(s.tx_id, a.tx_id());
  EXPECT_FALSE(s.reveal.has_value());
  EXPECT_EQ(open_and_verify(s, bob().private_key), a);
  EXPECT_ERRC(open_and_verify(s, carol().private_key), Errc::DecryptFailed);
}

TEST(Envelope, ForgedPayloadRejected) {
  auto forged = type_a("A", 10);
  forged.body.value = 1000;  // signature now stale
  auto s = seal(forged, bob().public_key);
  s.tx_id = forged.tx_id();
  EXPECT_ERRC(open_and_verify(s, bob().private_key), Errc::BadSignature);
}

TEST(Json, SealedRoundTrip) {
  const auto a = type_a("7 * (A & !B)", 3);
  const auto b = type_b(a, {{"A", true}, {"B", false}});
  for (const auto& s : {seal(a, bob().public_key), seal(b, alice().public_key)}) {
    const auto j = to_json_value(s);
    EXPECT_EQ(sealed_from_json(json::parse(j.dump())), s);
  }
}

TEST(Json, MalformedRejected) {
  EXPECT_ERRC(sealed_from_json(json::parse(R"({"tx_id":"00"})")), Errc::Malformed);
}

TEST(Accounts, InvokeMovesValue) {
  AccountState s({{alice().public_key, 100}, {bob().public_key, 5}});
  const auto a = type_a("A & B", 10);
  const auto b = type_b(a, {{"A", true}, {"B", true}});
  const auto r1 = s.apply(seal(a, bob().public_key), 1);
  EXPECT_EQ(r1.status, "recorded");
  const auto r2 = s.apply(seal(b, alice().public_key), 2);
  EXPECT_EQ(r2.status, "ok");
  EXPECT_EQ(r2.delta.amount, 10u);
  EXPECT_EQ(s.balance(alice().public_key), 90u);
  EXPECT_EQ(s.balance(bob().public_key), 15u);
  EXPECT_EQ(s.total_supply(), 105u);
  EXPECT_TRUE(s.is_consumed(a.tx_id()));
}

TEST(Accounts, FalseProgramConsumesWithoutTransfer) {
  AccountState s({{alice().public_key, 100}});
  const auto a = type_a("A & B", 10);
  s.apply(seal(a, bob().public_key), 1);
  const auto r = s.apply(seal(type_b(a, {{"A", true}, {"B", false}}), alice().public_key), 2);
  EXPECT_EQ(r.status, "ok");
  EXPECT_EQ(r.delta.amount, 0u);
  EXPECT_EQ(s.balance(alice().public_key), 100u);
  const auto again = s.apply(seal(type_b(a, {{"A", true}, {"B", true}}), alice().public_key), 3);
  EXPECT_EQ(again.status, "AlreadyConsumed");
}

TEST(Accounts, FailureStatuses) {
  AccountState s({{alice().public_key, 5}});
  const auto a = type_a("A", 10);
  // Target not committed yet.
  EXPECT_EQ(s.apply(seal(type_b(a, {{"A", false}}), alice().public_key), 1).status, "TargetNotFound");
  s.apply(seal(a, bob().public_key), 2);
  EXPECT_EQ(s.apply(seal(type_b(a, {{"A", true}, {"Z", true}}), alice().public_key), 3).status, "Malformed");
  EXPECT_EQ(s.apply(seal(type_b(a, {}), alice().public_key), 4).status, "UnboundVariable");
  EXPECT_EQ(s.apply(seal(type_b(a, {{"A", true}}), alice().public_key), 5).status, "InsufficientFunds");
  // A failed transaction id is not retried.
  EXPECT_EQ(s.apply(seal(type_b(a, {{"A", true}}), alice().public_key), 6).status, "duplicate");
  // A failed invocation leaves the Type A available.
  EXPECT_FALSE(s.is_consumed(a.tx_id()));
  EXPECT_EQ(s.total_supply(), 5u);
}

TEST(Accounts, OnlyRecipientMayInvoke) {
  AccountState s({{alice().public_key, 50}});
  const auto a = type_a("A", 10);
  s.apply(seal(a, bob().public_key), 1);
  auto body = make_type_b(a, {{"A", true}});
  body.sender = carol().public_key;
  const auto forged = sign(body, carol().private_key);
  EXPECT_EQ(s.apply(seal(forged, alice().public_key), 2).status, "KeyMismatch");
}

TEST(Accounts, DuplicateIsIgnored) {
  AccountState s({{alice().public_key, 50}});
  const auto sa = seal(type_a("A", 10), bob().public_key);
  EXPECT_EQ(s.apply(sa, 1).status, "recorded");
  EXPECT_EQ(s.apply(sa, 2).status, "duplicate");
}

TEST(Accounts, ScaledProgram) {
  AccountState s({{alice().public_key, 1000}});
  const auto a = type_a("50 * (A & (B | C))", 2);
  s.apply(seal(a, bob().public_key), 1);
  const auto r = s.apply(seal(type_b(a, {{"A", true}, {"B", false}, {"C", true}}), alice().public_key), 2);
  EXPECT_EQ(r.delta.amount, 100u);
  EXPECT_EQ(s.balance(bob().public_key), 100u);
}
