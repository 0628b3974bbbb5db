#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "aos/privacy.hpp"
#include "aos/transactions.hpp"
#include "aos/txalgebra.hpp"
#include "../oracles.hpp"
#include "../support.hpp"

using namespace aos;
using namespace aos::privacy;

TEST(Pedersen, ToyKnownValue) {
  const auto p = toy_params();
  EXPECT_TRUE(p.valid());
  EXPECT_EQ(commit(p, std::uint64_t{3}, std::uint64_t{2}).value, 3u);
}

TEST(Pedersen, ToyMatchesNaive) {
  const auto p = toy_params();
  for (std::uint64_t s = 0; s < 11; ++s)
    for (std::uint64_t t = 0; t < 11; ++t) EXPECT_EQ(commit(p, s, t).value, oracle::naive_commit(23, 2, 3, s, t));
}

TEST(Pedersen, ToyHidingUniform) {
  const auto p = toy_params();
  std::set<std::uint64_t> first;
  for (std::uint64_t t = 0; t < 11; ++t) first.insert(commit(p, std::uint64_t{0}, t).value);
  EXPECT_EQ(first.size(), 11u);
  for (std::uint64_t s = 1; s < 11; ++s) {
    std::set<std::uint64_t> image;
    for (std::uint64_t t = 0; t < 11; ++t) image.insert(commit(p, s, t).value);
    EXPECT_EQ(image, first) << "s=" << s;
  }
}

TEST(Pedersen, ToyOpenAndRange) {
  const auto p = toy_params();
  const auto c = commit(p, std::uint64_t{4}, std::uint64_t{7});
  EXPECT_TRUE(open_commitment(p, c, std::uint64_t{4}, std::uint64_t{7}));
  EXPECT_FALSE(open_commitment(p, c, std::uint64_t{5}, std::uint64_t{7}));
  EXPECT_FALSE(open_commitment(p, c, std::uint64_t{4}, std::uint64_t{11}));
  EXPECT_ERRC(commit(p, std::uint64_t{11}, std::uint64_t{0}), Errc::OutOfRange);
}

TEST(Pedersen, InvalidParamsDetected) {
  EXPECT_FALSE((CommitmentParams<std::uint64_t>{23, 11, 2, 2}.valid()));
  EXPECT_FALSE((CommitmentParams<std::uint64_t>{23, 11, 5, 3}.valid()));  // 5 has order 22
  EXPECT_FALSE((CommitmentParams<std::uint64_t>{21, 11, 2, 3}.valid()));
}

TEST(Pedersen, ProductionGroup) {
  const auto p = production_params();
  EXPECT_EQ(mpz_sizeinbase(p.p.get_mpz_t(), 2), 2048u);
  EXPECT_TRUE(p.valid());
  std::mt19937_64 rng(1);
  const mpz_class s = 424242;
  const auto t = random_blinding(p, rng);
  const auto c = commit(p, s, t);
  EXPECT_TRUE(open_commitment(p, c, s, t));
  EXPECT_FALSE(open_commitment(p, c, mpz_class(s + 1), t));
  EXPECT_NE(production_params("another label").h, p.h);
}

TEST(Pedersen, ParamsJsonRoundTrip) {
  const auto j = params_to_json(toy_params());
  EXPECT_EQ(j.at("p"), "23");
  const auto back = params_from_json<std::uint64_t>(j);
  EXPECT_EQ(back.h, 3u);
  auto bad = j;
  bad["h"] = "2";
  EXPECT_ERRC(params_from_json<std::uint64_t>(bad), Errc::InvalidParameters);
  bad["h"] = "x";
  EXPECT_ERRC(params_from_json<std::uint64_t>(bad), Errc::Malformed);
  const auto big = production_params();
  EXPECT_EQ(params_from_json<mpz_class>(params_to_json(big)).h, big.h);
}

TEST(DP, FlipProbability) {
  EXPECT_NEAR(flip_probability(std::log(3.0)), 0.25, 1e-15);
  EXPECT_NEAR(flip_probability(1.0), oracle::flip_probability(1.0), 1e-15);
  EXPECT_EQ(flip_probability(INFINITY), 0.0);
  EXPECT_ERRC(flip_probability(0.0), Errc::InvalidEpsilon);
  EXPECT_ERRC(flip_probability(-1.0), Errc::InvalidEpsilon);
  EXPECT_ERRC(DPConfig::with_epsilon(NAN), Errc::InvalidEpsilon);
}

TEST(DP, EmpiricalFlipRate) {
  std::mt19937_64 rng(99);
  const DPConfig cfg;
  int flips = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) flips += dp_randomize(i % 2 == 0, cfg, rng) != (i % 2 == 0);
  EXPECT_NEAR(flips / static_cast<double>(n), 0.25, 0.005);
}

TEST(DP, NeverFlipsAtInfinity) {
  std::mt19937_64 rng(1);
  const DPConfig cfg{INFINITY};
  for (int i = 0; i < 1000; ++i) EXPECT_TRUE(dp_randomize(true, cfg, rng));
}

TEST(Decoys, WellFormedAndCounted) {
  std::mt19937_64 rng(5);
  const auto d = make_decoy(rng);
  EXPECT_EQ(d.tx_type, tx::TxType::TypeA);
  tx::AccountState s;
  EXPECT_EQ(s.apply(d, 1).status, "recorded");
  EXPECT_EQ(s.total_supply(), 0u);

  const DPConfig cfg;
  double total = 0;
  for (int i = 0; i < 4000; ++i) total += static_cast<double>(decoy_count(3, cfg, rng));
  EXPECT_NEAR(total / 4000, 4 * 0.25, 0.05);

  std::vector<tx::SealedTransaction> real{make_decoy(rng), make_decoy(rng)};
  const auto mixed = inject_decoys(real, cfg, rng);
  EXPECT_GE(mixed.size(), real.size());
  for (const auto& r : real) EXPECT_NE(std::find(mixed.begin(), mixed.end(), r), mixed.end());
}

TEST(Blinding, PreservesValueUnderKey) {
  const auto e = txalgebra::parse("5 * (A & (B | C))");
  const auto blinded = blind_pad(e, 6, "shared key");
  ASSERT_EQ(blinded.kind(), txalgebra::NodeKind::Scale);
  EXPECT_EQ(txalgebra::variables(blinded).size(), 9u);
  const auto pads = pad_binding("shared key", 6);
  for (int i = 0; i < 8; ++i) {
    txalgebra::Binding b{{"A", (i & 1) != 0}, {"B", (i & 2) != 0}, {"C", (i & 4) != 0}};
    const auto want = txalgebra::evaluate(e, b);
    b.insert(pads.begin(), pads.end());
    EXPECT_EQ(txalgebra::evaluate(blinded, b), want);
  }
  EXPECT_EQ(txalgebra::search_space(static_cast<unsigned>(txalgebra::variables(blinded).size())), 512u);
  EXPECT_ERRC(blind_pad(txalgebra::parse("_pad0 & A"), 2, "k"), Errc::Malformed);
}
