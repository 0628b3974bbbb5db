#include <gtest/gtest.h>

#include <random>

#include "aos/txalgebra.hpp"
#include "../oracles.hpp"
#include "../support.hpp"

using namespace aos;
using namespace aos::txalgebra;

namespace {

Binding binding_for(int index, int nvars) {
  Binding b;
  for (int k = 0; k < nvars; ++k) b[oracle::var_name(k)] = (index >> k) & 1;
  return b;
}

void expect_matches_table(const oracle::TableExpr& t, int nvars) {
  const Expr e = parse(t.text);
  for (int i = 0; i < (1 << nvars); ++i) {
    Binding b = binding_for(i, nvars);
    ASSERT_EQ(evaluate(e, b), (t.table >> i) & 1u) << t.text << " at binding " << i;
  }
}

}  // namespace

TEST(Evaluate, Examples) {
  EXPECT_EQ(evaluate(parse("A & B"), {{"A", true}, {"B", true}}), 1u);
  EXPECT_EQ(evaluate(parse("50 * (A & (B | C))"), {{"A", true}, {"B", false}, {"C", true}}), 50u);
  EXPECT_EQ(evaluate(parse("50 * (A & (B | C))"), {{"A", false}, {"B", true}, {"C", true}}), 0u);
  EXPECT_EQ(evaluate(parse("B | C"), {{"B", true}, {"C", true}}), 1u);
}

TEST(Evaluate, UnboundVariable) {
  EXPECT_ERRC(evaluate(parse("A & B"), {{"A", true}}), Errc::UnboundVariable);
}

TEST(Evaluate, ExhaustiveDepthTwoFourVariables) {
  const auto all = oracle::enumerate(2, 4, true);
  ASSERT_EQ(all.size(), 14280u);
  for (const auto& t : all) expect_matches_table(t, 4);
}

TEST(Evaluate, RandomDepthFourAgainstTruthTable) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 5000; ++i) expect_matches_table(oracle::random_expr(4, 4, rng), 4);
}

TEST(Evaluate, TenVariableTruthTable) {
  // (x0 | x1) & (x2 | x3) & ... & (x8 | x9)
  std::string text;
  for (int k = 0; k < 10; k += 2) {
    if (!text.empty()) text += " & ";
    text += "(x" + std::to_string(k) + " | x" + std::to_string(k + 1) + ")";
  }
  const Expr e = parse(text);
  for (int i = 0; i < 1024; ++i) {
    Binding b;
    for (int k = 0; k < 10; ++k) b["x" + std::to_string(k)] = (i >> k) & 1;
    bool want = true;
    for (int k = 0; k < 10; k += 2) want = want && (((i >> k) & 1) || ((i >> (k + 1)) & 1));
    ASSERT_EQ(evaluate(e, b), want ? 1u : 0u);
  }
}

TEST(Evaluate, DistributedFormsAgree) {
  const Expr f1 = parse("A * (B + C) * 50");
  const Expr f2 = parse("50 * (A * (B + C))");
  const Expr f3 = parse("50 * ((A & B) | (A & C))");
  for (int i = 0; i < 8; ++i) {
    Binding b{{"A", (i & 1) != 0}, {"B", (i & 2) != 0}, {"C", (i & 4) != 0}};
    const Units want = (b["A"] && (b["B"] || b["C"])) ? 50 : 0;
    EXPECT_EQ(evaluate(f1, b), want);
    EXPECT_EQ(evaluate(f2, b), want);
    EXPECT_EQ(evaluate(f3, b), want);
  }
}

TEST(Parser, RoundTripThroughCanonicalText) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 2000; ++i) {
    const Expr e = parse(oracle::random_expr(3, 4, rng).text);
    EXPECT_EQ(parse(to_string(e)), e);
  }
  const Expr s = parse("7 * (A & !B)");
  EXPECT_EQ(parse(to_string(s)), s);
}

TEST(Parser, Rejects) {
  EXPECT_ERRC(parse("A &"), Errc::ParseError);
  EXPECT_ERRC(parse("(A | B"), Errc::ParseError);
  EXPECT_ERRC(parse("2.5 * A"), Errc::ParseError);
  EXPECT_ERRC(parse("7"), Errc::ParseError);
  EXPECT_ERRC(parse("!(3 * A)"), Errc::ParseError);
  EXPECT_ERRC(parse("(3 * A) | B"), Errc::ParseError);
  EXPECT_ERRC(parse("A $ B"), Errc::ParseError);
}

TEST(Parser, ScalarsMultiply) {
  const Expr e = parse("2 * 3 * A");
  ASSERT_EQ(e.kind(), NodeKind::Scale);
  EXPECT_EQ(e.scalar(), 6u);
  EXPECT_EQ(parse("A * B"), parse("A & B"));
}

TEST(Conjoin, ProductOfParts) {
  const Expr t1 = parse("A & B");
  const Expr t2 = parse("A & (B | C)");
  const Expr r = conjoin(t1, t2);
  for (int i = 0; i < 32; ++i) {
    Binding b1{{"A", (i & 1) != 0}, {"B", (i & 2) != 0}};
    Binding b2{{"A", (i & 4) != 0}, {"B", (i & 8) != 0}, {"C", (i & 16) != 0}};
    Binding both;
    for (auto& [k, v] : b1) both[k + "_t1"] = v;
    for (auto& [k, v] : b2) both[k + "_t2"] = v;
    EXPECT_EQ(evaluate(r, both), evaluate(t1, b1) * evaluate(t2, b2));
  }
  Binding ones;
  for (const auto& v : variables(r)) ones[v] = true;
  EXPECT_EQ(evaluate(r, ones), 1u);
}

TEST(Conjoin, HoistsScale) {
  const Expr r = conjoin(parse("A & B"), parse("7 * (A & (B | C))"));
  ASSERT_EQ(r.kind(), NodeKind::Scale);
  EXPECT_EQ(r.scalar(), 7u);
  Binding ones;
  for (const auto& v : variables(r)) ones[v] = true;
  EXPECT_EQ(evaluate(r, ones), 7u);
  ones["A_t1"] = false;
  EXPECT_EQ(evaluate(r, ones), 0u);
}

TEST(SingleBit, DoubleNegation) {
  const Expr e = parse("!!A");
  EXPECT_EQ(single_bit(e, {{"A", true}}), 1u);
  EXPECT_EQ(single_bit(e, {{"A", false}}), 0u);
  EXPECT_ERRC(single_bit(parse("!A"), {{"A", true}}), Errc::NotDoubleNegation);
}

TEST(SearchSpace, PowersOfTwo) {
  EXPECT_EQ(search_space(2), 4u);
  for (unsigned n = 0; n < 12; ++n) {
    std::string text = "1";
    for (unsigned k = 0; k < n; ++k) text += " & v" + std::to_string(k);
    EXPECT_EQ(search_space(static_cast<unsigned>(variables(parse(text)).size())), std::uint64_t{1} << n);
  }
}

TEST(Election, Tally) {
  Election e({1, 2});
  e.set_votes(1, {1, 1, 0});
  EXPECT_EQ(e.tally(1), 2u);
  EXPECT_EQ(e.tally(2), 0u);
  e.set_votes(2, {1, 1, 1, 1});
  EXPECT_EQ(e.tally(2), 4u);
  EXPECT_ERRC(e.tally(3), Errc::UnknownBallot);
  EXPECT_ERRC(e.add_vote(1, 2), Errc::InvalidVote);
}

TEST(Election, WinnerAndConfirmation) {
  Election e({1, 2});
  e.set_votes(1, {1, 1});
  e.set_votes(2, {1, 1, 1});
  e.confirm(1, true);
  e.confirm(2, true);
  EXPECT_EQ(e.winner(), 2u);
  e.confirm(2, false);
  EXPECT_EQ(e.winner(), std::nullopt);
  Election tie({1, 2});
  tie.set_votes(1, {1, 1});
  tie.set_votes(2, {1, 1});
  tie.confirm(1, true);
  tie.confirm(2, true);
  EXPECT_EQ(tie.winner(), 1u);
}

TEST(Election, RandomAgainstBruteForce) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 2000; ++trial) {
    const int nb = 1 + static_cast<int>(rng() % 5);
    std::vector<std::pair<std::uint64_t, std::vector<int>>> ballots;
    std::vector<bool> conf;
    Election e;
    for (int i = 0; i < nb; ++i) {
      const std::uint64_t id = 10 * static_cast<std::uint64_t>(i) + rng() % 10;
      std::vector<int> votes(rng() % 6);
      for (auto& v : votes) v = static_cast<int>(rng() % 2);
      ballots.push_back({id, votes});
      conf.push_back(rng() % 8 != 0);
      e.add_ballot(id);
      e.set_votes(id, votes);
      e.confirm(id, conf.back());
    }
    EXPECT_EQ(e.winner(), oracle::election_winner(ballots, conf));
  }
}

TEST(Dot, RendersGates) {
  const std::string dot = to_dot(parse("A & (B | C)"));
  EXPECT_NE(dot.find("digraph circuit"), std::string::npos);
  EXPECT_NE(dot.find("AND"), std::string::npos);
  EXPECT_NE(dot.find("OR"), std::string::npos);
  EXPECT_NE(dot.find("label=\"C\""), std::string::npos);
}
