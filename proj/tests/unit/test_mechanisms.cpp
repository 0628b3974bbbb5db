#include <gtest/gtest.h>

#include <random>

#include "aos/mechanisms.hpp"
#include "../oracles.hpp"
#include "../support.hpp"

using namespace aos;
using namespace aos::mech;

namespace {

template <typename Rng>
Environment random_crossing_env(Rng& rng) {
  std::uniform_real_distribution<double> u(0.01, 0.99);
  while (true) {
    Environment e{u(rng), u(rng), u(rng), u(rng)};
    if (e.a1 < e.a2) std::swap(e.a1, e.a2);
    if (e.b1 > e.b2) std::swap(e.b1, e.b2);
    if (e.valid() && e.a1 > e.b1 && e.a2 < e.b2) return e;
  }
}

}  // namespace

TEST(PFunction, Endpoints) {
  const auto s = PFunction::decreasing(0.9, 0.1);
  EXPECT_DOUBLE_EQ(p_eval(s, 0.0), 0.9);
  EXPECT_NEAR(p_eval(s, 0.5), 0.5, 1e-12);
  EXPECT_DOUBLE_EQ(p_eval(PFunction::increasing(0.1, 0.9), 1.0), 0.9);
  EXPECT_ERRC(p_eval(s, 1.5), Errc::LambdaOutOfRange);
  EXPECT_ERRC(p_eval(s, -0.1), Errc::LambdaOutOfRange);
}

TEST(PFunction, AdmissibleSetEnforced) {
  EXPECT_ERRC(PFunction::decreasing(0.1, 0.9), Errc::InvalidParameters);
  EXPECT_ERRC(PFunction::decreasing(1.0, 0.5), Errc::InvalidParameters);
  EXPECT_ERRC(PFunction::increasing(0.0, 0.5), Errc::InvalidParameters);
  EXPECT_ERRC(PFunction::increasing(0.5, 0.5), Errc::InvalidParameters);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-0.5, 1.5);
  for (int i = 0; i < 10000; ++i) {
    const double x1 = u(rng), x2 = u(rng);
    const bool ok = 1.0 > x1 && x1 > x2 && x2 > 0.0;
    if (ok) {
      EXPECT_NO_THROW(PFunction::decreasing(x1, x2));
    } else {
      EXPECT_ERRC(PFunction::decreasing(x1, x2), Errc::InvalidParameters);
    }
  }
}

TEST(PFunction, Monotone) {
  const auto s = PFunction::decreasing(0.8, 0.3);
  const auto b = PFunction::increasing(0.2, 0.7);
  for (int i = 0; i < 100; ++i) {
    const double l1 = i / 100.0, l2 = (i + 1) / 100.0;
    EXPECT_GT(p_eval(s, l1), p_eval(s, l2));
    EXPECT_LT(p_eval(b, l1), p_eval(b, l2));
  }
}

TEST(Mechanism, SymmetricIsHalf) {
  const auto r = run_mechanism(Environment{0.9, 0.1, 0.1, 0.9});
  EXPECT_NEAR(r.lambda_star, 0.5, 1e-9);
  EXPECT_FALSE(r.no_crossing);
}

TEST(Mechanism, TwoThirds) {
  // The buyer's lower bound must sit below b1 = 0, so its range is widened.
  Environment e{0.8, 0.2, 0.0, 0.6};
  EXPECT_FALSE(e.valid());
  e.buyer_tau = {-0.5, 1.0};
  const auto r = run_mechanism(e);
  EXPECT_NEAR(r.lambda_star, 2.0 / 3.0, 1e-8);
}

TEST(Mechanism, NoCrossing) {
  const auto r = run_mechanism(Environment{0.9, 0.6, 0.1, 0.5});
  EXPECT_TRUE(r.no_crossing);
  EXPECT_DOUBLE_EQ(r.lambda_star, 1.0);
}

TEST(Mechanism, MatchesClosedForm) {
  std::mt19937_64 rng(10);
  for (int i = 0; i < 500; ++i) {
    const auto e = random_crossing_env(rng);
    const auto r = run_mechanism(e, 1e-9);
    EXPECT_NEAR(r.lambda_star, oracle::linear_crossing(e.a1, e.a2, e.b1, e.b2), 1e-8);
    EXPECT_LT(std::abs(r.p1 - r.p2), 1e-9);
    EXPECT_LE(r.iterations, 200u);
  }
}

TEST(Mechanism, ScaleInvariant) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 100; ++i) {
    const auto e = random_crossing_env(rng);
    const double c = 0.5 + static_cast<double>(rng() % 400) / 100.0;
    Environment s{e.a1 * c, e.a2 * c, e.b1 * c, e.b2 * c, {0, c}, {0, c}};
    EXPECT_NEAR(run_mechanism(s, 1e-10).lambda_star, run_mechanism(e, 1e-10).lambda_star, 1e-8);
  }
}

TEST(Mechanism, TraceAndTolerance) {
  const auto r = run_mechanism(Environment{0.7, 0.2, 0.1, 0.8}, 1e-6);
  // Both endpoints are probed before bisection starts.
  EXPECT_EQ(r.trace.size(), r.iterations + 2u);
  EXPECT_ERRC(run_mechanism(Environment{0.7, 0.2, 0.1, 0.8}, 0.0), Errc::InvalidTolerance);
}

TEST(Mechanism, CustomGoal) {
  MechanismOptions opt;
  // Seller pressure twice the buyer's.
  opt.goal = [](double p1, double p2) { return p1 - 2 * p2; };
  const auto r = run_mechanism(Environment{0.9, 0.1, 0.1, 0.9}, opt);
  EXPECT_NEAR(0.9 - 0.8 * r.lambda_star, 2 * (0.1 + 0.8 * r.lambda_star), 1e-8);
}

TEST(Price, ScalesReserves) {
  EXPECT_EQ(price_of_good(0.5, 100), 50u);
  EXPECT_EQ(price_of_good(0.0, 12345), 0u);
  EXPECT_EQ(price_of_good(1.0, 80), 80u);
  EXPECT_EQ(price_of_good(Environment{0.9, 0.1, 0.1, 0.9}, 100), 50u);
}
