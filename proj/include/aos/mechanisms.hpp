#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "aos/core/error.hpp"

namespace aos::mech {

enum class PKind : std::uint8_t { Decreasing, Increasing };

/// Closed interval a p-function's values live in.
struct TauRange {
  double min = 0.0;
  double max = 1.0;
};

/// Monotone pressure function over lambda in [0,1], fixed by two numbers.
/// Decreasing (seller): tau.max > first > second > tau.min.
/// Increasing (buyer):  tau.min < first < second < tau.max.
class PFunction {
 public:
  static PFunction decreasing(double a1, double a2, TauRange tau = {}) { return PFunction(PKind::Decreasing, a1, a2, tau); }
  static PFunction increasing(double b1, double b2, TauRange tau = {}) { return PFunction(PKind::Increasing, b1, b2, tau); }

  PKind kind() const noexcept { return kind_; }
  double first() const noexcept { return first_; }
  double second() const noexcept { return second_; }
  TauRange tau() const noexcept { return tau_; }

  static bool admissible(PKind kind, double x1, double x2, TauRange tau) noexcept {
    if (!std::isfinite(x1) || !std::isfinite(x2) || !std::isfinite(tau.min) || !std::isfinite(tau.max)) return false;
    return kind == PKind::Decreasing ? (tau.max > x1 && x1 > x2 && x2 > tau.min)
                                     : (tau.min < x1 && x1 < x2 && x2 < tau.max);
  }

 private:
  PFunction(PKind kind, double x1, double x2, TauRange tau) : kind_(kind), first_(x1), second_(x2), tau_(tau) {
    if (!admissible(kind, x1, x2, tau))
      throw Error(Errc::InvalidParameters, "p-function parameters (" + std::to_string(x1) + ", " + std::to_string(x2) +
                                               ") outside the admissible set");
  }

  PKind kind_;
  double first_;
  double second_;
  TauRange tau_;
};

/// Linear interpolation from first (lambda = 0) to second (lambda = 1).
inline double p_eval(const PFunction& p, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw Error(Errc::LambdaOutOfRange, "lambda " + std::to_string(lambda));
  const double v = p.first() + (p.second() - p.first()) * lambda;
  return std::clamp(v, p.tau().min, p.tau().max);
}

/// theta = (a1, a2, b1, b2): seller P1 from (a1, a2), buyer P2 from (b1, b2).
struct Environment {
  double a1 = 0, a2 = 0, b1 = 0, b2 = 0;
  TauRange seller_tau{};
  TauRange buyer_tau{};

  PFunction seller() const { return PFunction::decreasing(a1, a2, seller_tau); }
  PFunction buyer() const { return PFunction::increasing(b1, b2, buyer_tau); }

  bool valid() const noexcept {
    return PFunction::admissible(PKind::Decreasing, a1, a2, seller_tau) &&
           PFunction::admissible(PKind::Increasing, b1, b2, buyer_tau);
  }
};

/// Agent callback: reports its pressure at the proposed lambda.
using Agent = std::function<double(double)>;
/// Signed imbalance between the two reports; the mechanism drives it to zero.
using Goal = std::function<double(double, double)>;

inline double balance_goal(double p1, double p2) { return p1 - p2; }

struct TracePoint {
  double lambda;
  double p1;
  double p2;
};

struct MechanismResult {
  double lambda_star = 0;
  double p1 = 0;
  double p2 = 0;
  std::uint32_t iterations = 0;
  bool no_crossing = false;
  std::vector<TracePoint> trace;
};

struct MechanismOptions {
  double tolerance = 1e-9;
  std::uint32_t max_iterations = 200;
  Goal goal = balance_goal;
};

/// Bisection on lambda in [0,1]. Each step M proposes a lambda and both
/// agents report. Stops once |goal| < tol and the bracket is narrower than
/// tol, or at max_iterations. Without a sign change on [0,1] the endpoint
/// with the smaller |goal| is returned and flagged.
inline MechanismResult run_mechanism(const Agent& seller, const Agent& buyer, const MechanismOptions& opt = {}) {
  if (!(opt.tolerance > 0.0) || !std::isfinite(opt.tolerance))
    throw Error(Errc::InvalidTolerance, "tolerance must be positive");
  MechanismResult r;
  auto ask = [&](double lambda) {
    const double p1 = seller(lambda);
    const double p2 = buyer(lambda);
    r.trace.push_back({lambda, p1, p2});
    return TracePoint{lambda, p1, p2};
  };
  auto finish = [&](TracePoint t) {
    r.lambda_star = t.lambda;
    r.p1 = t.p1;
    r.p2 = t.p2;
    return r;
  };

  const TracePoint lo_pt = ask(0.0);
  const TracePoint hi_pt = ask(1.0);
  const double g_lo = opt.goal(lo_pt.p1, lo_pt.p2);
  const double g_hi = opt.goal(hi_pt.p1, hi_pt.p2);
  if (g_lo == 0.0) return finish(lo_pt);
  if (g_hi == 0.0) return finish(hi_pt);
  if ((g_lo > 0) == (g_hi > 0)) {
    r.no_crossing = true;
    return finish(std::abs(g_lo) <= std::abs(g_hi) ? lo_pt : hi_pt);
  }

  double lo = 0.0;
  double hi = 1.0;
  const bool lo_positive = g_lo > 0;
  TracePoint mid_pt = lo_pt;
  while (r.iterations < opt.max_iterations) {
    ++r.iterations;
    const double mid = lo + (hi - lo) / 2;
    mid_pt = ask(mid);
    const double g = opt.goal(mid_pt.p1, mid_pt.p2);
    if (g == 0.0) break;
    if ((g > 0) == lo_positive)
      lo = mid;
    else
      hi = mid;
    if (std::abs(g) < opt.tolerance && hi - lo < opt.tolerance) break;
  }
  return finish(mid_pt);
}

inline MechanismResult run_mechanism(const Environment& env, const MechanismOptions& opt = {}) {
  const PFunction s = env.seller();
  const PFunction b = env.buyer();
  return run_mechanism([&](double l) { return p_eval(s, l); }, [&](double l) { return p_eval(b, l); }, opt);
}

inline MechanismResult run_mechanism(const Environment& env, double tolerance) {
  MechanismOptions opt;
  opt.tolerance = tolerance;
  return run_mechanism(env, opt);
}

/// Price as a share of the buyer's reserves: lambda* = 0 is free, 1 is everything.
inline std::uint64_t price_of_good(double lambda_star, std::uint64_t buyer_reserves) {
  if (!(lambda_star >= 0.0 && lambda_star <= 1.0))
    throw Error(Errc::LambdaOutOfRange, "lambda " + std::to_string(lambda_star));
  const long double v = static_cast<long double>(lambda_star) * static_cast<long double>(buyer_reserves);
  return static_cast<std::uint64_t>(std::min<long double>(std::roundl(v), static_cast<long double>(buyer_reserves)));
}

inline std::uint64_t price_of_good(const Environment& env, std::uint64_t buyer_reserves, const MechanismOptions& opt = {}) {
  return price_of_good(run_mechanism(env, opt).lambda_star, buyer_reserves);
}

}  // namespace aos::mech
