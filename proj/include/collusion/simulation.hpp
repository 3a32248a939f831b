#pragma once

// Agent-based Monte Carlo of the collusion game. Each replication draws the
// fundamental, the n join decisions and per-joiner detection, and records
// realized payoffs. Used to check the closed forms and the cutoff solver.

#include <cstdint>
#include <optional>
#include <variant>

#include "collusion/global_game.hpp"

namespace collusion {

struct JoinNever {
  bool operator==(const JoinNever&) const = default;
};
struct JoinAlways {
  bool operator==(const JoinAlways&) const = default;
};
// Join iff own signal >= tau.
struct CutoffStrategy {
  double tau = 0.0;
  bool operator==(const CutoffStrategy&) const = default;
};
// Each provider joins independently with probability alpha (test mode).
struct RandomizedStrategy {
  double alpha = 0.5;
  bool operator==(const RandomizedStrategy&) const = default;
};

using Strategy = std::variant<JoinNever, JoinAlways, CutoffStrategy, RandomizedStrategy>;

struct SimConfig {
  GlobalGameSpec spec;
  // Complete-information mode: theta held fixed instead of drawn from the prior.
  std::optional<double> fixed_theta;
  std::uint64_t replications = 100000;
  std::uint64_t seed = 0;
  Strategy strategy = JoinAlways{};
  // 0 picks the hardware concurrency. Output does not depend on it.
  int threads = 0;

  void validate() const;
  bool operator==(const SimConfig&) const = default;
};

struct Estimate {
  double mean = 0.0;
  double se = 0.0;
};

struct SimResult {
  std::uint64_t replications = 0;
  double empirical_join_rate = 0.0;
  // Share of joiners whose attempt reached K members; a joiner's-eye success
  // rate, comparable to success_prob(n, K, alpha).
  double empirical_success_rate = 0.0;
  double empirical_detection_rate = 0.0;
  Estimate mean_realized_payoff;  // per joiner
  // Detection among joiners of successful attempts (-> p_K) and of failed
  // attempts (-> p~).
  Estimate success_detection_rate;
  Estimate attempt_detection_rate;
  Estimate success_rate_estimate;  // empirical_success_rate with its SE
  // Share of successful attempts with more than K joiners. Every joiner of a
  // successful attempt is paid omega/K, so these replications pay out more
  // than omega in total.
  double excess_joiner_rate = 0.0;
  // Cutoff strategies only.
  std::optional<Estimate> deviation_gain;
};

SimResult simulate(const SimConfig& config);

// Payoff from joining, net of not joining (which pays zero), for a provider
// whose signal equals the cutoff while the others play it. Common random
// numbers make the difference the realized joining payoff.
Estimate estimate_deviation_gain(const SimConfig& config);

}  // namespace collusion
