#pragma once

// Complete-information game: success probability, the joiner's payoff and
// its two decompositions, corner equilibria, Zipf closed forms, deterrence
// thresholds and the conservative design bound on secured value.

#include <optional>

#include "collusion/model.hpp"

namespace collusion {

struct PayoffBreakdown {
  double alpha = 0.0;
  double pi = 0.0;       // Pr[Bin(n-1, alpha) >= K-1]
  double p_bar = 0.0;    // p~ + pi (p_K - p~)
  double expected_prize = 0.0;
  double expected_sanction = 0.0;
  double u_join = 0.0;   // expected_prize - expected_sanction
  double attempt_cost = 0.0;   // p~ F_eff
  double success_bonus = 0.0;  // (1-p_K)/K omega - (p_K - p~) F_eff

  // The same payoff assembled as -attempt_cost + pi * success_bonus.
  double u_join_attempt_form() const { return -attempt_cost + pi * success_bonus; }
};

// Real-valued deterrence threshold together with the smallest deterring integer.
struct KThreshold {
  double value = 0.0;
  int ceiling = 1;
};

struct EquilibriumReport {
  bool no_join_is_equilibrium = true;
  bool all_join_is_equilibrium = false;
  double u_join_at_one = 0.0;
  bool group_rationality_holds = false;
  std::optional<int> K_star;
  std::optional<double> K_star_real;  // closed-form threshold, odd-n Zipf only
  std::optional<double> q_star;
  double V_safe = 0.0;
  // True when K_star comes from the odd-n Zipf closed form, false when it
  // comes from integer search on the corner test.
  bool thresholds_closed_form = false;
};

double success_prob(int n, int K, double alpha);

// Validated scalars of the payoff, for evaluating U_J many times at
// varying (alpha, omega).
struct PayoffConstants {
  int n = 0;
  int K = 0;
  double p_tilde = 0.0;
  double p_K = 0.0;
  double F_eff = 0.0;

  static PayoffConstants from(const ModelParams& params);
  double u_join(double alpha, double omega) const;
};

PayoffBreakdown joiner_payoff(const ModelParams& params, double alpha);
// Same, with the prize omega supplied directly instead of beta * V.
PayoffBreakdown joiner_payoff(const ModelParams& params, double alpha, double omega);

// omega / (K F_eff) > q / (1 - q).
bool group_rationality(const ModelParams& params);

// Corner fields only (no thresholds, V_safe left at zero).
EquilibriumReport corner_test(const ModelParams& params);

// Corner test plus deterrence thresholds and V_safe.
EquilibriumReport analyze(const ModelParams& params);

// U_J(1) under a Zipf profile with F_eff = C/K: ((omega+C)(1-q)^K - C) / K.
double zipf_corner_value(double omega, double C, double q, int K);

// All-join is deterred for every integer K >= value (odd-n Zipf).
KThreshold deterrence_K_threshold(double omega, double C, double q);

// Smallest q deterring all-join at fixed K (odd-n Zipf).
double deterrence_q_threshold(double omega, double C, int K);

// Smallest q deterring all-join at fixed K for any profile:
// 1 - (K F_eff / (omega + K F_eff))^(1/K).
double deterrence_q_threshold_general(double omega, double F_eff, int K);

// Largest stock for which joining is unprofitable even with assured success.
double v_safe(const ModelParams& params);
double v_safe(int K, double p_K, double beta, double F_eff);

// Per-member q that yields coalition detection p_K at size K.
double q_from_coalition_detection(double p_K, int K);

}  // namespace collusion
