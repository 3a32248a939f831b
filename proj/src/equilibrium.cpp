#include "collusion/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "collusion/errors.hpp"

namespace collusion {

namespace {

void require_probability(double x, const char* field) {
  if (!(x >= 0.0 && x <= 1.0)) throw ValidationError(std::string(field) + ": must lie in [0, 1]");
}

void require_open_probability(double x, const char* field) {
  if (!(x > 0.0 && x < 1.0)) throw ValidationError(std::string(field) + ": must lie in (0, 1)");
}

void require_nonnegative(double x, const char* field) {
  if (!(x >= 0.0) || !std::isfinite(x)) throw ValidationError(std::string(field) + ": must be finite and >= 0");
}

void require_positive(double x, const char* field) {
  if (!(x > 0.0) || !std::isfinite(x)) throw ValidationError(std::string(field) + ": must be finite and > 0");
}

double corner_value(int K, double p_K, double omega, double F_eff) {
  return (1.0 - p_K) / K * omega - p_K * F_eff;
}

// Smallest K in [k_lo, k_hi] whose all-join payoff is <= 0, by direct search.
std::optional<int> search_K_star(const ModelParams& params, int k_lo, int k_hi, bool zipf_even) {
  const double omega = params.omega();
  for (int k = k_lo; k <= k_hi; ++k) {
    const int n = zipf_even ? 2 * k - 2 : params.n;
    if (n < 2 || k > n) continue;
    const double F = effective_sanction(params.sanctions, n, k);
    if (corner_value(k, detection_prob(params.q, k), omega, F) <= 0.0) return k;
  }
  return std::nullopt;
}

}  // namespace

double success_prob(int n, int K, double alpha) {
  if (n < 2 || n > kMaxProviders) throw ValidationError("n: must lie in [2, " + std::to_string(kMaxProviders) + "]");
  if (K < 1 || K > n) throw ValidationError("K: must satisfy 1 <= K <= n");
  require_probability(alpha, "alpha");
  const int m = n - 1;
  double coeff = 1.0;  // C(m, j)
  double total = 0.0;
  for (int j = 0; j <= m; ++j) {
    if (j > 0) coeff = coeff * (m - j + 1) / j;
    if (j >= K - 1) total += coeff * std::pow(alpha, j) * std::pow(1.0 - alpha, m - j);
  }
  return std::clamp(total, 0.0, 1.0);
}

PayoffConstants PayoffConstants::from(const ModelParams& params) {
  params.validate();
  return {params.n, params.K, params.p_tilde(), params.p_K(), params.F_eff()};
}

double PayoffConstants::u_join(double alpha, double omega) const {
  const double pi = success_prob(n, K, alpha);
  return pi * (1.0 - p_K) / K * omega - (p_tilde + pi * (p_K - p_tilde)) * F_eff;
}

PayoffBreakdown joiner_payoff(const ModelParams& params, double alpha) {
  params.validate();
  return joiner_payoff(params, alpha, params.omega());
}

PayoffBreakdown joiner_payoff(const ModelParams& params, double alpha, double omega) {
  params.validate();
  require_probability(alpha, "alpha");
  const double p_tilde = params.p_tilde();
  const double p_K = params.p_K();
  const double F = params.F_eff();

  PayoffBreakdown b;
  b.alpha = alpha;
  b.pi = success_prob(params.n, params.K, alpha);
  b.p_bar = p_tilde + b.pi * (p_K - p_tilde);
  b.expected_prize = b.pi * (1.0 - p_K) / params.K * omega;
  b.expected_sanction = b.p_bar * F;
  b.u_join = b.expected_prize - b.expected_sanction;
  b.attempt_cost = p_tilde * F;
  b.success_bonus = (1.0 - p_K) / params.K * omega - (p_K - p_tilde) * F;
  return b;
}

bool group_rationality(const ModelParams& params) {
  params.validate();
  return params.omega() / (params.K * params.F_eff()) > params.q / (1.0 - params.q);
}

EquilibriumReport corner_test(const ModelParams& params) {
  params.validate();
  EquilibriumReport r;
  r.no_join_is_equilibrium = true;
  r.u_join_at_one = joiner_payoff(params, 1.0).u_join;
  r.all_join_is_equilibrium = r.u_join_at_one >= 0.0;
  r.group_rationality_holds = group_rationality(params);
  return r;
}

EquilibriumReport analyze(const ModelParams& params) {
  EquilibriumReport r = corner_test(params);
  const double omega = params.omega();
  const double F = params.F_eff();

  if (params.sanctions.is_zipf() && params.n % 2 == 1) {
    const KThreshold t = deterrence_K_threshold(omega, params.sanctions.zipf_scale(), params.q);
    r.K_star = t.ceiling;
    r.K_star_real = t.value;
    r.thresholds_closed_form = true;
  } else if (params.sanctions.is_zipf()) {
    r.K_star = search_K_star(params, 2, kMaxProviders / 2 + 1, true);
  } else {
    r.K_star = search_K_star(params, 1, params.n, false);
  }
  r.q_star = deterrence_q_threshold_general(omega, F, params.K);
  r.V_safe = v_safe(params);
  return r;
}

double zipf_corner_value(double omega, double C, double q, int K) {
  if (K < 1) throw ValidationError("K: must be >= 1");
  require_open_probability(q, "q");
  return ((omega + C) * std::pow(1.0 - q, K) - C) / K;
}

KThreshold deterrence_K_threshold(double omega, double C, double q) {
  require_nonnegative(omega, "omega");
  require_positive(C, "C");
  require_open_probability(q, "q");
  KThreshold t;
  t.value = std::log(C / (omega + C)) / std::log(1.0 - q);
  if (t.value == 0.0) t.value = 0.0;  // drop the sign of -0
  // Settle the integer against the corner value itself so that rounding in the
  // logarithms cannot move an exact boundary by one.
  int k = std::max(1, static_cast<int>(std::ceil(t.value)));
  while (k > 1 && zipf_corner_value(omega, C, q, k - 1) <= 0.0) --k;
  while (zipf_corner_value(omega, C, q, k) > 0.0) ++k;
  t.ceiling = k;
  return t;
}

double deterrence_q_threshold(double omega, double C, int K) {
  require_nonnegative(omega, "omega");
  require_positive(C, "C");
  if (K < 1) throw ValidationError("K: must be >= 1");
  return 1.0 - std::pow(C / (omega + C), 1.0 / K);
}

double deterrence_q_threshold_general(double omega, double F_eff, int K) {
  require_nonnegative(omega, "omega");
  require_positive(F_eff, "F_eff");
  if (K < 1) throw ValidationError("K: must be >= 1");
  const double KF = K * F_eff;
  return 1.0 - std::pow(KF / (omega + KF), 1.0 / K);
}

double v_safe(const ModelParams& params) {
  params.validate();
  return v_safe(params.K, params.p_K(), params.beta, params.F_eff());
}

double v_safe(int K, double p_K, double beta, double F_eff) {
  if (K < 1) throw ValidationError("K: must be >= 1");
  if (!(p_K >= 0.0 && p_K < 1.0)) throw ValidationError("p_K: must lie in [0, 1)");
  if (!(beta > 0.0 && beta <= 1.0)) throw ValidationError("beta: must lie in (0, 1]");
  require_nonnegative(F_eff, "F_eff");
  return K / ((1.0 - p_K) * beta) * p_K * F_eff;
}

double q_from_coalition_detection(double p_K, int K) {
  require_open_probability(p_K, "p_K");
  if (K < 1) throw ValidationError("K: must be >= 1");
  return 1.0 - std::pow(1.0 - p_K, 1.0 / K);
}

}  // namespace collusion
