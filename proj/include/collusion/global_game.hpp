#pragma once

// Dispersed-information version of the game. The fundamental theta has a
// prior, each provider sees s_i = theta + sigma * e_i with standard normal
// noise, and a symmetric strategy is a cutoff: join iff s_i >= tau.
//
// The fundamental enters payoffs only through the prize, omega = prize_map(theta);
// sanctions and detection do not depend on theta.

#include <Eigen/Dense>
#include <string>
#include <variant>

#include "collusion/equilibrium.hpp"
#include "collusion/model.hpp"
#include "collusion/quadrature.hpp"

namespace collusion {

struct NormalPrior {
  double mean = 0.0;
  double sd = 1.0;
  bool operator==(const NormalPrior&) const = default;
};

// lo == hi is allowed and means a point mass (test harness only; the prior
// then lacks full support).
struct UniformPrior {
  double lo = 0.0;
  double hi = 1.0;
  bool operator==(const UniformPrior&) const = default;
};

using Prior = std::variant<NormalPrior, UniformPrior>;

struct PrizeMap {
  enum class Kind { Identity, Exponential };
  Kind kind = Kind::Identity;
  double scale = 1.0;  // Exponential: omega = scale * exp(theta)

  double operator()(double theta) const;
  // Throws SolverError when omega is outside the map's range.
  double inverse(double omega) const;
  bool operator==(const PrizeMap&) const = default;
};

struct CutoffSolverOptions {
  double rel_tol = 1e-8;
  int nodes = 64;          // Hermite order for Normal priors
  int scan_points = 400;   // sign scan across the bracket
  int max_expansions = 8;  // bracket doublings before giving up
  bool operator==(const CutoffSolverOptions&) const = default;
};

struct GlobalGameSpec {
  ModelParams base;
  Prior prior = NormalPrior{};
  double sigma = 1.0;
  PrizeMap prize_map;
  CutoffSolverOptions solver;

  void validate() const;
  bool operator==(const GlobalGameSpec&) const = default;
};

// Distribution of theta given one provider's signal.
struct Posterior {
  enum class Kind { Normal, TruncatedNormal, Point };
  Kind kind = Kind::Normal;
  double mean = 0.0;  // Normal / TruncatedNormal location, Point value
  double sd = 0.0;
  double lo = 0.0;    // TruncatedNormal support
  double hi = 0.0;

  // Maps a uniform draw in (0, 1) to a posterior draw by inversion.
  double sample(double u) const;
};

Posterior posterior_given_signal(const GlobalGameSpec& spec, double signal);

// Probability that another provider joins when everyone uses cutoff tau.
double belief_given_cutoff(double theta, double tau, double sigma);

// E[U_J(alpha(theta; others_cutoff); theta) | s_i = signal].
double conditional_payoff(const GlobalGameSpec& spec, double signal, double others_cutoff);

// The equilibrium condition: conditional_payoff(spec, tau, tau).
double conditional_payoff_at_signal(const GlobalGameSpec& spec, double tau);

// conditional_payoff_at_signal on `points` equally spaced cutoffs in [lo, hi].
Eigen::VectorXd conditional_payoff_profile(const GlobalGameSpec& spec, double lo, double hi, int points);

enum class CutoffOutcome {
  Solved,
  AlwaysDeterred,  // conditional payoff negative on every scanned cutoff
  AlwaysCollude,   // non-negative everywhere
  NoCrossing,      // mixed signs but no upward crossing
};

std::string to_string(CutoffOutcome outcome);

struct CutoffDiagnostics {
  int iterations = 0;
  int expansions = 0;
  double bracket_lo = 0.0;  // bisection bracket
  double bracket_hi = 0.0;
  double scan_lo = 0.0;     // final scan window
  double scan_hi = 0.0;
  bool converged = false;
};

struct CutoffSolution {
  CutoffOutcome outcome = CutoffOutcome::NoCrossing;
  double tau = 0.0;
  double residual = 0.0;
  double theta_star = 0.0;
  CutoffDiagnostics diagnostics;
};

// Lowest cutoff at which the equilibrium condition crosses zero from below.
// A scan locates the crossing and bisection refines it.
CutoffSolution solve_cutoff(const GlobalGameSpec& spec);

// Fundamental at which all-join breaks even: ((1-p_K)/K) omega(theta) = p_K F_eff.
double theta_star(const GlobalGameSpec& spec);
double theta_star(int K, double p_K, double F_eff, const PrizeMap& prize_map);

// Cutoff selected as sigma -> 0 under a diffuse prior: there the belief
// alpha is uniform on [0, 1], so the success probability averages to
// (n-K+1)/n and the cutoff solves U_J at that average.
double vanishing_noise_cutoff(const GlobalGameSpec& spec);

}  // namespace collusion
