#include "collusion/global_game.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "collusion/errors.hpp"
#include "collusion/normal.hpp"

namespace collusion {

double PrizeMap::operator()(double theta) const {
  return kind == Kind::Identity ? theta : scale * std::exp(theta);
}

double PrizeMap::inverse(double omega) const {
  if (kind == Kind::Identity) return omega;
  if (!(omega > 0.0)) throw SolverError("prize_map: no theta maps to omega <= 0 under the exponential map");
  return std::log(omega / scale);
}

namespace {

// Centre and half-width of the region where the prior puts its mass.
std::pair<double, double> prior_window(const Prior& prior) {
  if (const auto* p = std::get_if<NormalPrior>(&prior)) return {p->mean, p->sd};
  const auto& u = std::get<UniformPrior>(prior);
  return {0.5 * (u.lo + u.hi), 0.5 * (u.hi - u.lo)};
}

}  // namespace

void GlobalGameSpec::validate() const {
  base.validate();
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ValidationError("global_game.sigma: must be finite and > 0");
  if (const auto* p = std::get_if<NormalPrior>(&prior)) {
    if (!std::isfinite(p->mean)) throw ValidationError("global_game.prior.mean: must be finite");
    if (!(p->sd > 0.0) || !std::isfinite(p->sd)) throw ValidationError("global_game.prior.sd: must be finite and > 0");
  } else {
    const auto& u = std::get<UniformPrior>(prior);
    if (!std::isfinite(u.lo) || !std::isfinite(u.hi) || u.lo > u.hi) {
      throw ValidationError("global_game.prior: uniform bounds must be finite with lo <= hi");
    }
  }
  if (prize_map.kind == PrizeMap::Kind::Exponential && !(prize_map.scale > 0.0)) {
    throw ValidationError("global_game.prize_map.scale: must be > 0");
  }
  if (!(solver.rel_tol > 0.0)) throw ValidationError("global_game.solver.rel_tol: must be > 0");
  if (solver.nodes < 2) throw ValidationError("global_game.solver.nodes: must be >= 2");
  if (solver.scan_points < 2) throw ValidationError("global_game.solver.scan_points: must be >= 2");
  if (solver.max_expansions < 0) throw ValidationError("global_game.solver.max_expansions: must be >= 0");
}

double Posterior::sample(double u) const {
  switch (kind) {
    case Kind::Point:
      return mean;
    case Kind::Normal:
      return mean + sd * normal_quantile(u);
    case Kind::TruncatedNormal: {
      const double a = (lo - mean) / sd;
      const double b = (hi - mean) / sd;
      double z;
      if (a > 0.0) {
        // Both bounds in the upper tail: invert the survival function.
        const double sa = normal_sf(a);
        const double p = sa - u * (sa - normal_sf(b));
        z = p > 0.0 ? -normal_quantile(p) : a;
      } else {
        const double ca = normal_cdf(a);
        const double p = ca + u * (normal_cdf(b) - ca);
        z = p > 0.0 && p < 1.0 ? normal_quantile(p) : (p <= 0.0 ? a : b);
      }
      return mean + sd * std::clamp(z, a, b);
    }
  }
  return mean;
}

Posterior posterior_given_signal(const GlobalGameSpec& spec, double signal) {
  Posterior post;
  if (const auto* p = std::get_if<NormalPrior>(&spec.prior)) {
    const double prior_prec = 1.0 / (p->sd * p->sd);
    const double signal_prec = 1.0 / (spec.sigma * spec.sigma);
    const double prec = prior_prec + signal_prec;
    post.kind = Posterior::Kind::Normal;
    post.mean = (p->mean * prior_prec + signal * signal_prec) / prec;
    post.sd = 1.0 / std::sqrt(prec);
    return post;
  }
  const auto& u = std::get<UniformPrior>(spec.prior);
  if (u.lo == u.hi) {
    post.kind = Posterior::Kind::Point;
    post.mean = u.lo;
    return post;
  }
  post.kind = Posterior::Kind::TruncatedNormal;
  post.mean = signal;
  post.sd = spec.sigma;
  post.lo = u.lo;
  post.hi = u.hi;
  return post;
}

double belief_given_cutoff(double theta, double tau, double sigma) {
  if (!(sigma > 0.0)) throw ValidationError("sigma: must be > 0");
  return normal_sf((tau - theta) / sigma);
}

namespace {

double truncated_expectation(const std::function<double(double)>& f, const Posterior& post, double scale) {
  const double d = post.mean < post.lo ? post.lo - post.mean : (post.mean > post.hi ? post.mean - post.hi : 0.0);
  const double reach = std::sqrt(d * d + 80.0 * post.sd * post.sd);
  const double a = std::max(post.lo, post.mean - reach);
  const double b = std::min(post.hi, post.mean + reach);
  // Integrate over the offset x = t - c from the support point c nearest the
  // mean. The density is taken relative to its value at c, so far-away
  // signals do not underflow, and x keeps full precision where the density
  // is steep.
  const double c = std::clamp(post.mean, post.lo, post.hi);
  const double shift = 2.0 * (c - post.mean);
  const auto weight = [&](double x) { return std::exp(-x * (x + shift) / (2.0 * post.sd * post.sd)); };
  const AdaptiveResult mass = adaptive_integrate(weight, a - c, b - c, 0.0, 1e-13, 15, 30);
  const double abs_tol = 1e-13 * mass.value * scale;
  const AdaptiveResult moment =
      adaptive_integrate([&](double x) { return weight(x) * f(c + x); }, a - c, b - c, abs_tol, 1e-12, 15, 30);
  if (!mass.converged || !moment.converged || !(mass.value > 0.0)) {
    std::ostringstream msg;
    msg << "quadrature did not converge: 15-node Legendre panels, " << mass.intervals << " + " << moment.intervals
        << " intervals on [" << a << ", " << b << "]";
    throw SolverError(msg.str());
  }
  return moment.value / mass.value;
}

// Validated spec plus the quadrature rule, built once per solve.
class PayoffIntegrator {
 public:
  explicit PayoffIntegrator(const GlobalGameSpec& spec)
      : spec_((spec.validate(), spec)),
        payoff_(PayoffConstants::from(spec.base)),
        rule_(std::holds_alternative<NormalPrior>(spec.prior) ? gauss_hermite(spec.solver.nodes) : QuadratureRule{}) {}

  double operator()(double signal, double others_cutoff) const {
    const auto integrand = [&](double theta) {
      const double alpha = belief_given_cutoff(theta, others_cutoff, spec_.sigma);
      return payoff_.u_join(alpha, spec_.prize_map(theta));
    };
    const Posterior post = posterior_given_signal(spec_, signal);
    switch (post.kind) {
      case Posterior::Kind::Point:
        return integrand(post.mean);
      case Posterior::Kind::Normal:
        return normal_expectation(integrand, post.mean, post.sd, rule_);
      case Posterior::Kind::TruncatedNormal: {
        const double scale =
            std::max({payoff_.F_eff, std::abs(spec_.prize_map(post.lo)), std::abs(spec_.prize_map(post.hi))});
        return truncated_expectation(integrand, post, scale);
      }
    }
    return 0.0;
  }

 private:
  const GlobalGameSpec& spec_;
  PayoffConstants payoff_;
  QuadratureRule rule_;
};

}  // namespace

double conditional_payoff(const GlobalGameSpec& spec, double signal, double others_cutoff) {
  return PayoffIntegrator(spec)(signal, others_cutoff);
}

double conditional_payoff_at_signal(const GlobalGameSpec& spec, double tau) {
  return conditional_payoff(spec, tau, tau);
}

Eigen::VectorXd conditional_payoff_profile(const GlobalGameSpec& spec, double lo, double hi, int points) {
  if (points < 2) throw ValidationError("points: must be >= 2");
  const PayoffIntegrator integrate(spec);
  const Eigen::VectorXd taus = Eigen::VectorXd::LinSpaced(points, lo, hi);
  return taus.unaryExpr([&](double tau) { return integrate(tau, tau); });
}

std::string to_string(CutoffOutcome outcome) {
  switch (outcome) {
    case CutoffOutcome::Solved: return "solved";
    case CutoffOutcome::AlwaysDeterred: return "always_deterred";
    case CutoffOutcome::AlwaysCollude: return "always_collude";
    case CutoffOutcome::NoCrossing: return "no_crossing";
  }
  return "unknown";
}

CutoffSolution solve_cutoff(const GlobalGameSpec& spec) {
  spec.validate();
  CutoffSolution sol;
  sol.theta_star = theta_star(spec);
  const double F = spec.base.F_eff();
  const PayoffIntegrator integrate(spec);
  const auto f = [&](double tau) { return integrate(tau, tau); };

  auto [centre, half] = prior_window(spec.prior);
  double width = half + 10.0 * spec.sigma;
  const int N = spec.solver.scan_points;

  for (int expansion = 0;; ++expansion) {
    sol.diagnostics.expansions = expansion;
    sol.diagnostics.scan_lo = centre - width;
    sol.diagnostics.scan_hi = centre + width;
    const Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(N + 1, centre - width, centre + width);
    const Eigen::VectorXd values = grid.unaryExpr(f);

    for (int j = 0; j < N; ++j) {
      if (!(values(j) < 0.0 && values(j + 1) >= 0.0)) continue;
      double lo = grid(j), hi = grid(j + 1);
      double f_lo = values(j), f_hi = values(j + 1);
      sol.diagnostics.bracket_lo = lo;
      sol.diagnostics.bracket_hi = hi;
      int it = 0;
      for (; it < 200; ++it) {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi) break;
        const double f_mid = f(mid);
        if (f_mid < 0.0) {
          lo = mid;
          f_lo = f_mid;
        } else {
          hi = mid;
          f_hi = f_mid;
        }
      }
      sol.outcome = CutoffOutcome::Solved;
      sol.tau = std::abs(f_lo) < std::abs(f_hi) ? lo : hi;
      sol.residual = std::abs(f_lo) < std::abs(f_hi) ? f_lo : f_hi;
      sol.diagnostics.iterations = it;
      const double scale = std::max(std::abs(spec.prize_map(sol.tau)), F);
      sol.diagnostics.converged = std::abs(sol.residual) <= spec.solver.rel_tol * scale;
      return sol;
    }

    if (expansion == spec.solver.max_expansions) {
      if ((values.array() < 0.0).all()) {
        sol.outcome = CutoffOutcome::AlwaysDeterred;
      } else if ((values.array() >= 0.0).all()) {
        sol.outcome = CutoffOutcome::AlwaysCollude;
      } else {
        sol.outcome = CutoffOutcome::NoCrossing;
      }
      return sol;
    }
    width *= 2.0;
  }
}

double theta_star(int K, double p_K, double F_eff, const PrizeMap& prize_map) {
  if (K < 1) throw ValidationError("K: must be >= 1");
  if (!(p_K >= 0.0 && p_K < 1.0)) throw ValidationError("p_K: must lie in [0, 1)");
  if (!(F_eff >= 0.0)) throw ValidationError("F_eff: must be >= 0");
  const double target = K * p_K * F_eff / (1.0 - p_K);
  const auto g = [&](double theta) { return prize_map(theta) - target; };

  const double guess = prize_map.inverse(target);
  double step = 1e-3 * std::max(1.0, std::abs(guess));
  double lo = guess - step, hi = guess + step;
  for (int i = 0; !(g(lo) < 0.0 && g(hi) >= 0.0); ++i) {
    if (i == 60) throw SolverError("theta_star: no root in range");
    step *= 2.0;
    lo = guess - step;
    hi = guess + step;
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    (g(mid) < 0.0 ? lo : hi) = mid;
  }
  const double root = std::abs(g(lo)) < std::abs(g(hi)) ? lo : hi;
  if (std::abs(root - guess) > 1e-9 * std::max(1.0, std::abs(guess))) {
    throw SolverError("theta_star: root finder disagrees with the closed-form inverse");
  }
  return root;
}

double theta_star(const GlobalGameSpec& spec) {
  spec.validate();
  return theta_star(spec.base.K, spec.base.p_K(), spec.base.F_eff(), spec.prize_map);
}

double vanishing_noise_cutoff(const GlobalGameSpec& spec) {
  spec.validate();
  const ModelParams& m = spec.base;
  const double mean_pi = static_cast<double>(m.n - m.K + 1) / m.n;
  const double p_tilde = m.p_tilde();
  const double p_K = m.p_K();
  const double F = m.F_eff();
  const double omega = m.K * (p_tilde * F + mean_pi * (p_K - p_tilde) * F) / (mean_pi * (1.0 - p_K));
  return spec.prize_map.inverse(omega);
}

}  // namespace collusion
