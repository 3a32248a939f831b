#include <doctest.h>

#include <cmath>
#include <random>

#include "collusion/errors.hpp"
#include "collusion/global_game.hpp"
#include "oracles.hpp"

using namespace collusion;

namespace {

ModelParams base_model() {
  ModelParams m;
  m.n = 5;
  m.K = 3;
  m.q = q_from_coalition_detection(0.15, 3);
  m.beta = 0.06;
  m.V = 1190.0;
  m.sanctions = SanctionProfile::homogeneous(135.0, 5);
  return m;
}

GlobalGameSpec normal_spec(double mean, double sd, double sigma) {
  GlobalGameSpec g;
  g.base = base_model();
  g.prior = NormalPrior{mean, sd};
  g.sigma = sigma;
  return g;
}

}  // namespace

TEST_CASE("break-even fundamental") {
  const GlobalGameSpec g = normal_spec(70.0, 20.0, 5.0);
  CHECK(theta_star(g) == doctest::Approx(3 * 0.15 * 135 / 0.85).epsilon(1e-12));
  CHECK(theta_star(g) == doctest::Approx(71.4706).epsilon(1e-6));
  const PrizeMap e{PrizeMap::Kind::Exponential, 2.0};
  CHECK(e(theta_star(3, 0.15, 135.0, e)) == doctest::Approx(3 * 0.15 * 135 / 0.85).epsilon(1e-12));
}

TEST_CASE("belief of another provider") {
  CHECK(belief_given_cutoff(10.0, 10.0, 2.0) == doctest::Approx(0.5));
  CHECK(belief_given_cutoff(12.0, 10.0, 2.0) == doctest::Approx(0.841344746).epsilon(1e-9));
  CHECK(belief_given_cutoff(-100.0, 10.0, 1.0) < 1e-300);
}

TEST_CASE("normal posterior matches prior x likelihood") {
  const GlobalGameSpec g = normal_spec(71.47, 20.0, 5.0);
  for (double s : {30.0, 71.0, 140.0}) {
    const Posterior p = posterior_given_signal(g, s);
    const auto w = [&](double t) { return oracle::phi((t - 71.47) / 20.0) * oracle::phi((s - t) / 5.0); };
    const double z = oracle::simpson(w, -200, 400, 20000);
    const double m = oracle::simpson([&](double t) { return t * w(t); }, -200, 400, 20000) / z;
    const double v = oracle::simpson([&](double t) { return (t - m) * (t - m) * w(t); }, -200, 400, 20000) / z;
    CHECK(p.mean == doctest::Approx(m).epsilon(1e-10));
    CHECK(p.sd == doctest::Approx(std::sqrt(v)).epsilon(1e-8));
  }
}

TEST_CASE("conditional payoff matches numerical integration, normal prior") {
  const GlobalGameSpec g = normal_spec(71.47, 20.0, 5.0);
  const double q = g.base.q;
  for (double s : {60.0, 90.0, 120.0}) {
    for (double tau : {70.0, 100.0, 130.0}) {
      const double got = conditional_payoff(g, s, tau);
      const double ref = oracle::conditional_payoff_normal(5, 3, q, 2, 135.0, 71.47, 20.0, 5.0, s, tau);
      CHECK(std::abs(got - ref) <= 1e-8 * 135.0);
    }
  }
}

TEST_CASE("conditional payoff with a uniform prior") {
  GlobalGameSpec g = normal_spec(0, 1, 4.0);
  g.prior = UniformPrior{0.0, 300.0};
  const double q = g.base.q;
  for (double s : {-5.0, 3.0, 100.0, 298.0, 320.0}) {
    const double tau = 100.0;
    const double lo = std::max(0.0, s - 60.0), hi = std::min(300.0, s + 60.0);
    const auto w = [&](double t) { return oracle::phi((s - t) / 4.0); };
    const auto fw = [&](double t) {
      return w(t) * oracle::u_join(5, 3, q, 2, 135.0, t, oracle::upper_tail((tau - t) / 4.0));
    };
    const double ref = oracle::simpson(fw, lo, hi, 20000) / oracle::simpson(w, lo, hi, 20000);
    CHECK(std::abs(conditional_payoff(g, s, tau) - ref) <= 1e-8 * 300.0);
  }
}

TEST_CASE("point prior evaluates the payoff at that fundamental") {
  GlobalGameSpec g = normal_spec(0, 1, 3.0);
  g.prior = UniformPrior{90.0, 90.0};
  const double alpha = oracle::upper_tail((95.0 - 90.0) / 3.0);
  CHECK(conditional_payoff(g, 50.0, 95.0) ==
        doctest::Approx(oracle::u_join(5, 3, g.base.q, 2, 135.0, 90.0, alpha)).epsilon(1e-12));
}

TEST_CASE("payoff profile agrees with pointwise evaluation") {
  const GlobalGameSpec g = normal_spec(71.47, 200.0, 5.0);
  const Eigen::VectorXd prof = conditional_payoff_profile(g, 80.0, 120.0, 5);
  for (int i = 0; i < 5; ++i) CHECK(prof(i) == doctest::Approx(conditional_payoff_at_signal(g, 80.0 + 10.0 * i)));
}

TEST_CASE("solved cutoff is an upward zero of the equilibrium condition") {
  for (double sigma : {5.0, 1.0}) {
    const GlobalGameSpec g = normal_spec(71.47, 200.0, sigma);
    const CutoffSolution s = solve_cutoff(g);
    REQUIRE(s.outcome == CutoffOutcome::Solved);
    CHECK(s.diagnostics.converged);
    CHECK(std::abs(s.residual) <= 1e-8 * std::max(s.tau, 135.0));
    const double ref = oracle::conditional_payoff_normal(5, 3, g.base.q, 2, 135.0, 71.47, 200.0, sigma, s.tau, s.tau);
    CHECK(std::abs(ref) <= 1e-7 * 135.0);
    CHECK(conditional_payoff_at_signal(g, s.tau - 0.5) < 0.0);
    CHECK(conditional_payoff_at_signal(g, s.tau + 0.5) > 0.0);
    CHECK(s.theta_star == doctest::Approx(71.4706).epsilon(1e-5));
  }
}

TEST_CASE("vanishing noise under a diffuse prior") {
  const GlobalGameSpec g = normal_spec(71.47, 200.0, 0.05);
  const double limit = vanishing_noise_cutoff(g);
  CHECK(limit > theta_star(g));
  const CutoffSolution s = solve_cutoff(g);
  REQUIRE(s.outcome == CutoffOutcome::Solved);
  CHECK(std::abs(s.tau - limit) < 0.005 * limit);
}

TEST_CASE("solver outcome classes") {
  GlobalGameSpec g = normal_spec(0, 1, 2.0);
  g.solver.max_expansions = 1;
  g.prior = UniformPrior{10.0, 10.0};  // too little prize for anyone
  CHECK(solve_cutoff(g).outcome == CutoffOutcome::AlwaysDeterred);

  g.prior = UniformPrior{5000.0, 5000.0};  // payoff falls as the cutoff rises
  CHECK(solve_cutoff(g).outcome == CutoffOutcome::NoCrossing);

  g.base.n = 2;
  g.base.K = 1;
  g.base.sanctions = SanctionProfile::homogeneous(135.0, 2);
  CHECK(solve_cutoff(g).outcome == CutoffOutcome::AlwaysCollude);
}

TEST_CASE("game setup validation") {
  GlobalGameSpec g = normal_spec(0, 1, 0.0);
  CHECK_THROWS_WITH_AS(g.validate(), doctest::Contains("sigma"), ValidationError);
  g.sigma = 1.0;
  g.prior = NormalPrior{0.0, -1.0};
  CHECK_THROWS_WITH_AS(g.validate(), doctest::Contains("sd"), ValidationError);
  g.prior = UniformPrior{2.0, 1.0};
  CHECK_THROWS_AS(g.validate(), ValidationError);
  g.prior = NormalPrior{0.0, 1.0};
  g.prize_map = {PrizeMap::Kind::Exponential, 0.0};
  CHECK_THROWS_WITH_AS(g.validate(), doctest::Contains("scale"), ValidationError);
}

TEST_CASE("posterior sampling by inversion") {
  Posterior p;
  p.kind = Posterior::Kind::TruncatedNormal;
  p.mean = 0.0;
  p.sd = 1.0;
  p.lo = 8.0;
  p.hi = 9.0;  // deep upper tail
  for (double u : {1e-9, 0.25, 0.5, 0.999}) {
    const double x = p.sample(u);
    CHECK(x >= 8.0);
    CHECK(x <= 9.0);
  }
  CHECK(p.sample(0.25) < p.sample(0.5));
}

TEST_CASE("conditional payoff agrees with Monte Carlo posterior draws") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 8; ++t) {
    GlobalGameSpec g = normal_spec(20.0 + 150.0 * u(rng), 5.0 + 100.0 * u(rng), 0.5 + 8.0 * u(rng));
    const double s = 30.0 + 120.0 * u(rng);
    const double tau = 30.0 + 120.0 * u(rng);
    const auto& p = std::get<NormalPrior>(g.prior);
    // Conjugate posterior written out here, sampled with the standard library.
    const double prec = 1.0 / (p.sd * p.sd) + 1.0 / (g.sigma * g.sigma);
    const double mean = (p.mean / (p.sd * p.sd) + s / (g.sigma * g.sigma)) / prec;
    std::normal_distribution<double> post(mean, 1.0 / std::sqrt(prec));
    const int N = 1000000;
    // Welford: the integrand can be nearly constant.
    double m = 0.0, m2 = 0.0;
    for (int i = 0; i < N; ++i) {
      const double th = post(rng);
      const double v = oracle::u_join(5, 3, g.base.q, 2, 135.0, th, oracle::upper_tail((tau - th) / g.sigma));
      const double delta = v - m;
      m += delta / (i + 1);
      m2 += delta * (v - m);
    }
    const double se = std::sqrt(m2 / (N - 1.0) / N);
    CHECK(std::abs(conditional_payoff(g, s, tau) - m) <= 3.0 * se);
  }
}

TEST_CASE("no prize on the support means a negative payoff and no cutoff") {
  GlobalGameSpec g = normal_spec(-200.0, 10.0, 2.0);
  CHECK(conditional_payoff_at_signal(g, -200.0) < 0.0);
  g.prior = UniformPrior{-100.0, -50.0};
  g.solver.max_expansions = 2;
  CHECK(conditional_payoff(g, 500.0, -80.0) < 0.0);
  CHECK(solve_cutoff(g).outcome == CutoffOutcome::AlwaysDeterred);
}

TEST_CASE("break-even fundamental equals beta times V_safe") {
  const GlobalGameSpec g = normal_spec(70.0, 20.0, 5.0);
  CHECK(oracle::rel_err(theta_star(g), g.base.beta * v_safe(g.base)) <= 1e-9);
  CHECK(theta_star(3, 0.15, 0.0, PrizeMap{}) == doctest::Approx(0.0));
}

TEST_CASE("uniform prior with signals far outside the support") {
  GlobalGameSpec g = normal_spec(0, 1, 2.0);
  g.prior = UniformPrior{-100.0, -50.0};
  for (double s = -3000.0; s <= 3000.0; s += 12.5) {
    const double v = conditional_payoff(g, s, s);
    CHECK(std::isfinite(v));
    CHECK(v < 0.0);
  }
}
