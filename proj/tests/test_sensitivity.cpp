#include <doctest.h>

#include <cmath>

#include "collusion/errors.hpp"
#include "collusion/sensitivity.hpp"
#include "oracles.hpp"

using namespace collusion;

namespace {

SweepSpec baseline_sweep() {
  SweepSpec s;
  s.baseline.n = 5;
  s.baseline.K = 3;
  s.baseline.q = q_from_coalition_detection(0.15, 3);
  s.baseline.beta = 0.06;
  s.baseline.V = 1190.0;
  s.baseline.sanctions = SanctionProfile::homogeneous(135.0, 5);
  return s;
}

const TornadoRow& row(const SweepResult& r, const std::string& name) {
  for (const TornadoRow& t : r.tornado)
    if (t.parameter == name) return t;
  throw std::runtime_error("missing row " + name);
}

double odds(double p) { return p / (1.0 - p); }

}  // namespace

TEST_CASE("tornado endpoints follow the scaling laws") {
  const SweepSpec s = baseline_sweep();
  const SweepResult r = tornado(s);
  REQUIRE(r.tornado.size() == 4);
  const double base = v_safe(s.baseline);
  for (const TornadoRow& t : r.tornado) CHECK(t.baseline_metric == base);

  const TornadoRow& F = row(r, "F_eff");
  CHECK(oracle::rel_err(F.low_metric, base * 100.0 / 135.0) <= 1e-9);
  CHECK(oracle::rel_err(F.high_metric, base) <= 1e-9);
  const TornadoRow& p = row(r, "p_K");
  CHECK(oracle::rel_err(p.low_metric, base * odds(0.05) / odds(0.15)) <= 1e-9);
  CHECK(oracle::rel_err(p.high_metric, base * odds(0.20) / odds(0.15)) <= 1e-9);
  const TornadoRow& b = row(r, "beta");
  CHECK(oracle::rel_err(b.low_metric, base * 0.06 / 0.03) <= 1e-9);
  CHECK(oracle::rel_err(b.high_metric, base * 0.06 / 0.10) <= 1e-9);
  const TornadoRow& k = row(r, "K");
  CHECK(oracle::rel_err(k.low_metric, base) <= 1e-9);
  CHECK(oracle::rel_err(k.high_metric, base * 7.0 / 3.0) <= 1e-9);

  for (std::size_t i = 1; i < r.tornado.size(); ++i) CHECK(r.tornado[i - 1].width() >= r.tornado[i].width());
  CHECK(r.tornado.front().parameter == "beta");
}

TEST_CASE("K variation keeps p_K and F_eff") {
  const SweepSpec s = baseline_sweep();
  for (int K : {1, 3, 6, 9}) {
    const ModelParams m = with_K(s.baseline, K);
    CHECK(m.K == K);
    CHECK(m.n >= K);
    CHECK(m.p_K() == doctest::Approx(0.15).epsilon(1e-12));
    CHECK(m.F_eff() == 135.0);
  }
}

TEST_CASE("threshold metrics") {
  SweepSpec s = baseline_sweep();
  CHECK(evaluate_metric(s.baseline, Metric::UJoinAtOne) == doctest::Approx(joiner_payoff(s.baseline, 1.0).u_join));
  CHECK(evaluate_metric(s.baseline, Metric::KStar) == 3.0);  // q held fixed, K = 1, 2 still pay
  ModelParams big = s.baseline;
  big.V = 1e6;
  CHECK(std::isnan(evaluate_metric(big, Metric::KStar)));
  CHECK(evaluate_metric(big, Metric::QStar) > big.q);
  s.metric = Metric::QStar;
  CHECK(tornado(s).tornado.size() == 4);
}

TEST_CASE("iso-curve points lie on the closed-form contour") {
  SweepSpec s = baseline_sweep();
  const SweepResult r = iso_curves(s, {500.0, 1190.0, 2500.0});
  REQUIRE(r.iso_curves.size() == 3);
  for (const IsoCurve& c : r.iso_curves) {
    CHECK(c.points.size() > 50);
    for (const auto& [beta, p] : c.points) {
      const double beta_closed = 3.0 * 135.0 / c.level * odds(p);
      CHECK(std::abs(beta - beta_closed) <= 1e-3 * beta_closed);
    }
    for (std::size_t i = 1; i < c.points.size(); ++i) {
      CHECK(c.points[i].second >= c.points[i - 1].second);
      CHECK(c.points[i].first >= c.points[i - 1].first - 1e-15);
    }
  }
}

TEST_CASE("grid follows the closed form at the nodes") {
  SweepSpec s = baseline_sweep();
  s.beta_points = 11;
  s.p_K_points = 7;
  const Eigen::ArrayXXd g = v_safe_grid(s);
  REQUIRE(g.rows() == 11);
  REQUIRE(g.cols() == 7);
  const double beta = 0.01 + 0.09 * 4 / 10.0, p = 0.05 + 0.15 * 3 / 6.0;
  CHECK(g(4, 3) == doctest::Approx(3 * 135.0 * odds(p) / beta).epsilon(1e-12));
}

TEST_CASE("sweep validation") {
  SweepSpec s = baseline_sweep();
  s.beta = {0.07, 0.10};
  CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("sweep.beta"), ValidationError);
  s = baseline_sweep();
  s.K = {3.5, 7.0};
  CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("sweep.K"), ValidationError);
  s = baseline_sweep();
  CHECK_THROWS_AS(iso_curves(s, {-1.0}), ValidationError);
  CHECK_THROWS_AS(metric_from_string("nope"), ValidationError);
}

TEST_CASE("calibration report") {
  const CalibrationReport r = calibration_report(baseline_sweep().baseline);
  CHECK(r.V_safe == doctest::Approx(1191.18).epsilon(1e-5));
  CHECK(r.q == doctest::Approx(0.0527266).epsilon(1e-5));
  REQUIRE(r.V_safe_by_beta.size() == 3);
  CHECK(r.V_safe_by_beta[0].V_safe == doctest::Approx(1299.47).epsilon(1e-5));
  CHECK(r.V_safe_by_beta[2].V_safe == doctest::Approx(1099.55).epsilon(1e-5));
  CHECK(std::abs(r.at_V_safe.u_join_at_one) < 1e-9);
  CHECK(r.omega_at_V_safe == doctest::Approx(71.4706).epsilon(1e-5));
}
