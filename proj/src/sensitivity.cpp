#include "collusion/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "collusion/errors.hpp"

namespace collusion {

std::string to_string(Metric metric) {
  switch (metric) {
    case Metric::VSafe: return "v_safe";
    case Metric::UJoinAtOne: return "u_join_at_one";
    case Metric::KStar: return "K_star";
    case Metric::QStar: return "q_star";
  }
  return "unknown";
}

Metric metric_from_string(const std::string& name) {
  for (Metric m : {Metric::VSafe, Metric::UJoinAtOne, Metric::KStar, Metric::QStar}) {
    if (to_string(m) == name) return m;
  }
  throw ValidationError("sweep.metric: unknown metric '" + name + "'");
}

namespace {

void check_range(const Range& r, double baseline, double floor, double ceiling, const std::string& field) {
  if (!(r.lo <= r.hi)) throw ValidationError(field + ": lo must be <= hi");
  if (!(r.lo >= floor && r.hi <= ceiling)) throw ValidationError(field + ": outside the admissible domain");
  const double slack = 1e-9 * std::max(1.0, std::abs(baseline));
  if (baseline < r.lo - slack || baseline > r.hi + slack) {
    throw ValidationError(field + ": baseline value lies outside [lo, hi]");
  }
}

}  // namespace

void SweepSpec::validate() const {
  baseline.validate();
  const double p = baseline.p_K();
  check_range(F_eff, baseline.F_eff(), std::numeric_limits<double>::min(), std::numeric_limits<double>::max(),
              "sweep.F_eff");
  check_range(p_K, p, std::numeric_limits<double>::min(), std::nextafter(1.0, 0.0), "sweep.p_K");
  check_range(beta, baseline.beta, std::numeric_limits<double>::min(), 1.0, "sweep.beta");
  check_range(K, baseline.K, 1.0, kMaxProviders, "sweep.K");
  if (K.lo != std::floor(K.lo) || K.hi != std::floor(K.hi)) throw ValidationError("sweep.K: endpoints must be integers");
  check_range(iso_beta, baseline.beta, std::numeric_limits<double>::min(), 1.0, "sweep.iso_beta");
  check_range(iso_p_K, p, std::numeric_limits<double>::min(), std::nextafter(1.0, 0.0), "sweep.iso_p_K");
  if (beta_points < 2 || p_K_points < 2) throw ValidationError("sweep.resolution: need at least 2 points per axis");
}

double TornadoRow::width() const { return std::abs(high_metric - low_metric); }

ModelParams with_F_eff(const ModelParams& params, double F_eff) {
  if (!(F_eff > 0.0)) throw ValidationError("F_eff: must be > 0");
  ModelParams out = params;
  out.sanctions = params.sanctions.scaled(F_eff / params.F_eff());
  return out;
}

ModelParams with_p_K(const ModelParams& params, double p_K) {
  ModelParams out = params;
  out.q = q_from_coalition_detection(p_K, params.K);
  return out;
}

ModelParams with_beta(const ModelParams& params, double beta) {
  ModelParams out = params;
  out.beta = beta;
  return out;
}

ModelParams with_K(const ModelParams& params, int K) {
  ModelParams out = params;
  out.K = K;
  out.n = std::max(params.n, K);
  out.q = q_from_coalition_detection(params.p_K(), K);
  out.sanctions = SanctionProfile::homogeneous(params.F_eff(), out.n);
  if (out.pre_coordination_size) out.pre_coordination_size = std::min(*out.pre_coordination_size, K);
  return out;
}

double evaluate_metric(const ModelParams& params, Metric metric) {
  constexpr double none = std::numeric_limits<double>::quiet_NaN();
  switch (metric) {
    case Metric::VSafe: return v_safe(params);
    case Metric::UJoinAtOne: return corner_test(params).u_join_at_one;
    case Metric::KStar: {
      const auto k = analyze(params).K_star;
      return k ? static_cast<double>(*k) : none;
    }
    case Metric::QStar: return analyze(params).q_star.value_or(none);
  }
  return none;
}

SweepResult tornado(const SweepSpec& spec) {
  spec.validate();
  const ModelParams& base = spec.baseline;
  const double base_metric = evaluate_metric(base, spec.metric);
  const auto row = [&](const std::string& name, const Range& r, auto&& vary) {
    TornadoRow t;
    t.parameter = name;
    t.low_value = r.lo;
    t.high_value = r.hi;
    t.low_metric = evaluate_metric(vary(r.lo), spec.metric);
    t.high_metric = evaluate_metric(vary(r.hi), spec.metric);
    t.baseline_metric = base_metric;
    return t;
  };

  SweepResult out;
  out.spec = spec;
  out.tornado.push_back(row("F_eff", spec.F_eff, [&](double v) { return with_F_eff(base, v); }));
  out.tornado.push_back(row("p_K", spec.p_K, [&](double v) { return with_p_K(base, v); }));
  out.tornado.push_back(row("beta", spec.beta, [&](double v) { return with_beta(base, v); }));
  out.tornado.push_back(row("K", spec.K, [&](double v) { return with_K(base, static_cast<int>(v)); }));
  std::stable_sort(out.tornado.begin(), out.tornado.end(), [](const TornadoRow& a, const TornadoRow& b) {
    const double wa = std::isnan(a.width()) ? -1.0 : a.width();
    const double wb = std::isnan(b.width()) ? -1.0 : b.width();
    return wa > wb;
  });
  return out;
}

Eigen::ArrayXXd v_safe_grid(const SweepSpec& spec) {
  spec.validate();
  const Eigen::ArrayXd betas = Eigen::ArrayXd::LinSpaced(spec.beta_points, spec.iso_beta.lo, spec.iso_beta.hi);
  const Eigen::ArrayXd pks = Eigen::ArrayXd::LinSpaced(spec.p_K_points, spec.iso_p_K.lo, spec.iso_p_K.hi);
  Eigen::ArrayXXd grid(betas.size(), pks.size());
  for (Eigen::Index j = 0; j < pks.size(); ++j) {
    const ModelParams row = with_p_K(spec.baseline, pks(j));
    for (Eigen::Index i = 0; i < betas.size(); ++i) grid(i, j) = v_safe(with_beta(row, betas(i)));
  }
  return grid;
}

SweepResult iso_curves(const SweepSpec& spec, const std::vector<double>& levels) {
  const Eigen::ArrayXXd grid = v_safe_grid(spec);
  const Eigen::ArrayXd betas = Eigen::ArrayXd::LinSpaced(spec.beta_points, spec.iso_beta.lo, spec.iso_beta.hi);
  const Eigen::ArrayXd pks = Eigen::ArrayXd::LinSpaced(spec.p_K_points, spec.iso_p_K.lo, spec.iso_p_K.hi);

  SweepResult out;
  out.spec = spec;
  for (double level : levels) {
    if (!(level > 0.0)) throw ValidationError("levels: must be > 0");
    IsoCurve curve;
    curve.level = level;
    const Eigen::ArrayXXd d = grid - level;
    // Grid nodes exactly on the level, then interior crossings of every
    // edge, linearly interpolated.
    for (Eigen::Index i = 0; i < d.rows(); ++i) {
      for (Eigen::Index j = 0; j < d.cols(); ++j) {
        if (d(i, j) == 0.0) curve.points.emplace_back(betas(i), pks(j));
        if (i + 1 < d.rows() && d(i, j) * d(i + 1, j) < 0.0) {
          const double t = d(i, j) / (d(i, j) - d(i + 1, j));
          curve.points.emplace_back(betas(i) + t * (betas(i + 1) - betas(i)), pks(j));
        }
        if (j + 1 < d.cols() && d(i, j) * d(i, j + 1) < 0.0) {
          const double t = d(i, j) / (d(i, j) - d(i, j + 1));
          curve.points.emplace_back(betas(i), pks(j) + t * (pks(j + 1) - pks(j)));
        }
      }
    }
    // V_safe falls in beta and rises in p_K, so each level set is a single
    // monotone curve and ordering by (p_K, beta) walks along it.
    std::sort(curve.points.begin(), curve.points.end(),
              [](const auto& a, const auto& b) { return std::tie(a.second, a.first) < std::tie(b.second, b.first); });
    out.iso_curves.push_back(std::move(curve));
  }
  return out;
}

CalibrationReport calibration_report(const ModelParams& baseline) {
  baseline.validate();
  CalibrationReport r;
  r.n = baseline.n;
  r.K = baseline.K;
  r.q = baseline.q;
  r.p_K = baseline.p_K();
  r.p_tilde = baseline.p_tilde();
  r.beta = baseline.beta;
  r.F_eff = baseline.F_eff();
  r.V_safe = v_safe(baseline);
  r.omega_at_V_safe = flow_prize(baseline.beta, r.V_safe);
  for (double b : {0.055, 0.06, 0.065}) r.V_safe_by_beta.push_back({b, v_safe(with_beta(baseline, b))});
  ModelParams at_safe = baseline;
  at_safe.V = r.V_safe;
  r.at_V_safe = analyze(at_safe);
  return r;
}

}  // namespace collusion
