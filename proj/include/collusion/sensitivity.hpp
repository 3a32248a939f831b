#pragma once

// Calibration study around a baseline: one-at-a-time tornado sweeps,
// iso-curves of V_safe over (beta, p_K), and the baseline table.
//
// Currency is whatever unit the baseline uses; the shipped baseline is in
// billions of US dollars.

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "collusion/equilibrium.hpp"
#include "collusion/model.hpp"

namespace collusion {

enum class Metric { VSafe, UJoinAtOne, KStar, QStar };

std::string to_string(Metric metric);
Metric metric_from_string(const std::string& name);

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  bool operator==(const Range&) const = default;
};

struct SweepSpec {
  ModelParams baseline;
  // Tornado endpoints.
  Range F_eff{100.0, 135.0};
  Range p_K{0.05, 0.20};
  Range beta{0.03, 0.10};
  Range K{3.0, 7.0};
  // Iso-curve grid.
  Range iso_beta{0.01, 0.10};
  Range iso_p_K{0.05, 0.20};
  int beta_points = 201;
  int p_K_points = 201;
  Metric metric = Metric::VSafe;

  void validate() const;
  bool operator==(const SweepSpec&) const = default;
};

struct TornadoRow {
  std::string parameter;
  double low_value = 0.0;
  double low_metric = 0.0;
  double high_value = 0.0;
  double high_metric = 0.0;
  double baseline_metric = 0.0;

  double width() const;
};

struct IsoCurve {
  double level = 0.0;
  std::vector<std::pair<double, double>> points;  // (beta, p_K), ordered along the curve
};

struct SweepResult {
  std::vector<TornadoRow> tornado;  // descending bar width
  std::vector<IsoCurve> iso_curves;
  SweepSpec spec;
};

// Baseline with one calibration quantity replaced. p_K and K changes re-solve
// q so the other stays put; the K change also swaps in a homogeneous profile
// at the baseline F_eff (n grows to K when needed) so F_eff stays fixed.
ModelParams with_F_eff(const ModelParams& params, double F_eff);
ModelParams with_p_K(const ModelParams& params, double p_K);
ModelParams with_beta(const ModelParams& params, double beta);
ModelParams with_K(const ModelParams& params, int K);

// NaN for a threshold metric that does not exist.
double evaluate_metric(const ModelParams& params, Metric metric);

SweepResult tornado(const SweepSpec& spec);

// V_safe on the iso grid: rows follow beta, columns follow p_K.
Eigen::ArrayXXd v_safe_grid(const SweepSpec& spec);

SweepResult iso_curves(const SweepSpec& spec, const std::vector<double>& levels);

struct SafeValueAtBeta {
  double beta = 0.0;
  double V_safe = 0.0;
};

struct CalibrationReport {
  int n = 0;
  int K = 0;
  double p_K = 0.0;
  double q = 0.0;
  double p_tilde = 0.0;
  double beta = 0.0;
  double F_eff = 0.0;
  double V_safe = 0.0;
  double omega_at_V_safe = 0.0;
  std::vector<SafeValueAtBeta> V_safe_by_beta;
  EquilibriumReport at_V_safe;  // baseline with V = V_safe
};

CalibrationReport calibration_report(const ModelParams& baseline);

}  // namespace collusion
