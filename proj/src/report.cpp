#include "collusion/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

namespace collusion {

using nlohmann::json;

namespace {

std::string sig9(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

json num(double x) { return std::isfinite(x) ? json(round_sig9(x)) : json(nullptr); }

json estimate(const Estimate& e) { return {{"mean", num(e.mean)}, {"se", num(e.se)}}; }

}  // namespace

double round_sig9(double x) {
  if (!std::isfinite(x)) return x;
  return std::strtod(sig9(x).c_str(), nullptr);
}

json to_json(const EquilibriumReport& r) {
  json j = {{"no_join_is_equilibrium", r.no_join_is_equilibrium},
            {"all_join_is_equilibrium", r.all_join_is_equilibrium},
            {"u_join_at_one", num(r.u_join_at_one)},
            {"group_rationality_holds", r.group_rationality_holds},
            {"K_star", r.K_star ? json(*r.K_star) : json(nullptr)},
            {"K_star_real", r.K_star_real ? num(*r.K_star_real) : json(nullptr)},
            {"q_star", r.q_star ? num(*r.q_star) : json(nullptr)},
            {"V_safe", num(r.V_safe)},
            {"thresholds_closed_form", r.thresholds_closed_form}};
  return j;
}

json to_json(const CutoffSolution& s) {
  const bool solved = s.outcome == CutoffOutcome::Solved;
  return {{"outcome", to_string(s.outcome)},
          {"tau", solved ? num(s.tau) : json(nullptr)},
          {"residual", solved ? num(s.residual) : json(nullptr)},
          {"theta_star", num(s.theta_star)},
          {"diagnostics",
           {{"iterations", s.diagnostics.iterations},
            {"expansions", s.diagnostics.expansions},
            {"bracket", json::array({num(s.diagnostics.bracket_lo), num(s.diagnostics.bracket_hi)})},
            {"scan_window", json::array({num(s.diagnostics.scan_lo), num(s.diagnostics.scan_hi)})},
            {"converged", s.diagnostics.converged}}}};
}

json to_json(const SimResult& r) {
  return {{"replications", r.replications},
          {"empirical_join_rate", num(r.empirical_join_rate)},
          {"empirical_success_rate", num(r.empirical_success_rate)},
          {"empirical_detection_rate", num(r.empirical_detection_rate)},
          {"mean_realized_payoff", estimate(r.mean_realized_payoff)},
          {"success_detection_rate", estimate(r.success_detection_rate)},
          {"attempt_detection_rate", estimate(r.attempt_detection_rate)},
          {"excess_joiner_rate", num(r.excess_joiner_rate)},
          {"deviation_gain", r.deviation_gain ? estimate(*r.deviation_gain) : json(nullptr)}};
}

json to_json(const SweepResult& r) {
  json rows = json::array();
  for (const TornadoRow& t : r.tornado) {
    rows.push_back({{"parameter", t.parameter},
                    {"low_value", num(t.low_value)},
                    {"low_metric", num(t.low_metric)},
                    {"high_value", num(t.high_value)},
                    {"high_metric", num(t.high_metric)},
                    {"baseline_metric", num(t.baseline_metric)}});
  }
  json curves = json::array();
  for (const IsoCurve& c : r.iso_curves) {
    json pts = json::array();
    for (const auto& [beta, p_K] : c.points) pts.push_back(json::array({num(beta), num(p_K)}));
    curves.push_back({{"level", num(c.level)}, {"points", pts}});
  }
  return {{"metric", to_string(r.spec.metric)}, {"tornado", rows}, {"iso_curves", curves}};
}

json to_json(const CalibrationReport& r) {
  json by_beta = json::array();
  for (const auto& v : r.V_safe_by_beta) {
    by_beta.push_back({{"beta", num(v.beta)}, {"V_safe", num(v.V_safe)}, {"V_safe_trillions", num(v.V_safe / 1000.0)}});
  }
  return {{"units", "USD billions"},
          {"n", r.n},
          {"K", r.K},
          {"p_K", num(r.p_K)},
          {"q", num(r.q)},
          {"p_tilde", num(r.p_tilde)},
          {"beta", num(r.beta)},
          {"F_eff", num(r.F_eff)},
          {"V_safe", num(r.V_safe)},
          {"V_safe_trillions", num(r.V_safe / 1000.0)},
          {"omega_at_V_safe", num(r.omega_at_V_safe)},
          {"V_safe_by_beta", by_beta},
          {"corner_at_V_safe", to_json(r.at_V_safe)}};
}

void write_tornado_csv(std::ostream& out, const SweepResult& r) {
  out << "parameter,low_value,low_metric,high_value,high_metric,baseline_metric\n";
  for (const TornadoRow& t : r.tornado) {
    out << t.parameter << ',' << sig9(t.low_value) << ',' << sig9(t.low_metric) << ',' << sig9(t.high_value) << ','
        << sig9(t.high_metric) << ',' << sig9(t.baseline_metric) << '\n';
  }
}

void write_iso_csv(std::ostream& out, const SweepResult& r) {
  out << "level,beta,p_k\n";
  for (const IsoCurve& c : r.iso_curves) {
    for (const auto& [beta, p_K] : c.points) out << sig9(c.level) << ',' << sig9(beta) << ',' << sig9(p_K) << '\n';
  }
}

}  // namespace collusion
