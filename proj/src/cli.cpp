#include "collusion/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>

#include <CLI11.hpp>
#include <json.hpp>

#include "collusion/config.hpp"
#include "collusion/equilibrium.hpp"
#include "collusion/errors.hpp"
#include "collusion/global_game.hpp"
#include "collusion/report.hpp"
#include "collusion/sensitivity.hpp"
#include "collusion/simulation.hpp"

namespace collusion::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Invocation {
  std::string command;
  std::string config_path;
  std::string out_dir = ".";
  std::string format = "json";
  std::optional<std::uint64_t> seed;
};

struct Output {
  std::string file_name;
  std::string body;
  std::string summary;
};

std::string fmt(const char* pattern, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, x);
  return buf;
}

std::string dump(json report, const ExperimentConfig& config) {
  report["config"] = config_to_json(config);
  return report.dump(2) + "\n";
}

std::string yes_no(bool b) { return b ? "true" : "false"; }

CutoffSolution require_solved(const ExperimentConfig& c) {
  CutoffSolution s = solve_cutoff(c.game);
  if (s.outcome != CutoffOutcome::Solved) {
    throw SolverError("cutoff: no equilibrium cutoff on the scanned window (" + to_string(s.outcome) + ")");
  }
  return s;
}

Output corner(const Invocation&, const ExperimentConfig& c) {
  const EquilibriumReport r = corner_test(c.model);
  return {"corner.json", dump(to_json(r), c),
          "all_join=" + yes_no(r.all_join_is_equilibrium) + " no_join=" + yes_no(r.no_join_is_equilibrium) +
              " U_J(1)=" + fmt("%.6g", r.u_join_at_one)};
}

Output thresholds(const Invocation&, const ExperimentConfig& c) {
  const EquilibriumReport r = analyze(c.model);
  std::string s = "K_star=" + (r.K_star ? std::to_string(*r.K_star) : std::string("none")) +
                  " q_star=" + (r.q_star ? fmt("%.6g", *r.q_star) : std::string("none"));
  return {"thresholds.json", dump(to_json(r), c), s};
}

Output vsafe(const Invocation&, const ExperimentConfig& c) {
  const double v = v_safe(c.model);
  json j = {{"V_safe", round_sig9(v)}, {"omega_at_V_safe", round_sig9(flow_prize(c.model.beta, v))}};
  return {"vsafe.json", dump(j, c), "V_safe=" + fmt("%.6g", v)};
}

Output cutoff(const Invocation&, const ExperimentConfig& c) {
  const CutoffSolution s = solve_cutoff(c.game);
  if (s.outcome == CutoffOutcome::NoCrossing) {
    throw SolverError("cutoff: conditional payoff changes sign without crossing zero from below");
  }
  std::string summary = "outcome=" + to_string(s.outcome);
  if (s.outcome == CutoffOutcome::Solved) summary += " tau=" + fmt("%.6g", s.tau);
  summary += " theta_star=" + fmt("%.6g", s.theta_star);
  return {"cutoff.json", dump(to_json(s), c), summary};
}

Output simulate_cmd(const Invocation& inv, ExperimentConfig c) {
  if (inv.seed) c.seed = inv.seed;
  if (!c.seed) throw ValidationError("sim.seed: required for simulate (set it in the config or pass --seed)");
  std::optional<double> tau;
  if (std::holds_alternative<CutoffStrategy>(c.strategy) && c.tau_from_solver) tau = require_solved(c).tau;
  const SimResult r = simulate(make_sim_config(c, tau, *c.seed));
  json j = to_json(r);
  if (tau) j["solved_tau"] = round_sig9(*tau);
  return {"simulate.json", dump(j, c),
          "replications=" + std::to_string(r.replications) + " join_rate=" + fmt("%.6g", r.empirical_join_rate) +
              " mean_payoff=" + fmt("%.6g", r.mean_realized_payoff.mean)};
}

Output tornado_cmd(const Invocation& inv, const ExperimentConfig& c) {
  const SweepResult r = tornado(c.sweep);
  std::string summary = "metric=" + to_string(c.sweep.metric);
  if (!r.tornado.empty()) summary += " widest=" + r.tornado.front().parameter;
  if (inv.format == "csv") {
    std::ostringstream os;
    write_tornado_csv(os, r);
    return {"tornado.csv", os.str(), summary};
  }
  json j = to_json(r);
  j.erase("iso_curves");
  return {"tornado.json", dump(j, c), summary};
}

Output iso_cmd(const Invocation& inv, const ExperimentConfig& c) {
  const SweepResult r = iso_curves(c.sweep, c.levels);
  std::size_t points = 0;
  for (const IsoCurve& curve : r.iso_curves) points += curve.points.size();
  const std::string summary =
      "levels=" + std::to_string(r.iso_curves.size()) + " points=" + std::to_string(points);
  if (inv.format == "csv") {
    std::ostringstream os;
    write_iso_csv(os, r);
    return {"iso.csv", os.str(), summary};
  }
  json j = to_json(r);
  j.erase("tornado");
  return {"iso.json", dump(j, c), summary};
}

Output calibrate(const Invocation&, const ExperimentConfig& c) {
  const CalibrationReport r = calibration_report(c.model);
  return {"calibrate.json", dump(to_json(r), c),
          "V_safe ≈ $" + fmt("%.2f", r.V_safe / 1000.0) + "T (" + fmt("%.6g", r.V_safe) + " $B at beta=" +
              fmt("%g", r.beta) + ")"};
}

int execute(const Invocation& inv, std::ostream& out) {
  static const std::map<std::string, std::function<Output(const Invocation&, const ExperimentConfig&)>> commands = {
      {"corner", corner},   {"thresholds", thresholds},   {"vsafe", vsafe},  {"cutoff", cutoff},
      {"simulate", simulate_cmd}, {"tornado", tornado_cmd}, {"iso", iso_cmd}, {"calibrate", calibrate}};

  const ExperimentConfig config =
      inv.config_path.empty() ? parse_config(json::object()) : load_config_file(inv.config_path);
  if (inv.format == "csv" && inv.command != "tornado" && inv.command != "iso") {
    throw ValidationError("--format: csv output exists only for tornado and iso");
  }
  const Output o = commands.at(inv.command)(inv, config);

  std::error_code ec;
  fs::create_directories(inv.out_dir, ec);
  if (ec) throw ValidationError("--out: cannot create directory '" + inv.out_dir + "': " + ec.message());
  const fs::path path = fs::path(inv.out_dir) / o.file_name;
  std::ofstream file(path, std::ios::binary);
  file << o.body;
  file.close();
  if (!file) throw ValidationError("--out: cannot write '" + path.string() + "'");

  out << inv.command << ": " << o.summary << " -> " << path.string() << "\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Invocation inv;
  CLI::App app{"Cost-of-collusion deterrence analysis", "collusion"};
  app.add_option("command", inv.command, "corner | thresholds | vsafe | cutoff | simulate | tornado | iso | calibrate")
      ->required()
      ->check(CLI::IsMember({"corner", "thresholds", "vsafe", "cutoff", "simulate", "tornado", "iso", "calibrate"}));
  app.add_option("--config", inv.config_path, "experiment config JSON (defaults to the calibration baseline)");
  app.add_option("--out", inv.out_dir, "output directory")->capture_default_str();
  app.add_option("--format", inv.format, "report format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  app.add_option("--seed", inv.seed, "simulation seed (overrides sim.seed)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  }

  try {
    return execute(inv, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const SolverError& e) {
    err << "solver error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
}

}  // namespace collusion::cli
