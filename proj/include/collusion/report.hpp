#pragma once

// JSON and CSV renderings of analysis results. Result floats carry 9
// significant digits; non-finite values become null.

#include <ostream>

#include <json.hpp>

#include "collusion/equilibrium.hpp"
#include "collusion/global_game.hpp"
#include "collusion/sensitivity.hpp"
#include "collusion/simulation.hpp"

namespace collusion {

// x rounded to 9 significant digits.
double round_sig9(double x);

nlohmann::json to_json(const EquilibriumReport& r);
nlohmann::json to_json(const CutoffSolution& s);
nlohmann::json to_json(const SimResult& r);
nlohmann::json to_json(const SweepResult& r);
nlohmann::json to_json(const CalibrationReport& r);

// Header: parameter,low_value,low_metric,high_value,high_metric,baseline_metric
void write_tornado_csv(std::ostream& out, const SweepResult& r);
// Header: level,beta,p_k
void write_iso_csv(std::ostream& out, const SweepResult& r);

}  // namespace collusion
