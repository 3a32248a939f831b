#pragma once

// Experiment configuration: one JSON document with sections `model`,
// `global_game`, `sim` and `sweep`. Every field is optional; defaults
// reproduce the calibration baseline (n = 5, K = 3, p_K = 0.15, beta = 0.06,
// F_eff = 135, currency in billions of US dollars). docs/config_schema.json
// describes the format.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "collusion/global_game.hpp"
#include "collusion/sensitivity.hpp"
#include "collusion/simulation.hpp"

namespace collusion {

struct ExperimentConfig {
  ModelParams model;
  GlobalGameSpec game;  // game.base mirrors model
  Strategy strategy = CutoffStrategy{};
  bool tau_from_solver = true;  // cutoff strategy without an explicit tau
  std::uint64_t replications = 100000;
  std::optional<std::uint64_t> seed;
  std::optional<double> fixed_theta;
  int threads = 0;
  SweepSpec sweep;  // sweep.baseline mirrors model
  std::vector<double> levels;

  bool operator==(const ExperimentConfig&) const = default;
};

// Throws ValidationError naming the offending field.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config_file(const std::string& path);

// Fully resolved config; parse_config(config_to_json(c)) == c.
nlohmann::json config_to_json(const ExperimentConfig& config);

// Sim settings bound to a concrete cutoff (solved elsewhere when
// tau_from_solver is set) and seed.
SimConfig make_sim_config(const ExperimentConfig& config, std::optional<double> solved_tau, std::uint64_t seed);

}  // namespace collusion
