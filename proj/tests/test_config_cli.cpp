#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "collusion/cli.hpp"
#include "collusion/config.hpp"
#include "collusion/errors.hpp"

using namespace collusion;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("collusion_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string write_config(const fs::path& dir, const json& doc) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << doc.dump();
  return p.string();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("empty config gives the calibration baseline") {
  const ExperimentConfig c = parse_config(json::object());
  CHECK(c.model.n == 5);
  CHECK(c.model.K == 3);
  CHECK(c.model.p_K() == doctest::Approx(0.15).epsilon(1e-12));
  CHECK(c.model.beta == 0.06);
  CHECK(c.model.F_eff() == 135.0);
  CHECK(c.sweep.baseline == c.model);
  CHECK(c.game.base == c.model);
  CHECK_FALSE(c.seed);
}

TEST_CASE("config round-trips through its JSON echo") {
  const json doc = {
      {"model", {{"n", 7}, {"q", 0.04}, {"beta", 0.05}, {"V", 2000}, {"sanctions", {{"type", "zipf"}, {"C", 500}}}}},
      {"global_game",
       {{"prior", {{"type", "uniform"}, {"lo", 0}, {"hi", 400}}},
        {"sigma", 2.5},
        {"prize_map", {{"type", "exponential"}, {"scale", 3.0}}}}},
      {"sim", {{"seed", 18446744073709551615ull}, {"replications", 10}, {"strategy", {{"type", "randomized"}, {"alpha", 0.3}}}}},
      {"sweep", {{"metric", "q_star"}, {"beta", {0.01, 0.08}}, {"resolution", {11, 13}}, {"levels", {100, 200}}}}};
  const ExperimentConfig c = parse_config(doc);
  CHECK(c.model.K == 4);
  CHECK(*c.seed == 18446744073709551615ull);
  CHECK(parse_config(config_to_json(c)) == c);
  const ExperimentConfig d = parse_config(json::object());
  CHECK(parse_config(config_to_json(d)) == d);
  CHECK(config_to_json(parse_config(config_to_json(d))) == config_to_json(d));
}

TEST_CASE("config errors name the field") {
  CHECK_THROWS_WITH_AS(parse_config(json{{"modle", json::object()}}), doctest::Contains("modle"), ValidationError);
  CHECK_THROWS_WITH_AS(parse_config(json{{"model", {{"bta", 1}}}}), doctest::Contains("model.bta"), ValidationError);
  CHECK_THROWS_WITH_AS(parse_config(json{{"model", {{"q", 0.1}, {"p_K", 0.1}}}}), doctest::Contains("model.q"),
                       ValidationError);
  CHECK_THROWS_WITH_AS(parse_config(json{{"model", {{"n", "five"}}}}), doctest::Contains("model.n"), ValidationError);
  CHECK_THROWS_WITH_AS(parse_config(json{{"sim", {{"seed", -3}}}}), doctest::Contains("sim.seed"), ValidationError);
  CHECK_THROWS_WITH_AS(parse_config(json{{"global_game", {{"sigma", 0}}}}), doctest::Contains("sigma"),
                       ValidationError);
  CHECK_THROWS_WITH_AS(parse_config(json{{"sweep", {{"metric", "x"}}}}), doctest::Contains("sweep.metric"),
                       ValidationError);
  // Sweep ranges are checked against the baseline by the sweep commands only.
  const ExperimentConfig off = parse_config(json{{"model", {{"sanctions", {{"type", "explicit"}, {"values", {300, 300, 300}}}}, {"n", 3}}}});
  CHECK_THROWS_WITH_AS(off.sweep.validate(), doctest::Contains("sweep.F_eff"), ValidationError);
  CHECK_THROWS_WITH_AS(load_config_file("/nonexistent/c.json"), doctest::Contains("cannot read"), ValidationError);
}

TEST_CASE("cli exit codes") {
  const fs::path dir = scratch("codes");
  CHECK(run({"explode"}).code == cli::kExitInvalid);
  CHECK(run({}).code == cli::kExitInvalid);
  CHECK(run({"corner", "--format", "xml", "--out", dir.string()}).code == cli::kExitInvalid);
  CHECK(run({"corner", "--format", "csv", "--out", dir.string()}).code == cli::kExitInvalid);
  CHECK(run({"corner", "--config", "/nonexistent.json"}).code == cli::kExitInvalid);
  const Run r = run({"simulate", "--out", dir.string()});
  CHECK(r.code == cli::kExitInvalid);
  CHECK(r.err.find("sim.seed") != std::string::npos);
  const std::string bad = write_config(dir, {{"model", {{"beta", 2}}}});
  const Run b = run({"vsafe", "--config", bad, "--out", dir.string()});
  CHECK(b.code == cli::kExitInvalid);
  CHECK(b.err.find("beta") != std::string::npos);

  // A point prior with a large prize: the equilibrium condition only falls.
  const std::string falling =
      write_config(dir, {{"global_game", {{"prior", {{"type", "uniform"}, {"lo", 5000}, {"hi", 5000}}}, {"solver", {{"max_expansions", 1}}}}}});
  CHECK(run({"cutoff", "--config", falling, "--out", dir.string()}).code == cli::kExitSolver);
  CHECK(run({"simulate", "--config", falling, "--seed", "1", "--out", dir.string()}).code == cli::kExitSolver);
}

TEST_CASE("cli commands write their reports") {
  const fs::path dir = scratch("reports");
  const Run cal = run({"calibrate", "--out", dir.string()});
  CHECK(cal.code == 0);
  CHECK(cal.out.find("V_safe ≈ $1.19T") != std::string::npos);
  const json rep = json::parse(slurp(dir / "calibrate.json"));
  CHECK(rep["V_safe"].get<double>() == doctest::Approx(1191.18).epsilon(1e-5));

  const std::string zero = write_config(dir, {{"model", {{"V", 0}}}});
  CHECK(run({"corner", "--config", zero, "--out", dir.string()}).code == 0);
  const json corner = json::parse(slurp(dir / "corner.json"));
  CHECK(corner["all_join_is_equilibrium"] == false);
  CHECK(corner["no_join_is_equilibrium"] == true);

  for (const char* cmd : {"thresholds", "vsafe", "cutoff", "tornado", "iso"}) {
    CHECK(run({cmd, "--out", dir.string()}).code == 0);
    const json j = json::parse(slurp(dir / (std::string(cmd) + ".json")));
    CHECK(parse_config(j["config"]) == parse_config(json::object()));
  }
  CHECK(run({"tornado", "--format", "csv", "--out", dir.string()}).code == 0);
  CHECK(slurp(dir / "tornado.csv").rfind("parameter,low_value,low_metric,high_value,high_metric,baseline_metric\n", 0) == 0);
  CHECK(run({"iso", "--format", "csv", "--out", dir.string()}).code == 0);
  CHECK(slurp(dir / "iso.csv").rfind("level,beta,p_k\n", 0) == 0);
}

TEST_CASE("simulate twice with one seed is byte-identical") {
  const fs::path a = scratch("sim_a"), b = scratch("sim_b");
  const std::string cfg = write_config(a, {{"sim", {{"replications", 20000}}}});
  REQUIRE(run({"simulate", "--config", cfg, "--seed", "77", "--out", a.string()}).code == 0);
  REQUIRE(run({"simulate", "--config", cfg, "--seed", "77", "--out", b.string()}).code == 0);
  const std::string first = slurp(a / "simulate.json");
  CHECK(first == slurp(b / "simulate.json"));
  const json j = json::parse(first);
  CHECK(j["config"]["sim"]["seed"] == 77);
  CHECK(parse_config(j["config"]).seed == 77u);
  for (const char* field : {"empirical_join_rate", "empirical_success_rate", "empirical_detection_rate",
                            "mean_realized_payoff", "deviation_gain"})
    CHECK(j.contains(field));
}
