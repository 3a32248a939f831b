#include "collusion/config.hpp"

#include <fstream>
#include <initializer_list>
#include <string>

#include "collusion/errors.hpp"

namespace collusion {

using nlohmann::json;

namespace {

constexpr double kBaselinePK = 0.15;
constexpr double kBaselineBeta = 0.06;
constexpr double kBaselineV = 1190.0;
constexpr double kBaselineF = 135.0;
constexpr double kDefaultPriorSd = 200.0;
constexpr double kDefaultSigma = 5.0;

// A JSON object being read, with its dotted path for error messages.
class Section {
 public:
  Section(const json& node, std::string path, std::initializer_list<const char*> allowed) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ValidationError(path_ + ": must be a JSON object");
    for (const auto& [key, value] : node_.items()) {
      bool known = false;
      for (const char* a : allowed) known = known || key == a;
      if (!known) throw ValidationError(field(key) + ": unknown field");
    }
  }

  bool has(const char* key) const { return node_.contains(key) && !node_.at(key).is_null(); }
  const json& at(const char* key) const { return node_.at(key); }
  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  double number(const char* key, double fallback) const {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_number()) throw ValidationError(field(key) + ": must be a number");
    return v.get<double>();
  }

  int integer(const char* key, int fallback) const {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_number_integer()) throw ValidationError(field(key) + ": must be an integer");
    return v.get<int>();
  }

  std::uint64_t unsigned_integer(const char* key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
      throw ValidationError(field(key) + ": must be a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }

  std::string text(const char* key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_string()) throw ValidationError(field(key) + ": must be a string");
    return v.get<std::string>();
  }

  Range range(const char* key, Range fallback) const {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      throw ValidationError(field(key) + ": must be a [low, high] pair of numbers");
    }
    return {v[0].get<double>(), v[1].get<double>()};
  }

 private:
  const json& node_;
  std::string path_;
};

const json& child(const json& doc, const char* key) {
  static const json empty = json::object();
  return doc.contains(key) && !doc.at(key).is_null() ? doc.at(key) : empty;
}

ModelParams parse_model(const json& node) {
  const Section s(node, "model", {"n", "K", "q", "p_K", "pre_coordination_size", "beta", "V", "sanctions"});
  ModelParams m;
  m.n = s.integer("n", 5);
  if (m.n < 2) throw ValidationError("model.n: must be >= 2");
  m.K = s.has("K") ? s.integer("K", 0) : majority_threshold(m.n);
  if (s.has("q") && s.has("p_K")) throw ValidationError("model.q: give either q or p_K, not both");
  if (m.K < 1 || m.K > m.n) throw ValidationError("model.K: must satisfy 1 <= K <= n");
  if (s.has("q")) {
    m.q = s.number("q", 0.0);
  } else {
    const double p = s.number("p_K", kBaselinePK);
    if (!(p > 0.0 && p < 1.0)) throw ValidationError("model.p_K: must lie in (0, 1)");
    m.q = q_from_coalition_detection(p, m.K);
  }
  if (s.has("pre_coordination_size")) m.pre_coordination_size = s.integer("pre_coordination_size", 0);
  m.beta = s.number("beta", kBaselineBeta);
  m.V = s.number("V", kBaselineV);

  if (s.has("sanctions")) {
    const Section z(s.at("sanctions"), "model.sanctions", {"type", "values", "C"});
    const std::string type = z.text("type", "explicit");
    if (type == "explicit") {
      if (!z.has("values") || !z.at("values").is_array()) {
        throw ValidationError("model.sanctions.values: must be an array of numbers");
      }
      std::vector<double> values;
      for (const json& v : z.at("values")) {
        if (!v.is_number()) throw ValidationError("model.sanctions.values: must be an array of numbers");
        values.push_back(v.get<double>());
      }
      m.sanctions = SanctionProfile::explicit_values(std::move(values));
    } else if (type == "zipf") {
      if (!z.has("C")) throw ValidationError("model.sanctions.C: required for a zipf profile");
      m.sanctions = SanctionProfile::zipf(z.number("C", 0.0));
    } else {
      throw ValidationError("model.sanctions.type: must be 'explicit' or 'zipf'");
    }
  } else {
    m.sanctions = SanctionProfile::homogeneous(kBaselineF, m.n);
  }
  m.validate();
  return m;
}

GlobalGameSpec parse_game(const json& node, const ModelParams& model) {
  const Section s(node, "global_game", {"prior", "sigma", "prize_map", "solver"});
  GlobalGameSpec g;
  g.base = model;
  g.sigma = s.number("sigma", kDefaultSigma);

  if (s.has("prize_map")) {
    const Section p(s.at("prize_map"), "global_game.prize_map", {"type", "scale"});
    const std::string type = p.text("type", "identity");
    if (type == "identity") {
      g.prize_map = {};
    } else if (type == "exponential") {
      g.prize_map = {PrizeMap::Kind::Exponential, p.number("scale", model.omega())};
    } else {
      throw ValidationError("global_game.prize_map.type: must be 'identity' or 'exponential'");
    }
  }

  if (s.has("prior")) {
    const Section p(s.at("prior"), "global_game.prior", {"type", "mean", "sd", "lo", "hi"});
    const std::string type = p.text("type", "normal");
    if (type == "normal") {
      const double mean = p.has("mean") ? p.number("mean", 0.0)
                                        : theta_star(model.K, model.p_K(), model.F_eff(), g.prize_map);
      g.prior = NormalPrior{mean, p.number("sd", kDefaultPriorSd)};
    } else if (type == "uniform") {
      if (!p.has("lo") || !p.has("hi")) throw ValidationError("global_game.prior: uniform needs lo and hi");
      g.prior = UniformPrior{p.number("lo", 0.0), p.number("hi", 0.0)};
    } else {
      throw ValidationError("global_game.prior.type: must be 'normal' or 'uniform'");
    }
  } else {
    g.prior = NormalPrior{theta_star(model.K, model.p_K(), model.F_eff(), g.prize_map), kDefaultPriorSd};
  }

  if (s.has("solver")) {
    const Section o(s.at("solver"), "global_game.solver", {"rel_tol", "nodes", "scan_points", "max_expansions"});
    g.solver.rel_tol = o.number("rel_tol", g.solver.rel_tol);
    g.solver.nodes = o.integer("nodes", g.solver.nodes);
    g.solver.scan_points = o.integer("scan_points", g.solver.scan_points);
    g.solver.max_expansions = o.integer("max_expansions", g.solver.max_expansions);
  }
  g.validate();
  return g;
}

void parse_sim(const json& node, ExperimentConfig& c) {
  const Section s(node, "sim", {"replications", "seed", "strategy", "fixed_theta", "threads"});
  c.replications = s.unsigned_integer("replications", c.replications);
  if (c.replications < 1) throw ValidationError("sim.replications: must be >= 1");
  if (s.has("seed")) c.seed = s.unsigned_integer("seed", 0);
  if (s.has("fixed_theta")) c.fixed_theta = s.number("fixed_theta", 0.0);
  c.threads = s.integer("threads", 0);
  if (c.threads < 0) throw ValidationError("sim.threads: must be >= 0");

  c.strategy = CutoffStrategy{};
  c.tau_from_solver = true;
  if (s.has("strategy")) {
    const Section t(s.at("strategy"), "sim.strategy", {"type", "tau", "alpha"});
    const std::string type = t.text("type", "cutoff");
    if (type == "cutoff") {
      c.tau_from_solver = !t.has("tau");
      c.strategy = CutoffStrategy{t.number("tau", 0.0)};
    } else if (type == "join_always") {
      c.strategy = JoinAlways{};
      c.tau_from_solver = false;
    } else if (type == "join_never") {
      c.strategy = JoinNever{};
      c.tau_from_solver = false;
    } else if (type == "randomized") {
      if (!t.has("alpha")) throw ValidationError("sim.strategy.alpha: required for a randomized strategy");
      const double a = t.number("alpha", 0.0);
      if (!(a >= 0.0 && a <= 1.0)) throw ValidationError("sim.strategy.alpha: must lie in [0, 1]");
      c.strategy = RandomizedStrategy{a};
      c.tau_from_solver = false;
    } else {
      throw ValidationError("sim.strategy.type: must be cutoff, join_always, join_never or randomized");
    }
  }
}

void parse_sweep(const json& node, ExperimentConfig& c) {
  const Section s(node, "sweep",
                  {"metric", "F_eff", "p_K", "beta", "K", "iso_beta", "iso_p_K", "resolution", "levels"});
  SweepSpec& w = c.sweep;
  w = SweepSpec{};
  w.baseline = c.model;
  w.metric = metric_from_string(s.text("metric", "v_safe"));
  w.F_eff = s.range("F_eff", w.F_eff);
  w.p_K = s.range("p_K", w.p_K);
  w.beta = s.range("beta", w.beta);
  w.K = s.range("K", w.K);
  w.iso_beta = s.range("iso_beta", w.iso_beta);
  w.iso_p_K = s.range("iso_p_K", w.iso_p_K);
  if (s.has("resolution")) {
    const json& r = s.at("resolution");
    if (!r.is_array() || r.size() != 2 || !r[0].is_number_integer() || !r[1].is_number_integer()) {
      throw ValidationError("sweep.resolution: must be a [beta_points, p_K_points] pair of integers");
    }
    w.beta_points = r[0].get<int>();
    w.p_K_points = r[1].get<int>();
  }
  c.levels = {500.0, 1000.0, 1500.0, 2000.0, 2500.0};
  if (s.has("levels")) {
    const json& l = s.at("levels");
    if (!l.is_array()) throw ValidationError("sweep.levels: must be an array of numbers");
    c.levels.clear();
    for (const json& v : l) {
      if (!v.is_number() || !(v.get<double>() > 0.0)) throw ValidationError("sweep.levels: entries must be numbers > 0");
      c.levels.push_back(v.get<double>());
    }
  }
  // Range checks against the baseline run in tornado and iso only, so other
  // commands accept any model.
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
  const Section top(doc, "", {"model", "global_game", "sim", "sweep"});
  ExperimentConfig c;
  c.model = parse_model(child(doc, "model"));
  c.game = parse_game(child(doc, "global_game"), c.model);
  parse_sim(child(doc, "sim"), c);
  parse_sweep(child(doc, "sweep"), c);
  return c;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot read '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("config: '" + path + "' is not valid JSON (" + e.what() + ")");
  }
  return parse_config(doc);
}

json config_to_json(const ExperimentConfig& c) {
  json model = {{"n", c.model.n}, {"K", c.model.K}, {"q", c.model.q}, {"beta", c.model.beta}, {"V", c.model.V}};
  if (c.model.pre_coordination_size) model["pre_coordination_size"] = *c.model.pre_coordination_size;
  if (c.model.sanctions.is_zipf()) {
    model["sanctions"] = {{"type", "zipf"}, {"C", c.model.sanctions.zipf_scale()}};
  } else {
    const auto v = c.model.sanctions.explicit_list();
    model["sanctions"] = {{"type", "explicit"}, {"values", std::vector<double>(v.begin(), v.end())}};
  }

  json prior;
  if (const auto* p = std::get_if<NormalPrior>(&c.game.prior)) {
    prior = {{"type", "normal"}, {"mean", p->mean}, {"sd", p->sd}};
  } else {
    const auto& u = std::get<UniformPrior>(c.game.prior);
    prior = {{"type", "uniform"}, {"lo", u.lo}, {"hi", u.hi}};
  }
  json prize = c.game.prize_map.kind == PrizeMap::Kind::Identity
                   ? json{{"type", "identity"}}
                   : json{{"type", "exponential"}, {"scale", c.game.prize_map.scale}};
  json game = {{"prior", prior},
               {"sigma", c.game.sigma},
               {"prize_map", prize},
               {"solver",
                {{"rel_tol", c.game.solver.rel_tol},
                 {"nodes", c.game.solver.nodes},
                 {"scan_points", c.game.solver.scan_points},
                 {"max_expansions", c.game.solver.max_expansions}}}};

  json strategy = std::visit(
      [&](const auto& s) -> json {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, JoinNever>) {
          return {{"type", "join_never"}};
        } else if constexpr (std::is_same_v<S, JoinAlways>) {
          return {{"type", "join_always"}};
        } else if constexpr (std::is_same_v<S, CutoffStrategy>) {
          return c.tau_from_solver ? json{{"type", "cutoff"}} : json{{"type", "cutoff"}, {"tau", s.tau}};
        } else {
          return {{"type", "randomized"}, {"alpha", s.alpha}};
        }
      },
      c.strategy);
  json sim = {{"replications", c.replications}, {"strategy", strategy}, {"threads", c.threads}};
  if (c.seed) sim["seed"] = *c.seed;
  if (c.fixed_theta) sim["fixed_theta"] = *c.fixed_theta;

  const SweepSpec& w = c.sweep;
  const auto pair = [](const Range& r) { return json::array({r.lo, r.hi}); };
  json sweep = {{"metric", to_string(w.metric)},
                {"F_eff", pair(w.F_eff)},
                {"p_K", pair(w.p_K)},
                {"beta", pair(w.beta)},
                {"K", json::array({static_cast<int>(w.K.lo), static_cast<int>(w.K.hi)})},
                {"iso_beta", pair(w.iso_beta)},
                {"iso_p_K", pair(w.iso_p_K)},
                {"resolution", json::array({w.beta_points, w.p_K_points})},
                {"levels", c.levels}};

  return {{"model", model}, {"global_game", game}, {"sim", sim}, {"sweep", sweep}};
}

SimConfig make_sim_config(const ExperimentConfig& c, std::optional<double> solved_tau, std::uint64_t seed) {
  SimConfig s;
  s.spec = c.game;
  s.fixed_theta = c.fixed_theta;
  s.replications = c.replications;
  s.seed = seed;
  s.threads = c.threads;
  s.strategy = c.strategy;
  if (c.tau_from_solver) {
    if (!solved_tau) throw SolverError("sim.strategy: cutoff requested from the solver but none was found");
    s.strategy = CutoffStrategy{*solved_tau};
  }
  return s;
}

}  // namespace collusion
