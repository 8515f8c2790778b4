#include "clo/scenario.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <set>
#include <sstream>

#include "clo/errors.hpp"

namespace clo {

using nlohmann::json;

std::string to_string(Policy policy) {
  switch (policy) {
    case Policy::clo: return "clo";
    case Policy::lo_avg: return "lo_avg";
    case Policy::lo_outage: return "lo_outage";
  }
  return "?";
}

std::string to_string(SolverKind solver) { return solver == SolverKind::exact ? "exact" : "greedy"; }

std::string to_string(PredictorMode mode) {
  switch (mode) {
    case PredictorMode::oracle: return "oracle";
    case PredictorMode::noisy: return "noisy";
    case PredictorMode::table: return "table";
  }
  return "?";
}

std::string to_string(LossKind kind) {
  switch (kind) {
    case LossKind::miscoverage: return "miscoverage";
    case LossKind::fnr: return "fnr";
    case LossKind::set_size: return "set_size";
    case LossKind::fpr: return "fpr";
    case LossKind::relative_fp: return "relative_fp";
  }
  return "?";
}

double ScenarioConfig::effective_eta() const {
  if (run.beta) return *run.beta / (1.0 - *run.beta);
  return run.eta;
}

double ScenarioConfig::effective_V() const {
  if (run.beta) return run.V * (1.0 - *run.beta);
  return run.V;
}

namespace {

NodeConfig ed(const std::string& id) {
  NodeConfig n;
  n.id = id;
  n.role = NodeRole::ed;
  return n;
}

NodeConfig server(const std::string& id, double quality) {
  NodeConfig n;
  n.id = id;
  n.role = NodeRole::server;
  n.quality = quality;
  return n;
}

EdgeConfig edge(const std::string& from, const std::string& to,
                std::optional<double> path_loss = std::nullopt) {
  EdgeConfig e;
  e.from = from;
  e.to = to;
  e.path_loss_db = path_loss;
  return e;
}

}  // namespace

NetworkConfig single_hop_network(const NetworkDefaults& defaults) {
  NetworkConfig c;
  c.defaults = defaults;
  for (int k = 1; k <= 3; ++k) c.nodes.push_back(ed("ED" + std::to_string(k)));
  for (int k = 1; k <= 3; ++k) c.nodes.push_back(server("S" + std::to_string(k), 0.8));
  c.nodes.push_back(server("S4", 3.0));
  for (int k = 1; k <= 3; ++k) {
    const std::string e = "ED" + std::to_string(k);
    c.edges.push_back(edge(e, "S" + std::to_string(k), 40.0));
    c.edges.push_back(edge(e, "S4"));
  }
  return c;
}

NetworkConfig multi_hop_network(const NetworkDefaults& defaults) {
  NetworkConfig c;
  c.defaults = defaults;
  for (int k = 1; k <= 3; ++k) c.nodes.push_back(ed("ED" + std::to_string(k)));
  c.nodes.push_back(server("S1", 0.8));
  c.nodes.push_back(server("S2", 1.2));
  c.nodes.push_back(server("S3", 1.2));
  c.nodes.push_back(server("S4", 3.0));
  for (int k = 1; k <= 3; ++k) c.edges.push_back(edge("ED" + std::to_string(k), "S1"));
  c.edges.push_back(edge("S1", "S2"));
  c.edges.push_back(edge("S1", "S3"));
  c.edges.push_back(edge("S2", "S4"));
  c.edges.push_back(edge("S3", "S4"));
  return c;
}

ScenarioConfig default_scenario() {
  ScenarioConfig c;
  c.network = single_hop_network();
  for (std::uint64_t s = 1; s <= 30; ++s) c.run.seeds.push_back(s);
  return c;
}

namespace {

// Field-by-field reader that records problems instead of throwing.
class Reader {
 public:
  std::vector<ConfigIssue> issues;

  void fail(const std::string& path, const std::string& message) { issues.push_back({path, message}); }

  bool object(const json& j, const std::string& path) {
    if (j.is_object()) return true;
    fail(path, "expected an object");
    return false;
  }

  void keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = j.begin(); it != j.end(); ++it)
      if (!ok.count(it.key())) fail(join(path, it.key()), "unknown field");
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }

  void read(const json& j, const std::string& path, double& out) {
    if (j.is_number()) {
      out = j.get<double>();
    } else if (j.is_string() && (j == "inf" || j == "infinity")) {
      out = std::numeric_limits<double>::infinity();
    } else {
      fail(path, "expected a number");
    }
  }
  void read(const json& j, const std::string& path, int& out) {
    if (j.is_number_integer() && j.get<long long>() >= std::numeric_limits<int>::min() &&
        j.get<long long>() <= std::numeric_limits<int>::max())
      out = j.get<int>();
    else
      fail(path, "expected an integer");
  }
  void read(const json& j, const std::string& path, std::int64_t& out) {
    if (j.is_number_integer())
      out = j.get<std::int64_t>();
    else
      fail(path, "expected an integer");
  }
  void read(const json& j, const std::string& path, std::uint64_t& out) {
    if (j.is_number_unsigned() || (j.is_number_integer() && j.get<long long>() >= 0))
      out = j.get<std::uint64_t>();
    else
      fail(path, "expected a non-negative integer");
  }
  void read(const json& j, const std::string& path, bool& out) {
    if (j.is_boolean())
      out = j.get<bool>();
    else
      fail(path, "expected true or false");
  }
  void read(const json& j, const std::string& path, std::string& out) {
    if (j.is_string())
      out = j.get<std::string>();
    else
      fail(path, "expected a string");
  }
  template <class T>
  void read(const json& j, const std::string& path, std::optional<T>& out) {
    if (j.is_null()) {
      out.reset();
      return;
    }
    T v{};
    const auto before = issues.size();
    read(j, path, v);
    if (issues.size() == before) out = v;
  }
  template <class T>
  void read(const json& j, const std::string& path, std::vector<T>& out) {
    if (!j.is_array()) {
      fail(path, "expected a list");
      return;
    }
    out.clear();
    for (std::size_t i = 0; i < j.size(); ++i) {
      T v{};
      read(j[i], path + "[" + std::to_string(i) + "]", v);
      out.push_back(v);
    }
  }

  template <class T>
  void field(const json& obj, const std::string& path, const char* key, T& out) {
    if (obj.contains(key)) read(obj.at(key), join(path, key), out);
  }

  template <class E>
  void choice(const json& obj, const std::string& path, const char* key, E& out,
              std::initializer_list<std::pair<const char*, E>> names) {
    if (!obj.contains(key)) return;
    const auto& j = obj.at(key);
    std::string allowed;
    for (const auto& [name, value] : names) {
      if (j.is_string() && j.get<std::string>() == name) {
        out = value;
        return;
      }
      allowed += allowed.empty() ? name : std::string(", ") + name;
    }
    fail(join(path, key), "expected one of: " + allowed);
  }
};

void read_user(Reader& r, const json& j, const std::string& path, UserParams& u) {
  if (!r.object(j, path)) return;
  r.keys(j, path, {"arrival_prob", "du_bits", "target", "learning_rate", "delay_frames", "theta0"});
  r.field(j, path, "arrival_prob", u.arrival_prob);
  r.field(j, path, "du_bits", u.du_bits);
  r.field(j, path, "target", u.target);
  r.field(j, path, "learning_rate", u.learning_rate);
  r.field(j, path, "delay_frames", u.delay_frames);
  r.field(j, path, "theta0", u.theta0);
}

void read_network(Reader& r, const json& j, const std::string& path, NetworkConfig& net) {
  if (!r.object(j, path)) return;
  r.keys(j, path, {"preset", "defaults", "nodes", "edges"});
  NetworkDefaults defaults;
  if (j.contains("defaults")) {
    const auto& d = j.at("defaults");
    const std::string dp = path + ".defaults";
    if (r.object(d, dp)) {
      r.keys(d, dp, {"path_loss_db", "bandwidth_hz", "p_max_w", "r_max", "i_max", "user"});
      r.field(d, dp, "path_loss_db", defaults.path_loss_db);
      r.field(d, dp, "bandwidth_hz", defaults.bandwidth_hz);
      r.field(d, dp, "p_max_w", defaults.p_max_w);
      r.field(d, dp, "r_max", defaults.r_max);
      r.field(d, dp, "i_max", defaults.i_max);
      if (d.contains("user")) read_user(r, d.at("user"), dp + ".user", defaults.user);
    }
  }
  const bool explicit_graph = j.contains("nodes") || j.contains("edges");
  std::string preset = explicit_graph ? "" : "single_hop";
  r.field(j, path, "preset", preset);
  if (!preset.empty() && explicit_graph) r.fail(path + ".preset", "cannot be combined with nodes/edges");
  if (preset == "single_hop") {
    net = single_hop_network(defaults);
    return;
  }
  if (preset == "multi_hop") {
    net = multi_hop_network(defaults);
    return;
  }
  if (!preset.empty()) {
    r.fail(path + ".preset", "expected one of: single_hop, multi_hop");
    return;
  }
  net = NetworkConfig{};
  net.defaults = defaults;
  if (j.contains("nodes")) {
    const auto& nodes = j.at("nodes");
    if (!nodes.is_array()) {
      r.fail(path + ".nodes", "expected a list");
    } else {
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        const std::string np = path + ".nodes[" + std::to_string(i) + "]";
        NodeConfig n;
        if (!r.object(nodes[i], np)) continue;
        r.keys(nodes[i], np, {"id", "role", "p_max_w", "i_max", "quality", "user"});
        r.field(nodes[i], np, "id", n.id);
        r.choice(nodes[i], np, "role", n.role, {{"ed", NodeRole::ed}, {"server", NodeRole::server}});
        if (!nodes[i].contains("role")) r.fail(np + ".role", "is required");
        r.field(nodes[i], np, "p_max_w", n.p_max_w);
        r.field(nodes[i], np, "i_max", n.i_max);
        r.field(nodes[i], np, "quality", n.quality);
        if (nodes[i].contains("user")) {
          UserParams u = defaults.user;
          read_user(r, nodes[i].at("user"), np + ".user", u);
          n.user = u;
        }
        net.nodes.push_back(n);
      }
    }
  }
  if (j.contains("edges")) {
    const auto& edges = j.at("edges");
    if (!edges.is_array()) {
      r.fail(path + ".edges", "expected a list");
    } else {
      for (std::size_t i = 0; i < edges.size(); ++i) {
        const std::string ep = path + ".edges[" + std::to_string(i) + "]";
        EdgeConfig e;
        if (!r.object(edges[i], ep)) continue;
        r.keys(edges[i], ep, {"from", "to", "path_loss_db", "bandwidth_hz", "r_max"});
        r.field(edges[i], ep, "from", e.from);
        r.field(edges[i], ep, "to", e.to);
        r.field(edges[i], ep, "path_loss_db", e.path_loss_db);
        r.field(edges[i], ep, "bandwidth_hz", e.bandwidth_hz);
        r.field(edges[i], ep, "r_max", e.r_max);
        net.edges.push_back(e);
      }
    }
  }
}

const std::initializer_list<std::pair<const char*, LossKind>> kLossNames{
    {"miscoverage", LossKind::miscoverage}, {"fnr", LossKind::fnr},
    {"set_size", LossKind::set_size},       {"fpr", LossKind::fpr},
    {"relative_fp", LossKind::relative_fp}};

json number(double v) {
  if (std::isinf(v)) return v > 0 ? json("inf") : json("-inf");
  return json(v);
}

json user_json(const UserParams& u) {
  return json{{"arrival_prob", u.arrival_prob}, {"du_bits", u.du_bits},
              {"target", u.target},             {"learning_rate", u.learning_rate},
              {"delay_frames", u.delay_frames}, {"theta0", u.theta0}};
}

void in_range(std::vector<ConfigIssue>& out, bool ok, const std::string& path, const std::string& msg) {
  if (!ok) out.push_back({path, msg});
}

}  // namespace

std::vector<ConfigIssue> validate_scenario(const ScenarioConfig& c) {
  std::vector<ConfigIssue> out;
  in_range(out, c.schema == 1, "schema", "unsupported schema version (expected 1)");
  in_range(out, !c.name.empty(), "name", "must not be empty");
  in_range(out, c.channel.slot_s > 0.0, "channel.slot_s", "must be positive");
  in_range(out, std::isfinite(c.channel.noise_dbm_per_hz), "channel.noise_dbm_per_hz", "must be finite");
  in_range(out, c.tasks.height >= 4 && c.tasks.width >= 4, "tasks", "grid must be at least 4x4");
  in_range(out, c.tasks.contrast >= 0.0 && c.tasks.contrast <= 0.5, "tasks.contrast", "must lie in [0, 0.5]");
  in_range(out, c.tasks.noise >= 0.0, "tasks.noise", "must be >= 0");
  in_range(out, c.tasks.coverage_min > 0.0 && c.tasks.coverage_min <= c.tasks.coverage_max &&
                    c.tasks.coverage_max < 1.0,
           "tasks.coverage_min", "need 0 < coverage_min <= coverage_max < 1");
  in_range(out, is_reliability_loss(c.losses.reliability), "losses.reliability",
           "must be a reliability loss (miscoverage, fnr)");
  in_range(out, is_precision_loss(c.losses.precision), "losses.precision",
           "must be a precision loss (set_size, fpr, relative_fp)");
  in_range(out, c.run.slots > 0, "run.slots", "must be positive");
  in_range(out, c.run.frame > 0, "run.frame", "must be positive");
  if (c.run.slots > 0 && c.run.frame > 0 && c.run.slots % c.run.frame != 0)
    out.push_back({"run.slots", "T not divisible by S (" + std::to_string(c.run.slots) + " % " +
                                    std::to_string(c.run.frame) + " != 0)"});
  in_range(out, c.run.V > 0.0, "run.V", "must be positive");
  in_range(out, c.run.eta >= 0.0, "run.eta", "must be >= 0");
  if (c.run.beta) in_range(out, *c.run.beta >= 0.0 && *c.run.beta < 1.0, "run.beta", "must lie in [0, 1)");
  in_range(out, !c.run.seeds.empty(), "run.seeds", "must not be empty");
  in_range(out, c.run.exact_var_limit > 0, "run.exact_var_limit", "must be positive");
  in_range(out, c.run.converged_window > 0 && c.run.converged_window <= c.run.slots,
           "run.converged_window", "must lie in [1, slots]");
  in_range(out, c.predictor.stddev >= 0.0, "predictor.stddev", "must be >= 0");
  in_range(out, c.lo.step_z > 0.0, "lo.step_z", "must be positive");
  in_range(out, c.lo.step_y > 0.0, "lo.step_y", "must be positive");
  in_range(out, c.lo.epsilon > 0.0 && c.lo.epsilon < 1.0, "lo.epsilon", "must lie in (0, 1)");
  in_range(out, c.lo.calibration_tasks > 0, "lo.calibration_tasks", "must be positive");
  in_range(out, !c.lo.theta_grid.empty(), "lo.theta_grid", "must not be empty");
  for (std::size_t i = 1; i < c.lo.theta_grid.size(); ++i)
    if (!(c.lo.theta_grid[i] > c.lo.theta_grid[i - 1])) {
      out.push_back({"lo.theta_grid", "values must be sorted strictly increasing"});
      break;
    }
  in_range(out, c.latency.q_avg > 0.0, "latency.q_avg", "must be positive");
  in_range(out, c.latency.step > 0.0, "latency.step", "must be positive");
  in_range(out, c.nonstationary.period > 0, "nonstationary.period", "must be positive");
  in_range(out, c.nonstationary.switch_prob >= 0.0 && c.nonstationary.switch_prob <= 1.0,
           "nonstationary.switch_prob", "must lie in [0, 1]");
  for (std::size_t i = 0; i < c.nonstationary.levels.size(); ++i)
    in_range(out, c.nonstationary.levels[i] >= 0.0 && c.nonstationary.levels[i] <= 1.0,
             "nonstationary.levels[" + std::to_string(i) + "]", "must lie in [0, 1]");
  if (c.nonstationary.enabled)
    in_range(out, c.nonstationary.levels.size() >= 2, "nonstationary.levels", "needs at least two levels");
  for (std::size_t i = 0; i < c.sweep.etas.size(); ++i)
    in_range(out, c.sweep.etas[i] >= 0.0, "sweep.etas[" + std::to_string(i) + "]", "must be >= 0");
  try {
    const Network net = build_network(c.network);
    in_range(out, net.user_count() >= 1, "network.nodes", "at least one edge device is required");
    in_range(out, net.user_count() <= 64, "network.nodes", "at most 64 edge devices are supported");
  } catch (const ConfigError& e) {
    out.insert(out.end(), e.issues().begin(), e.issues().end());
  }
  return out;
}

ScenarioConfig parse_scenario(const json& doc) {
  ScenarioConfig c = default_scenario();
  Reader r;
  if (!doc.is_object()) throw ConfigError("", "configuration must be an object");
  r.keys(doc, "", {"schema", "name", "policy", "network", "channel", "tasks", "losses", "run",
                   "predictor", "lo", "latency", "nonstationary", "sweep"});
  r.field(doc, "", "schema", c.schema);
  r.field(doc, "", "name", c.name);
  r.choice(doc, "", "policy", c.policy,
           {{"clo", Policy::clo}, {"lo_avg", Policy::lo_avg}, {"lo_outage", Policy::lo_outage}});
  if (doc.contains("network")) read_network(r, doc.at("network"), "network", c.network);

  if (doc.contains("channel") && r.object(doc.at("channel"), "channel")) {
    const auto& j = doc.at("channel");
    r.keys(j, "channel", {"noise_dbm_per_hz", "slot_s", "fading"});
    r.field(j, "channel", "noise_dbm_per_hz", c.channel.noise_dbm_per_hz);
    r.field(j, "channel", "slot_s", c.channel.slot_s);
    r.field(j, "channel", "fading", c.channel.fading);
  }
  if (doc.contains("tasks") && r.object(doc.at("tasks"), "tasks")) {
    const auto& j = doc.at("tasks");
    r.keys(j, "tasks", {"height", "width", "contrast", "noise", "coverage_min", "coverage_max"});
    r.field(j, "tasks", "height", c.tasks.height);
    r.field(j, "tasks", "width", c.tasks.width);
    r.field(j, "tasks", "contrast", c.tasks.contrast);
    r.field(j, "tasks", "noise", c.tasks.noise);
    r.field(j, "tasks", "coverage_min", c.tasks.coverage_min);
    r.field(j, "tasks", "coverage_max", c.tasks.coverage_max);
  }
  if (doc.contains("losses") && r.object(doc.at("losses"), "losses")) {
    const auto& j = doc.at("losses");
    r.keys(j, "losses", {"reliability", "precision"});
    r.choice(j, "losses", "reliability", c.losses.reliability, kLossNames);
    r.choice(j, "losses", "precision", c.losses.precision, kLossNames);
  }
  if (doc.contains("run") && r.object(doc.at("run"), "run")) {
    const auto& j = doc.at("run");
    r.keys(j, "run", {"slots", "frame", "V", "eta", "beta", "seeds", "solver", "exact_var_limit",
                      "converged_window"});
    r.field(j, "run", "slots", c.run.slots);
    r.field(j, "run", "frame", c.run.frame);
    r.field(j, "run", "V", c.run.V);
    r.field(j, "run", "eta", c.run.eta);
    r.field(j, "run", "beta", c.run.beta);
    r.field(j, "run", "seeds", c.run.seeds);
    r.choice(j, "run", "solver", c.run.solver, {{"exact", SolverKind::exact}, {"greedy", SolverKind::greedy}});
    r.field(j, "run", "exact_var_limit", c.run.exact_var_limit);
    r.field(j, "run", "converged_window", c.run.converged_window);
    if (!j.contains("converged_window") && c.run.slots > 0 && c.run.slots < c.run.converged_window)
      c.run.converged_window = static_cast<int>(c.run.slots);
  }
  if (doc.contains("predictor") && r.object(doc.at("predictor"), "predictor")) {
    const auto& j = doc.at("predictor");
    r.keys(j, "predictor", {"mode", "bias", "stddev"});
    r.choice(j, "predictor", "mode", c.predictor.mode,
             {{"oracle", PredictorMode::oracle}, {"noisy", PredictorMode::noisy}, {"table", PredictorMode::table}});
    r.field(j, "predictor", "bias", c.predictor.bias);
    r.field(j, "predictor", "stddev", c.predictor.stddev);
  }
  if (doc.contains("lo") && r.object(doc.at("lo"), "lo")) {
    const auto& j = doc.at("lo");
    r.keys(j, "lo", {"step_z", "step_y", "l_max", "epsilon", "theta_grid", "calibration_tasks"});
    r.field(j, "lo", "step_z", c.lo.step_z);
    r.field(j, "lo", "step_y", c.lo.step_y);
    r.field(j, "lo", "l_max", c.lo.l_max);
    r.field(j, "lo", "epsilon", c.lo.epsilon);
    r.field(j, "lo", "theta_grid", c.lo.theta_grid);
    r.field(j, "lo", "calibration_tasks", c.lo.calibration_tasks);
  }
  if (doc.contains("latency") && r.object(doc.at("latency"), "latency")) {
    const auto& j = doc.at("latency");
    r.keys(j, "latency", {"enabled", "q_avg", "step"});
    r.field(j, "latency", "enabled", c.latency.enabled);
    r.field(j, "latency", "q_avg", c.latency.q_avg);
    r.field(j, "latency", "step", c.latency.step);
  }
  if (doc.contains("nonstationary") && r.object(doc.at("nonstationary"), "nonstationary")) {
    const auto& j = doc.at("nonstationary");
    r.keys(j, "nonstationary", {"enabled", "period", "switch_prob", "levels"});
    r.field(j, "nonstationary", "enabled", c.nonstationary.enabled);
    r.field(j, "nonstationary", "period", c.nonstationary.period);
    r.field(j, "nonstationary", "switch_prob", c.nonstationary.switch_prob);
    r.field(j, "nonstationary", "levels", c.nonstationary.levels);
  }
  if (doc.contains("sweep") && r.object(doc.at("sweep"), "sweep")) {
    const auto& j = doc.at("sweep");
    r.keys(j, "sweep", {"etas"});
    r.field(j, "sweep", "etas", c.sweep.etas);
  }

  auto issues = std::move(r.issues);
  if (issues.empty()) issues = validate_scenario(c);
  if (!issues.empty()) throw ConfigError(std::move(issues));
  return c;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open configuration file");
  json doc;
  try {
    doc = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(path, std::string("malformed JSON: ") + e.what());
  }
  return parse_scenario(doc);
}

json to_json(const ScenarioConfig& c) {
  json net;
  const auto& d = c.network.defaults;
  net["defaults"] = {{"path_loss_db", d.path_loss_db}, {"bandwidth_hz", d.bandwidth_hz},
                     {"p_max_w", d.p_max_w},           {"r_max", d.r_max},
                     {"i_max", d.i_max},               {"user", user_json(d.user)}};
  net["nodes"] = json::array();
  for (const auto& n : c.network.nodes) {
    json j{{"id", n.id}, {"role", n.role == NodeRole::ed ? "ed" : "server"}, {"quality", number(n.quality)}};
    if (n.p_max_w) j["p_max_w"] = *n.p_max_w;
    if (n.i_max) j["i_max"] = *n.i_max;
    if (n.user) j["user"] = user_json(*n.user);
    net["nodes"].push_back(j);
  }
  net["edges"] = json::array();
  for (const auto& e : c.network.edges) {
    json j{{"from", e.from}, {"to", e.to}};
    if (e.path_loss_db) j["path_loss_db"] = *e.path_loss_db;
    if (e.bandwidth_hz) j["bandwidth_hz"] = *e.bandwidth_hz;
    if (e.r_max) j["r_max"] = *e.r_max;
    net["edges"].push_back(j);
  }

  json run{{"slots", c.run.slots},
           {"frame", c.run.frame},
           {"V", c.run.V},
           {"eta", c.run.eta},
           {"seeds", c.run.seeds},
           {"solver", to_string(c.run.solver)},
           {"exact_var_limit", c.run.exact_var_limit},
           {"converged_window", c.run.converged_window}};
  if (c.run.beta) run["beta"] = *c.run.beta;
  json lo{{"step_z", c.lo.step_z},
          {"step_y", c.lo.step_y},
          {"epsilon", c.lo.epsilon},
          {"theta_grid", c.lo.theta_grid},
          {"calibration_tasks", c.lo.calibration_tasks}};
  if (c.lo.l_max) lo["l_max"] = *c.lo.l_max;

  return json{
      {"schema", c.schema},
      {"name", c.name},
      {"policy", to_string(c.policy)},
      {"network", net},
      {"channel",
       {{"noise_dbm_per_hz", c.channel.noise_dbm_per_hz}, {"slot_s", c.channel.slot_s}, {"fading", c.channel.fading}}},
      {"tasks",
       {{"height", c.tasks.height},
        {"width", c.tasks.width},
        {"contrast", c.tasks.contrast},
        {"noise", c.tasks.noise},
        {"coverage_min", c.tasks.coverage_min},
        {"coverage_max", c.tasks.coverage_max}}},
      {"losses", {{"reliability", to_string(c.losses.reliability)}, {"precision", to_string(c.losses.precision)}}},
      {"run", run},
      {"predictor", {{"mode", to_string(c.predictor.mode)}, {"bias", c.predictor.bias}, {"stddev", c.predictor.stddev}}},
      {"lo", lo},
      {"latency", {{"enabled", c.latency.enabled}, {"q_avg", c.latency.q_avg}, {"step", c.latency.step}}},
      {"nonstationary",
       {{"enabled", c.nonstationary.enabled},
        {"period", c.nonstationary.period},
        {"switch_prob", c.nonstationary.switch_prob},
        {"levels", c.nonstationary.levels}}},
      {"sweep", {{"etas", c.sweep.etas}}},
  };
}

}  // namespace clo
