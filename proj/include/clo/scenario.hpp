#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "clo/errors.hpp"
#include "clo/network.hpp"
#include "clo/slot_optimizer.hpp"
#include "clo/tasks.hpp"

namespace clo {

enum class Policy { clo, lo_avg, lo_outage };
enum class SolverKind { exact, greedy };

std::string to_string(Policy policy);
std::string to_string(SolverKind solver);
std::string to_string(PredictorMode mode);
std::string to_string(LossKind kind);

struct ChannelConfig {
  double noise_dbm_per_hz = -174.0;
  double slot_s = 0.05;
  bool fading = true;

  bool operator==(const ChannelConfig&) const = default;
};

struct LossConfig {
  LossKind reliability = LossKind::fnr;
  LossKind precision = LossKind::relative_fp;

  bool operator==(const LossConfig&) const = default;
};

struct RunConfig {
  std::int64_t slots = 10000;
  int frame = 10;
  double V = 200.0;
  double eta = 0.5;
  std::optional<double> beta;  // (1 - beta) E + beta F, overrides eta when set
  std::vector<std::uint64_t> seeds;
  SolverKind solver = SolverKind::exact;
  int exact_var_limit = 20;
  int converged_window = 1000;

  bool operator==(const RunConfig&) const = default;
};

struct PredictorConfig {
  PredictorMode mode = PredictorMode::oracle;
  double bias = 0.0;
  double stddev = 0.0;

  bool operator==(const PredictorConfig&) const = default;
};

struct LoConfig {
  double step_z = 0.5;
  double step_y = 2.0;
  std::optional<double> l_max;  // defaults to 1.1 r^k per user
  double epsilon = 0.32;
  std::vector<double> theta_grid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  int calibration_tasks = 500;

  bool operator==(const LoConfig&) const = default;
};

struct LatencyConfig {
  bool enabled = false;
  double q_avg = 4.0;
  double step = 1.0;

  bool operator==(const LatencyConfig&) const = default;
};

struct NonStationaryConfig {
  bool enabled = false;
  int period = 100;
  double switch_prob = 0.5;
  std::vector<double> levels{0.4, 0.8};

  bool operator==(const NonStationaryConfig&) const = default;
};

struct SweepConfig {
  std::vector<double> etas{0.01, 0.05, 0.1, 0.2, 0.4, 0.5};

  bool operator==(const SweepConfig&) const = default;
};

struct ScenarioConfig {
  int schema = 1;
  std::string name = "single_hop";
  Policy policy = Policy::clo;
  NetworkConfig network;
  ChannelConfig channel;
  TaskGenConfig tasks;
  LossConfig losses;
  RunConfig run;
  PredictorConfig predictor;
  LoConfig lo;
  LatencyConfig latency;
  NonStationaryConfig nonstationary;
  SweepConfig sweep;

  /// eta and V actually used by the optimiser once beta is resolved.
  double effective_eta() const;
  double effective_V() const;

  bool operator==(const ScenarioConfig&) const = default;
};

/// Single-hop topology: three EDs, each with a co-located light model
/// (S1..S3) behind a short link, and a shared heavy server S4.
NetworkConfig single_hop_network(const NetworkDefaults& defaults = {});

/// Multi-hop topology: ED1..ED3 -> S1 -> {S2, S3} -> S4 with model quality
/// increasing with depth.
NetworkConfig multi_hop_network(const NetworkDefaults& defaults = {});

/// Default scenario: single-hop network with the reference physical layer.
ScenarioConfig default_scenario();

/// Parses and validates. Missing fields take defaults; every violation is
/// collected into one ConfigError with dotted paths.
ScenarioConfig parse_scenario(const nlohmann::json& doc);
ScenarioConfig load_scenario(const std::string& path);

/// Cross-field checks on an already-typed config. Returns all issues.
std::vector<ConfigIssue> validate_scenario(const ScenarioConfig& config);

/// Fully explicit serialisation; parse_scenario(to_json(c)) == c.
nlohmann::json to_json(const ScenarioConfig& config);

}  // namespace clo
