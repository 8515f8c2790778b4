#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace clo {

enum class NodeRole { ed, server };

/// Per-user parameters carried by an edge-device node.
struct UserParams {
  double arrival_prob = 0.5;      // lambda^k
  double du_bits = 6291456.0;     // W^k, 768 KB
  double target = 0.15;           // r^k
  double learning_rate = 0.5;     // gamma^k
  int delay_frames = 0;           // d^k
  double theta0 = 0.5;            // initial threshold

  bool operator==(const UserParams&) const = default;
};

struct NetworkDefaults {
  double path_loss_db = 90.0;
  double bandwidth_hz = 20e6;
  double p_max_w = 3.5;
  int r_max = 1;
  int i_max = 1;
  UserParams user;

  bool operator==(const NetworkDefaults&) const = default;
};

struct NodeConfig {
  std::string id;
  NodeRole role = NodeRole::server;
  std::optional<double> p_max_w;
  std::optional<int> i_max;
  double quality = 1.0;           // servers only; +inf means a perfect model
  std::optional<UserParams> user; // EDs only; falls back to defaults

  bool operator==(const NodeConfig&) const = default;
};

struct EdgeConfig {
  std::string from;
  std::string to;
  std::optional<double> path_loss_db;
  std::optional<double> bandwidth_hz;
  std::optional<int> r_max;

  bool operator==(const EdgeConfig&) const = default;
};

struct NetworkConfig {
  NetworkDefaults defaults;
  std::vector<NodeConfig> nodes;
  std::vector<EdgeConfig> edges;

  bool operator==(const NetworkConfig&) const = default;
};

struct NodeSpec {
  std::string id;
  NodeRole role = NodeRole::server;
  double p_max_w = 3.5;
  int i_max = 1;
  double quality = 1.0;
  UserParams user;
};

struct LinkSpec {
  std::size_t from = 0;
  std::size_t to = 0;
  double path_loss_db = 90.0;
  double bandwidth_hz = 20e6;
  int r_max = 1;
};

/// Immutable, validated network. Users are the EDs in declaration order;
/// queues are indexed by (node, user).
class Network {
 public:
  const std::vector<NodeSpec>& nodes() const noexcept { return nodes_; }
  const std::vector<LinkSpec>& links() const noexcept { return links_; }

  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t link_count() const noexcept { return links_.size(); }
  std::size_t user_count() const noexcept { return users_.size(); }

  const NodeSpec& node(std::size_t n) const { return nodes_.at(n); }
  const LinkSpec& link(std::size_t e) const { return links_.at(e); }

  bool is_server(std::size_t n) const { return nodes_.at(n).role == NodeRole::server; }
  bool is_ed(std::size_t n) const { return nodes_.at(n).role == NodeRole::ed; }

  /// Node index of the ED that owns user k.
  std::size_t user_node(std::size_t k) const { return users_.at(k); }
  /// User index of an ED node, or nullopt for servers.
  std::optional<std::size_t> user_of(std::size_t n) const;

  const std::vector<std::size_t>& users() const noexcept { return users_; }
  const std::vector<std::size_t>& servers() const noexcept { return servers_; }

  const std::vector<std::size_t>& out_links(std::size_t n) const { return out_.at(n); }
  const std::vector<std::size_t>& in_links(std::size_t n) const { return in_.at(n); }

  std::size_t out_degree(std::size_t n) const { return out_.at(n).size(); }
  std::size_t in_degree(std::size_t n) const { return in_.at(n).size(); }

  std::optional<std::size_t> find_node(const std::string& id) const;

  /// Hop distance from the nearest ED (0 for EDs); unreachable nodes get -1.
  int depth(std::size_t n) const { return depth_.at(n); }

 private:
  friend Network build_network(const NetworkConfig& config);

  std::vector<NodeSpec> nodes_;
  std::vector<LinkSpec> links_;
  std::vector<std::size_t> users_;
  std::vector<std::size_t> servers_;
  std::vector<std::vector<std::size_t>> out_;
  std::vector<std::vector<std::size_t>> in_;
  std::vector<int> depth_;
};

/// Validates the configuration and precomputes degrees. Throws ConfigError
/// naming every offending field.
Network build_network(const NetworkConfig& config);

/// D = N K + K sum_n (out_deg^2 + in_deg^2) / 2, the constant of the
/// drift-plus-penalty bound.
double drift_constant(const Network& network, std::size_t users);

}  // namespace clo
