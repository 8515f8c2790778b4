#include "clo/network.hpp"

#include <cmath>
#include <deque>
#include <map>
#include <set>

#include "clo/errors.hpp"

namespace clo {

namespace {

std::string at(const std::string& base, std::size_t i) {
  return base + "[" + std::to_string(i) + "]";
}

void check_user(const UserParams& u, const std::string& path, const std::string& who,
                std::vector<ConfigIssue>& issues) {
  if (!(u.arrival_prob >= 0.0 && u.arrival_prob <= 1.0))
    issues.push_back({path + ".arrival_prob", "must lie in [0, 1] (" + who + ")"});
  if (!(u.du_bits > 0.0) || !std::isfinite(u.du_bits))
    issues.push_back({path + ".du_bits", "must be positive (" + who + ")"});
  if (!(u.target > 0.0 && u.target < 1.0))
    issues.push_back({path + ".target", "must lie in (0, 1) (" + who + ")"});
  if (!(u.learning_rate > 0.0) || !std::isfinite(u.learning_rate))
    issues.push_back({path + ".learning_rate", "must be positive (" + who + ")"});
  if (u.delay_frames < 0) issues.push_back({path + ".delay_frames", "must be >= 0 (" + who + ")"});
  if (!std::isfinite(u.theta0)) issues.push_back({path + ".theta0", "must be finite (" + who + ")"});
}

}  // namespace

std::optional<std::size_t> Network::user_of(std::size_t n) const {
  for (std::size_t k = 0; k < users_.size(); ++k)
    if (users_[k] == n) return k;
  return std::nullopt;
}

std::optional<std::size_t> Network::find_node(const std::string& id) const {
  for (std::size_t n = 0; n < nodes_.size(); ++n)
    if (nodes_[n].id == id) return n;
  return std::nullopt;
}

Network build_network(const NetworkConfig& config) {
  std::vector<ConfigIssue> issues;
  const auto& d = config.defaults;
  if (!(d.path_loss_db >= 0.0) || !std::isfinite(d.path_loss_db))
    issues.push_back({"network.defaults.path_loss_db", "must be finite and >= 0"});
  if (!(d.bandwidth_hz > 0.0)) issues.push_back({"network.defaults.bandwidth_hz", "must be positive"});
  if (!(d.p_max_w > 0.0)) issues.push_back({"network.defaults.p_max_w", "must be positive"});
  if (d.r_max <= 0) issues.push_back({"network.defaults.r_max", "must be positive"});
  if (d.i_max <= 0) issues.push_back({"network.defaults.i_max", "must be positive"});
  check_user(d.user, "network.defaults.user", "default user", issues);

  Network net;
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < config.nodes.size(); ++i) {
    const auto& nc = config.nodes[i];
    const std::string path = at("network.nodes", i);
    if (nc.id.empty()) issues.push_back({path + ".id", "must not be empty"});
    if (!index.emplace(nc.id, i).second)
      issues.push_back({path + ".id", "duplicate node id '" + nc.id + "'"});
    NodeSpec spec;
    spec.id = nc.id;
    spec.role = nc.role;
    spec.p_max_w = nc.p_max_w.value_or(d.p_max_w);
    spec.i_max = nc.i_max.value_or(d.i_max);
    spec.quality = nc.quality;
    spec.user = nc.user.value_or(d.user);
    if (!(spec.p_max_w > 0.0)) issues.push_back({path + ".p_max_w", "must be positive"});
    if (nc.role == NodeRole::server) {
      if (spec.i_max <= 0) issues.push_back({path + ".i_max", "must be positive"});
      if (!(spec.quality >= 0.0)) issues.push_back({path + ".quality", "must be >= 0"});
      if (nc.user) issues.push_back({path + ".user", "only edge devices carry user parameters"});
    } else {
      if (nc.user) check_user(*nc.user, path + ".user", "user " + nc.id, issues);
    }
    net.nodes_.push_back(spec);
  }
  if (config.nodes.empty()) issues.push_back({"network.nodes", "at least one node is required"});

  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (std::size_t i = 0; i < config.edges.size(); ++i) {
    const auto& ec = config.edges[i];
    const std::string path = at("network.edges", i);
    const auto from = index.find(ec.from);
    const auto to = index.find(ec.to);
    if (from == index.end()) issues.push_back({path + ".from", "unknown node '" + ec.from + "'"});
    if (to == index.end()) issues.push_back({path + ".to", "unknown node '" + ec.to + "'"});
    LinkSpec link;
    link.path_loss_db = ec.path_loss_db.value_or(d.path_loss_db);
    link.bandwidth_hz = ec.bandwidth_hz.value_or(d.bandwidth_hz);
    link.r_max = ec.r_max.value_or(d.r_max);
    if (!(link.bandwidth_hz > 0.0)) issues.push_back({path + ".bandwidth_hz", "must be positive"});
    if (!std::isfinite(link.path_loss_db)) issues.push_back({path + ".path_loss_db", "must be finite"});
    if (link.r_max <= 0) issues.push_back({path + ".r_max", "must be positive"});
    if (from == index.end() || to == index.end()) continue;
    if (from->second == to->second) {
      issues.push_back({path, "self-loop on node '" + ec.from + "'"});
      continue;
    }
    if (!seen.emplace(from->second, to->second).second)
      issues.push_back({path, "duplicate edge " + ec.from + " -> " + ec.to});
    link.from = from->second;
    link.to = to->second;
    net.links_.push_back(link);
  }

  if (!issues.empty()) throw ConfigError(std::move(issues));

  const std::size_t n_nodes = net.nodes_.size();
  net.out_.assign(n_nodes, {});
  net.in_.assign(n_nodes, {});
  for (std::size_t e = 0; e < net.links_.size(); ++e) {
    net.out_[net.links_[e].from].push_back(e);
    net.in_[net.links_[e].to].push_back(e);
  }
  for (std::size_t n = 0; n < n_nodes; ++n) {
    if (net.nodes_[n].role == NodeRole::ed)
      net.users_.push_back(n);
    else
      net.servers_.push_back(n);
  }

  net.depth_.assign(n_nodes, -1);
  std::deque<std::size_t> frontier;
  for (auto u : net.users_) {
    net.depth_[u] = 0;
    frontier.push_back(u);
  }
  while (!frontier.empty()) {
    const auto n = frontier.front();
    frontier.pop_front();
    for (auto e : net.out_[n]) {
      const auto m = net.links_[e].to;
      if (net.depth_[m] < 0) {
        net.depth_[m] = net.depth_[n] + 1;
        frontier.push_back(m);
      }
    }
  }
  return net;
}

double drift_constant(const Network& network, std::size_t users) {
  double degrees = 0.0;
  for (std::size_t n = 0; n < network.node_count(); ++n) {
    const double out = static_cast<double>(network.out_degree(n));
    const double in = static_cast<double>(network.in_degree(n));
    degrees += (out * out + in * in) / 2.0;
  }
  const double k = static_cast<double>(users);
  return static_cast<double>(network.node_count()) * k + k * degrees;
}

}  // namespace clo
