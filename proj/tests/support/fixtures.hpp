#pragma once

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "clo/channel.hpp"
#include "clo/network.hpp"
#include "clo/queueing.hpp"
#include "clo/slot_optimizer.hpp"
#include "oracles/oracles.hpp"

namespace fixtures {

inline clo::NodeConfig ed_node(const std::string& id) {
  clo::NodeConfig n;
  n.id = id;
  n.role = clo::NodeRole::ed;
  return n;
}

inline clo::NodeConfig server_node(const std::string& id, double quality = 1.0) {
  clo::NodeConfig n;
  n.id = id;
  n.role = clo::NodeRole::server;
  n.quality = quality;
  return n;
}

inline clo::EdgeConfig edge(const std::string& a, const std::string& b) {
  clo::EdgeConfig e;
  e.from = a;
  e.to = b;
  return e;
}

/// Fills a FIFO with `count` placeholder DUs.
inline void fill(clo::QueueState& q, std::size_t n, std::size_t k, int count, clo::DuId& next) {
  for (int i = 0; i < count; ++i) q.fifo(n, k).push_back({next++, 1});
}

/// Library-side twin of an oracle instance. Owns everything the problem
/// points to, so it stays at a fixed address.
struct Built {
  clo::Network net;
  clo::QueueState queues;
  clo::ChannelMatrix channels;
  clo::SlotProblem problem;

  Built() = default;
  Built(const Built&) = delete;
  Built& operator=(const Built&) = delete;
};

inline std::unique_ptr<Built> build(const oracle::SlotInstance& s) {
  clo::NetworkConfig cfg;
  for (int n = 0; n < s.nodes; ++n) {
    auto node = s.server[n] ? server_node("N" + std::to_string(n)) : ed_node("N" + std::to_string(n));
    node.p_max_w = s.p_max[n];
    if (s.server[n]) node.i_max = s.i_max[n];
    if (!s.server[n]) {
      clo::UserParams u;
      u.du_bits = s.bits[static_cast<std::size_t>(n)];
      node.user = u;
    }
    cfg.nodes.push_back(node);
  }
  for (std::size_t e = 0; e < s.links.size(); ++e) {
    auto ec = edge("N" + std::to_string(s.links[e].first), "N" + std::to_string(s.links[e].second));
    ec.bandwidth_hz = s.bandwidth[e];
    ec.r_max = s.r_max[e];
    cfg.edges.push_back(ec);
  }
  auto b = std::make_unique<Built>();
  b->net = clo::build_network(cfg);
  b->queues = clo::QueueState(s.nodes, s.users);
  clo::DuId id = 1;
  for (int n = 0; n < s.nodes; ++n)
    for (int k = 0; k < s.users; ++k) fill(b->queues, n, k, s.q[n * s.users + k], id);
  b->channels.gain = s.gain;
  b->problem = clo::make_slot_problem(b->net, b->queues, b->channels, s.V, s.eta, s.slot, s.n0);
  b->problem.precision_hat = s.fhat;
  b->problem.processing_penalty = s.penalty;
  b->problem.backlog_bonus = s.bonus;
  return b;
}

/// Canonical bit vector of a library action set.
inline oracle::Bits to_bits(const oracle::SlotInstance& s, const clo::SlotActions& a) {
  oracle::Bits x(s.vars(), 0);
  for (auto i : clo::chosen_variables(a)) x.at(i) = 1;
  return x;
}

}  // namespace fixtures
