#include "clo/queueing.hpp"

#include <algorithm>
#include <string>

#include "clo/errors.hpp"

namespace clo {

QueueState::QueueState(std::size_t nodes, std::size_t users)
    : nodes_(nodes), users_(users), fifos_(nodes * users) {}

std::int64_t QueueState::head_generation(std::size_t n, std::size_t k) const {
  const auto& q = fifo(n, k);
  return q.empty() ? 0 : q.front().generated_slot;
}

const QueuedDu& QueueState::head(std::size_t n, std::size_t k) const {
  const auto& q = fifo(n, k);
  if (q.empty()) throw ContractViolation("head of an empty FIFO");
  return q.front();
}

int QueueState::user_backlog(std::size_t k) const {
  int total = 0;
  for (std::size_t n = 0; n < nodes_; ++n) total += length(n, k);
  return total;
}

int QueueState::total_backlog() const {
  int total = 0;
  for (const auto& q : fifos_) total += static_cast<int>(q.size());
  return total;
}

int QueueState::max_length() const {
  int best = 0;
  for (const auto& q : fifos_) best = std::max(best, static_cast<int>(q.size()));
  return best;
}

std::vector<int> QueueState::lengths() const {
  std::vector<int> out(fifos_.size());
  for (std::size_t i = 0; i < fifos_.size(); ++i) out[i] = static_cast<int>(fifos_[i].size());
  return out;
}

SlotActions::SlotActions(std::size_t links, std::size_t nodes, std::size_t users)
    : links_(links),
      nodes_(nodes),
      users_(users),
      route_(links * users, 0),
      process_(nodes * users, 0),
      power_(links, 0.0) {}

int SlotActions::transmissions() const {
  return static_cast<int>(std::count(route_.begin(), route_.end(), std::uint8_t{1}));
}

int SlotActions::decisions() const {
  return static_cast<int>(std::count(process_.begin(), process_.end(), std::uint8_t{1}));
}

int SlotActions::link_load(std::size_t e) const {
  int load = 0;
  for (std::size_t k = 0; k < users_; ++k) load += route(e, k);
  return load;
}

int SlotActions::uses(const Network& network, std::size_t n, std::size_t k) const {
  int u = process(n, k) ? 1 : 0;
  for (auto e : network.out_links(n)) u += route(e, k);
  return u;
}

std::vector<Decision> apply_slot(QueueState& queues, const Network& network,
                                 const SlotActions& actions,
                                 std::span<const std::uint8_t> arrivals,
                                 std::span<const QueuedDu> new_dus) {
  const std::size_t N = network.node_count();
  const std::size_t K = network.user_count();
  if (queues.nodes() != N || queues.users() != K || actions.links() != network.link_count() ||
      arrivals.size() != K || new_dus.size() != K)
    throw ContractViolation("apply_slot: dimension mismatch");

  for (std::size_t n = 0; n < N; ++n)
    for (std::size_t k = 0; k < K; ++k) {
      if (actions.uses(network, n, k) > queues.length(n, k))
        throw ContractViolation("apply_slot: departures exceed FIFO (" + network.node(n).id +
                                ", user " + std::to_string(k) + ")");
      if (actions.process(n, k) && !network.is_server(n))
        throw ContractViolation("apply_slot: processing at non-server " + network.node(n).id);
    }

  std::vector<Decision> decisions;
  for (std::size_t n = 0; n < N; ++n) {
    if (!network.is_server(n)) continue;
    for (std::size_t k = 0; k < K; ++k) {
      if (!actions.process(n, k)) continue;
      auto& q = queues.fifo(n, k);
      decisions.push_back({n, k, q.front()});
      q.pop_front();
    }
  }

  std::vector<std::pair<std::size_t, QueuedDu>> moved;  // (link, DU)
  for (std::size_t e = 0; e < network.link_count(); ++e) {
    const auto from = network.link(e).from;
    for (std::size_t k = 0; k < K; ++k) {
      if (!actions.route(e, k)) continue;
      auto& q = queues.fifo(from, k);
      moved.emplace_back(e * K + k, q.front());
      q.pop_front();
    }
  }
  for (const auto& [ek, du] : moved) {
    const std::size_t e = ek / K;
    const std::size_t k = ek % K;
    queues.fifo(network.link(e).to, k).push_back(du);
  }
  for (std::size_t k = 0; k < K; ++k)
    if (arrivals[k]) queues.fifo(network.user_node(k), k).push_back(new_dus[k]);
  return decisions;
}

std::vector<int> next_lengths(const std::vector<int>& lengths, const Network& network,
                              const SlotActions& actions,
                              std::span<const std::uint8_t> arrivals) {
  const std::size_t K = network.user_count();
  std::vector<int> out(lengths.size());
  for (std::size_t n = 0; n < network.node_count(); ++n)
    for (std::size_t k = 0; k < K; ++k) {
      const int q = lengths[n * K + k];
      int outflow = 0;
      for (auto e : network.out_links(n)) outflow += actions.route(e, k);
      if (network.is_server(n)) outflow += actions.process(n, k);
      int inflow = 0;
      for (auto e : network.in_links(n)) inflow += actions.route(e, k);
      if (network.is_ed(n) && network.user_node(k) == n) inflow += arrivals[k];
      out[n * K + k] = std::max(0, q - outflow) + inflow;
    }
  return out;
}

int differential_backlog(const QueueState& queues, const Network& network, std::size_t e,
                         std::size_t k) {
  const auto& l = network.link(e);
  return queues.length(l.from, k) - queues.length(l.to, k);
}

double lyapunov_value(std::span<const int> lengths) {
  double g = 0.0;
  for (int q : lengths) g += static_cast<double>(q) * q;
  return 0.5 * g;
}

double lyapunov_value(const QueueState& queues) {
  const auto l = queues.lengths();
  return lyapunov_value(std::span<const int>(l));
}

double lyapunov_value_unhalved(const QueueState& queues) { return 2.0 * lyapunov_value(queues); }

}  // namespace clo
