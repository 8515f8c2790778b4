#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <span>
#include <vector>

#include "clo/network.hpp"

namespace clo {

using DuId = std::uint64_t;

struct QueuedDu {
  DuId id = 0;
  std::int64_t generated_slot = 0;

  bool operator==(const QueuedDu&) const = default;
};

/// Per-(node, user) FIFOs of DU identities. Q_n^k is the FIFO length.
class QueueState {
 public:
  QueueState() = default;
  QueueState(std::size_t nodes, std::size_t users);

  std::size_t nodes() const noexcept { return nodes_; }
  std::size_t users() const noexcept { return users_; }

  int length(std::size_t n, std::size_t k) const { return static_cast<int>(fifo(n, k).size()); }
  /// Generation slot of the head DU, 0 when the FIFO is empty.
  std::int64_t head_generation(std::size_t n, std::size_t k) const;
  const QueuedDu& head(std::size_t n, std::size_t k) const;

  std::deque<QueuedDu>& fifo(std::size_t n, std::size_t k) { return fifos_.at(n * users_ + k); }
  const std::deque<QueuedDu>& fifo(std::size_t n, std::size_t k) const {
    return fifos_.at(n * users_ + k);
  }

  /// Sum over nodes of Q_n^k.
  int user_backlog(std::size_t k) const;
  int total_backlog() const;
  int max_length() const;
  std::vector<int> lengths() const;

 private:
  std::size_t nodes_ = 0;
  std::size_t users_ = 0;
  std::vector<std::deque<QueuedDu>> fifos_;
};

/// One slot's binary routing R, binary processing I and link powers P.
class SlotActions {
 public:
  SlotActions() = default;
  SlotActions(std::size_t links, std::size_t nodes, std::size_t users);

  std::size_t links() const noexcept { return links_; }
  std::size_t nodes() const noexcept { return nodes_; }
  std::size_t users() const noexcept { return users_; }

  bool route(std::size_t e, std::size_t k) const { return route_.at(e * users_ + k) != 0; }
  bool process(std::size_t n, std::size_t k) const { return process_.at(n * users_ + k) != 0; }
  double power(std::size_t e) const { return power_.at(e); }

  void set_route(std::size_t e, std::size_t k, bool on) { route_.at(e * users_ + k) = on ? 1 : 0; }
  void set_process(std::size_t n, std::size_t k, bool on) {
    process_.at(n * users_ + k) = on ? 1 : 0;
  }
  void set_power(std::size_t e, double p) { power_.at(e) = p; }

  int transmissions() const;
  int decisions() const;
  int link_load(std::size_t e) const;
  /// Outgoing transmissions plus processing that draw on FIFO (n, k).
  int uses(const Network& network, std::size_t n, std::size_t k) const;

  bool operator==(const SlotActions&) const = default;

 private:
  std::size_t links_ = 0;
  std::size_t nodes_ = 0;
  std::size_t users_ = 0;
  std::vector<std::uint8_t> route_;
  std::vector<std::uint8_t> process_;
  std::vector<double> power_;
};

/// A DU removed from a server FIFO for inference.
struct Decision {
  std::size_t server = 0;
  std::size_t user = 0;
  QueuedDu du;
};

/// Advances the queues by one slot following
///   Q' = max(0, Q - sum_out R - 1{n in S} I) + 1{n in U} A + sum_in R.
/// Processing pops the head DU first and forwarding pops the next ones in
/// link order. At slot end forwarded DUs join the receiver's tail, followed by
/// new arrivals. Throws ContractViolation on phantom departures.
std::vector<Decision> apply_slot(QueueState& queues, const Network& network,
                                 const SlotActions& actions,
                                 std::span<const std::uint8_t> arrivals,
                                 std::span<const QueuedDu> new_dus);

/// Count-only form of the same transition, used by diagnostics and oracles.
std::vector<int> next_lengths(const std::vector<int>& lengths, const Network& network,
                              const SlotActions& actions,
                              std::span<const std::uint8_t> arrivals);

/// U_{n,m}^k = Q_n^k - Q_m^k for link e = (n, m).
int differential_backlog(const QueueState& queues, const Network& network, std::size_t e,
                         std::size_t k);

/// G = 1/2 sum Q^2 (the drift bound's convention).
double lyapunov_value(const QueueState& queues);
double lyapunov_value(std::span<const int> lengths);
/// G = sum Q^2 (the stability statement's convention).
double lyapunov_value_unhalved(const QueueState& queues);

}  // namespace clo
