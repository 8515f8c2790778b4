#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "clo/channel.hpp"
#include "clo/network.hpp"
#include "clo/queueing.hpp"

namespace clo {

class LossTable;

enum class PredictorMode { oracle, noisy, table };

/// Estimates the precision loss of a head-of-queue DU before it is processed.
///   oracle: the true loss (genie-aided)
///   noisy:  clamp(F + bias + stddev * z), z a per-(DU, server) standard normal
///   table:  the server's calibrated average loss at theta
class PrecisionPredictor {
 public:
  PrecisionPredictor() = default;
  static PrecisionPredictor oracle();
  static PrecisionPredictor noisy(double bias, double stddev, std::uint64_t seed);
  static PrecisionPredictor table(std::shared_ptr<const LossTable> table);

  PredictorMode mode() const noexcept { return mode_; }
  double estimate(double true_loss, DuId du, std::size_t server, double theta) const;

 private:
  PredictorMode mode_ = PredictorMode::oracle;
  double bias_ = 0.0;
  double stddev_ = 0.0;
  std::uint64_t seed_ = 0;
  std::shared_ptr<const LossTable> table_;
};

/// Everything the per-slot problem needs. Precision estimates and additive
/// processing costs are laid out as [node * users + user].
struct SlotProblem {
  const Network* network = nullptr;
  const QueueState* queues = nullptr;
  const ChannelMatrix* channels = nullptr;

  double V = 200.0;
  double eta = 0.5;
  double slot_s = 0.05;
  double noise_w_per_hz = 0.0;

  std::vector<double> thresholds;      // theta^k for the frame
  std::vector<double> du_bits;         // W^k
  std::vector<double> precision_hat;   // F-hat of the head DU at (server, user)
  std::vector<double> processing_penalty;  // extra cost per decision (LO virtual queues)
  std::vector<double> backlog_bonus;       // per user reward per decision (latency queue)

  std::size_t users() const noexcept { return du_bits.size(); }
  double precision_at(std::size_t n, std::size_t k) const;
  double penalty_at(std::size_t n, std::size_t k) const;
  double bonus_at(std::size_t k) const;
};

/// Allocates the per-(node, user) vectors for a problem over `network`.
SlotProblem make_slot_problem(const Network& network, const QueueState& queues,
                              const ChannelMatrix& channels, double V, double eta,
                              double slot_s, double noise_w_per_hz);

/// Minimal power for link e to deliver `bits` in one slot under the source
/// node's power cap.
std::optional<double> link_power(const SlotProblem& problem, std::size_t e, double bits);

struct ObjectiveTerms {
  double energy = 0.0;            // E_tot with minimal powers
  double precision = 0.0;         // sum I F-hat
  double routing_reward = 0.0;    // sum U R
  double processing_reward = 0.0; // sum (Q + bonus) I
  double penalty = 0.0;           // sum I * processing_penalty
  double total = 0.0;
};

/// V (E_tot + eta F-hat_tot) + penalties - sum U R - sum Q I. An infeasible
/// link yields +inf.
double slot_objective(const SlotProblem& problem, const SlotActions& actions);
ObjectiveTerms objective_terms(const SlotProblem& problem, const SlotActions& actions);

/// Every violated constraint, as text. Empty means feasible.
std::vector<std::string> feasibility_violations(const SlotProblem& problem,
                                                const SlotActions& actions);

class ExactLimitExceeded : public std::runtime_error {
 public:
  ExactLimitExceeded(std::size_t variables, std::size_t limit);
  std::size_t variables() const noexcept { return variables_; }

 private:
  std::size_t variables_;
};

/// Number of binary variables not forced to zero, counted per coupled block.
/// Constraints and objective terms only couple variables owned by the same
/// transmitting/processing node, so each node is an independent block.
std::size_t largest_block_variables(const SlotProblem& problem);
std::size_t active_variables(const SlotProblem& problem);

/// Exhaustive minimisation of slot_objective. Ties go to fewer
/// transmissions, then fewer decisions, then the lexicographically smallest
/// list of chosen (link, user) / (server, user) variables.
SlotActions solve_exact(const SlotProblem& problem, std::size_t var_limit = 20);

/// Canonical indices of the variables set in `actions`, ascending: route
/// (e, k) is e K + k and process (n, k) is L K + n K + k.
std::vector<std::size_t> chosen_variables(const SlotActions& actions);

/// Adds the unit action with the largest objective decrease until none
/// improves. Always feasible; never better than solve_exact.
SlotActions solve_greedy(const SlotProblem& problem);

struct LdppReport {
  double g_before = 0.0;
  double g_after = 0.0;
  double penalty = 0.0;   // V J(t)
  double realized = 0.0;  // G(t+1) - G(t) + V J(t)
  double bound = 0.0;     // D + sum Q (in - out) + V J(t)
};

/// Realized drift-plus-penalty against its per-slot upper bound, with
/// G = 1/2 sum Q^2 and J evaluated on the realized precision loss.
LdppReport ldpp_diagnostic(const SlotProblem& problem, const SlotActions& actions,
                           std::span<const std::uint8_t> arrivals,
                           double realized_precision_total, double drift_const);

}  // namespace clo
