#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "clo/crc_controller.hpp"
#include "clo/lo_benchmarks.hpp"
#include "clo/scenario.hpp"

namespace clo {

struct SlotRecord {
  std::int64_t slot = 0;   // 1-based
  std::int64_t frame = 0;  // 0-based
  double energy_j = 0.0;
  double precision_loss = 0.0;    // sum over this slot's decisions
  double reliability_loss = 0.0;  // sum over this slot's decisions
  int decisions = 0;
  int backlog = 0;  // total DUs queued after the slot
  std::vector<int> user_backlog;  // sum_n Q_n^k after the slot
  double ldpp_realized = 0.0;
  double ldpp_bound = 0.0;
  std::optional<double> shared_theta;  // LO policies only
};

struct FrameRecord {
  std::int64_t frame = 0;
  std::size_t user = 0;
  double theta = 0.0;       // threshold used during the frame
  double theta_next = 0.0;  // after the end-of-frame update
  int decisions = 0;
  double avg_loss = 0.0;
  double cum_avg_active = 0.0;  // mean of avg_loss over frames with decisions
  double cum_avg_all = 0.0;     // mean over all frames, empty ones count as 0
  std::int64_t active_frames = 0;
  double lower = 0.0;  // running a-posteriori certificate
  double upper = 0.0;
  double lower_worst = 0.0;  // m = 0, M = 1
  double upper_worst = 0.0;
  double z = 0.0;
  double y = 0.0;
  double latency_queue = 0.0;
  bool outage = false;  // avg_loss > L_max
};

struct DecisionRecord {
  std::int64_t slot = 0;
  std::int64_t frame = 0;
  std::size_t user = 0;
  std::size_t server = 0;
  DuId du = 0;
  std::int64_t generated_slot = 0;
  double theta = 0.0;
  double reliability_loss = 0.0;
  double precision_loss = 0.0;
};

struct UserInfo {
  std::string id;
  double target = 0.0;
  double learning_rate = 0.0;
  double theta0 = 0.0;
  int delay = 0;
  double arrival_prob = 0.0;
};

struct RunMetrics {
  std::string scenario;
  Policy policy = Policy::clo;
  std::uint64_t seed = 0;
  int frame_size = 0;
  double slot_s = 0.0;
  std::vector<UserInfo> users;
  std::vector<std::string> node_ids;

  std::vector<SlotRecord> slots;
  std::vector<FrameRecord> frames;  // frame-major, one row per user
  std::vector<DecisionRecord> decisions;

  std::vector<std::int64_t> node_decisions;
  std::vector<double> theta_min;  // over theta_0 .. theta_F per user
  std::vector<double> theta_max;
  std::vector<int> final_lengths;  // [node * users + user]
  std::int64_t arrivals = 0;
  std::int64_t decided = 0;
  int ldpp_violations = 0;

  std::size_t user_count() const noexcept { return users.size(); }
  /// Row of user k at frame f.
  const FrameRecord& frame_row(std::int64_t f, std::size_t k) const;
  std::int64_t frame_count() const noexcept;
};

struct RunOptions {
  bool record_decisions = true;
  bool record_ldpp = true;
  /// Re-check every returned SlotActions against all constraints.
  bool assert_feasible = true;
};

/// Per-seed run of the frame/slot loop for the configured policy.
/// Faults are rethrown as std::runtime_error carrying the slot index.
RunMetrics run_scenario(const ScenarioConfig& config, std::uint64_t seed, const RunOptions& options = {});

/// LO benchmarks only (policy must be lo_avg or lo_outage).
RunMetrics run_lo_algorithm(const ScenarioConfig& config, std::uint64_t seed, const RunOptions& options = {});

std::vector<RunMetrics> run_batch(const ScenarioConfig& config, std::span<const std::uint64_t> seeds,
                                  const RunOptions& options = {});

/// Calibration tasks drawn from their own stream, disjoint from the run.
std::vector<SyntheticTask> calibration_tasks(const ScenarioConfig& config, std::uint64_t seed);
LossTable calibrate_table(const ScenarioConfig& config, std::uint64_t seed);

// ---- certificates --------------------------------------------------------

/// Frame history of one user, enough to recompute the certificate.
struct UserHistory {
  std::string id;
  double target = 0.0;
  double learning_rate = 0.0;
  double theta0 = 0.0;
  int delay = 0;
  std::vector<double> theta;  // theta_0 .. theta_F
  std::vector<FrameSummary> frames;
};

std::vector<UserHistory> user_histories(const RunMetrics& metrics);

struct CertificateFailure {
  std::string user;
  std::int64_t frames = 0;  // frame count F' at which the check failed
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

struct CertificateReport {
  bool pass = true;
  std::int64_t checks = 0;
  std::vector<CertificateFailure> failures;
};

/// Checks l(m_post) <= cumulative active-frame loss <= U(M_post) at every
/// frame count, with m_post, M_post from the thresholds seen so far.
CertificateReport certificate_check(std::span<const UserHistory> users, double slack = 1e-9);
CertificateReport certificate_check(const RunMetrics& metrics, double slack = 1e-9);

// ---- aggregate metrics ---------------------------------------------------

struct ConvergedStats {
  double energy = 0.0;     // mean energy per slot (J)
  double precision = 0.0;  // 1 - mean precision loss per decision
  double fnr = 0.0;        // mean reliability loss per decision
  double latency_s = 0.0;  // Little's-law latency averaged over users
  std::int64_t decisions = 0;
};

/// Averages over the last `window` slots.
ConvergedStats converged_stats(const RunMetrics& metrics, int window);

/// Per-slot Little's-law latency Q_tot / (lambda / delta), averaged over users.
std::vector<double> latency_tracking(const RunMetrics& metrics);
double littles_law_latency(double queue_length, double arrival_prob, double slot_s);

/// QL' = max(0, QL + zeta (avg - cap)).
double latency_virtual_queue_update(double ql, double step, double frame_avg, double q_avg);

/// First slot after which every user's cumulative active-frame loss stays
/// within `tol` of its target until the end; -1 if never.
std::int64_t time_to_target(const RunMetrics& metrics, double tol);

/// Fraction of decisions taken at each node, in node order.
std::vector<double> decision_shares(const RunMetrics& metrics);

struct TradeoffRow {
  double eta = 0.0;
  Policy policy = Policy::clo;
  double energy_mean = 0.0;
  double energy_std = 0.0;
  double precision_mean = 0.0;
  double precision_std = 0.0;
  double fnr_mean = 0.0;
  std::vector<double> shares;  // decision shares per node, seed-averaged
};

TradeoffRow summarize(double eta, Policy policy, std::span<const RunMetrics> runs, int window);

/// One row per eta: runs `base` with run.eta replaced, over `seeds`.
std::vector<TradeoffRow> tradeoff_sweep(const ScenarioConfig& base, std::span<const double> etas,
                                        std::span<const std::uint64_t> seeds);

/// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> x, std::span<const double> y);

}  // namespace clo
