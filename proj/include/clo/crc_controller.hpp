#pragma once

#include <cstddef>
#include <deque>
#include <optional>
#include <span>
#include <vector>

namespace clo {

/// Decision count and running mean loss of one user within one frame.
/// A frame without decisions keeps avg_loss = 0.
struct FrameSummary {
  int decisions = 0;
  double avg_loss = 0.0;

  bool operator==(const FrameSummary&) const = default;
};

/// avg <- N/(N+1) avg + loss/(N+1); N <- N+1. Throws ContractViolation if
/// loss is outside [0, 1].
void record_decision(FrameSummary& summary, double loss);

/// Per-user frame bookkeeping plus a delay line that releases the summary
/// of frame f - d^k when frame f closes.
class FrameFeedback {
 public:
  explicit FrameFeedback(std::vector<int> delays);

  std::size_t users() const noexcept { return current_.size(); }
  void record(std::size_t user, double loss) { record_decision(current_.at(user), loss); }
  const FrameSummary& current(std::size_t user) const { return current_.at(user); }

  /// Closes the running frame and starts a new one. Returns, per user, the
  /// summary of frame f - d^k, or nullopt while f - d^k < 0.
  std::vector<std::optional<FrameSummary>> close_frame();

 private:
  std::vector<int> delays_;
  std::vector<FrameSummary> current_;
  std::vector<std::deque<FrameSummary>> lines_;
};

/// O-CRC threshold of every user, with the extremes seen so far.
struct ThresholdState {
  std::vector<double> theta;
  std::vector<double> theta0;
  std::vector<double> learning_rate;
  std::vector<double> target;
  std::vector<int> delay;
  std::vector<double> min_theta;
  std::vector<double> max_theta;

  static ThresholdState initial(std::vector<double> theta0, std::vector<double> learning_rate,
                                std::vector<double> target, std::vector<int> delay);
  std::size_t users() const noexcept { return theta.size(); }
};

/// theta_{f+1} = theta_f + gamma 1{N_{f-d} > 0} (r - avg_{f-d}). Thresholds
/// are not clamped.
void update_thresholds(ThresholdState& state,
                       std::span<const std::optional<FrameSummary>> delayed);

struct ReliabilityBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// l(m) = r - r d / F + (m - gamma - theta0) / (gamma F)
/// U(M) = r + (M + gamma - theta0) / (gamma F) + d (1 - r) / F
ReliabilityBounds reliability_bounds(double frames, double gamma, double theta0, double target,
                                     int delay, double m, double M);

struct BoundConstants {
  double m = 0.0;
  double M = 1.0;
};

/// Constants that make reliability_bounds a valid a-posteriori envelope for
/// an observed threshold range [theta_min, theta_max].
///
/// Telescoping the update gives mean loss = r + (theta0 - theta_F)/(gamma F),
/// so the upper envelope is driven by the smallest threshold and the lower
/// one by the largest. Expressed in the (m, M) parameterisation these are the
/// range reflected about theta0: M = 2 theta0 - theta_min - gamma and
/// m = 2 theta0 - theta_max + gamma. For theta0 = 1/2 this is the usual
/// max/min rule applied to the mirrored threshold 1 - theta.
BoundConstants posterior_constants(double theta_min, double theta_max, double theta0,
                                   double gamma);

}  // namespace clo
