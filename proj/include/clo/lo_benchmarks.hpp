#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "clo/network.hpp"
#include "clo/slot_optimizer.hpp"
#include "clo/tasks.hpp"

namespace clo {

/// Z' = max(0, Z + beta (avg - r)).
double update_z(double z, double step, double frame_loss, double target);

/// Y' = max(0, Y + xi (u(avg - L_max) - eps)) with u(0) = 0.
double update_y(double y, double step, double frame_loss, double l_max, double epsilon);

/// Virtual queues of the average-reliability (Z) and outage (Y) benchmarks.
struct VirtualQueues {
  bool use_z = true;
  bool use_y = false;
  std::vector<double> z;
  std::vector<double> y;
  std::vector<double> step_z;
  std::vector<double> step_y;
  std::vector<double> target;
  std::vector<double> l_max;
  std::vector<double> epsilon;

  std::size_t users() const noexcept { return z.size(); }
  /// beta Z + xi Y of the active queues, the weight of the surrogate loss.
  double weight(std::size_t k) const;
  /// End-of-frame update with the realized frame losses.
  void update(std::span<const double> frame_loss);
};

/// Per-server average reliability and precision losses on a threshold grid.
/// Rows are indexed by node; non-server rows are empty.
class LossTable {
 public:
  LossTable() = default;
  LossTable(std::vector<double> grid, std::size_t nodes);

  const std::vector<double>& grid() const noexcept { return grid_; }
  std::size_t nodes() const noexcept { return reliability_.size(); }

  std::vector<double>& reliability_row(std::size_t n) { return reliability_.at(n); }
  std::vector<double>& precision_row(std::size_t n) { return precision_.at(n); }
  const std::vector<double>& reliability_row(std::size_t n) const { return reliability_.at(n); }
  const std::vector<double>& precision_row(std::size_t n) const { return precision_.at(n); }

  double reliability(std::size_t n, std::size_t grid_index) const;
  double precision(std::size_t n, std::size_t grid_index) const;
  /// Piecewise-linear lookup, constant beyond the grid ends.
  double reliability_at(std::size_t n, double theta) const;
  double precision_at(std::size_t n, double theta) const;

  /// Applies the isotonic projections so that reliability rows are
  /// non-decreasing and precision rows non-increasing along the grid.
  void enforce_monotone();

 private:
  std::vector<double> grid_;
  std::vector<std::vector<double>> reliability_;
  std::vector<std::vector<double>> precision_;
};

/// Pool-adjacent-violators projection onto non-decreasing sequences
/// (equal weights).
void isotonic_non_decreasing(std::vector<double>& values);
void isotonic_non_increasing(std::vector<double>& values);

/// Empirical means over the calibration tasks for each server and grid point.
/// Throws ConfigError on an empty calibration set or unsorted grid.
LossTable build_loss_table(const Network& network, std::span<const double> grid,
                           std::span<const SyntheticTask> calibration,
                           LossKind reliability_kind = LossKind::fnr,
                           LossKind precision_kind = LossKind::relative_fp);

struct LoSlotDecision {
  SlotActions actions;
  std::size_t grid_index = 0;
  double theta = 0.0;
  double objective = 0.0;
};

/// Shared-threshold per-slot problem of the LO benchmarks: for every grid
/// threshold, the processing cost of (s, k) becomes
///   V eta F~_s(theta) + (beta Z^k + xi Y^k) L~_s(theta)
/// and the remaining combinatorial problem is solved exactly. Returns the
/// global minimiser; ties go to the smaller threshold.
///
/// `base` supplies queues, channels, V, eta and any backlog bonus; its
/// precision estimates and penalties are overwritten.
LoSlotDecision solve_slot_lo(const SlotProblem& base, const VirtualQueues& queues,
                             const LossTable& table, std::size_t var_limit = 20);

}  // namespace clo
