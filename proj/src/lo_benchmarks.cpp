#include "clo/lo_benchmarks.hpp"

#include <algorithm>
#include <limits>

#include "clo/errors.hpp"

namespace clo {

double update_z(double z, double step, double frame_loss, double target) {
  return std::max(0.0, z + step * (frame_loss - target));
}

double update_y(double y, double step, double frame_loss, double l_max, double epsilon) {
  const double outage = frame_loss > l_max ? 1.0 : 0.0;
  return std::max(0.0, y + step * (outage - epsilon));
}

double VirtualQueues::weight(std::size_t k) const {
  double w = 0.0;
  if (use_z) w += step_z[k] * z[k];
  if (use_y) w += step_y[k] * y[k];
  return w;
}

void VirtualQueues::update(std::span<const double> frame_loss) {
  for (std::size_t k = 0; k < users(); ++k) {
    if (use_z) z[k] = update_z(z[k], step_z[k], frame_loss[k], target[k]);
    if (use_y) y[k] = update_y(y[k], step_y[k], frame_loss[k], l_max[k], epsilon[k]);
  }
}

LossTable::LossTable(std::vector<double> grid, std::size_t nodes)
    : grid_(std::move(grid)), reliability_(nodes), precision_(nodes) {}

double LossTable::reliability(std::size_t n, std::size_t i) const { return reliability_.at(n).at(i); }

double LossTable::precision(std::size_t n, std::size_t i) const { return precision_.at(n).at(i); }

namespace {

double interpolate(const std::vector<double>& grid, const std::vector<double>& row, double theta) {
  if (row.empty()) throw ContractViolation("loss table has no row for this node");
  if (theta <= grid.front()) return row.front();
  if (theta >= grid.back()) return row.back();
  const auto it = std::upper_bound(grid.begin(), grid.end(), theta);
  const auto hi = static_cast<std::size_t>(it - grid.begin());
  const std::size_t lo = hi - 1;
  const double w = (theta - grid[lo]) / (grid[hi] - grid[lo]);
  return row[lo] + w * (row[hi] - row[lo]);
}

}  // namespace

double LossTable::reliability_at(std::size_t n, double theta) const {
  return interpolate(grid_, reliability_.at(n), theta);
}

double LossTable::precision_at(std::size_t n, double theta) const {
  return interpolate(grid_, precision_.at(n), theta);
}

void LossTable::enforce_monotone() {
  for (auto& row : reliability_) isotonic_non_decreasing(row);
  for (auto& row : precision_) isotonic_non_increasing(row);
}

void isotonic_non_decreasing(std::vector<double>& values) {
  // pool adjacent violators with unit weights
  std::vector<double> mean;
  std::vector<std::size_t> size;
  for (double v : values) {
    mean.push_back(v);
    size.push_back(1);
    while (mean.size() > 1 && mean[mean.size() - 2] > mean.back()) {
      const std::size_t n = size.back() + size[size.size() - 2];
      const double m = (mean[mean.size() - 2] * static_cast<double>(size[size.size() - 2]) +
                        mean.back() * static_cast<double>(size.back())) /
                       static_cast<double>(n);
      mean.pop_back();
      size.pop_back();
      mean.back() = m;
      size.back() = n;
    }
  }
  std::size_t i = 0;
  for (std::size_t b = 0; b < mean.size(); ++b)
    for (std::size_t j = 0; j < size[b]; ++j) values[i++] = mean[b];
}

void isotonic_non_increasing(std::vector<double>& values) {
  for (auto& v : values) v = -v;
  isotonic_non_decreasing(values);
  for (auto& v : values) v = -v;
}

LossTable build_loss_table(const Network& network, std::span<const double> grid,
                           std::span<const SyntheticTask> calibration, LossKind reliability_kind,
                           LossKind precision_kind) {
  if (calibration.empty()) throw ConfigError("lo.calibration_tasks", "calibration set is empty");
  if (grid.empty()) throw ConfigError("lo.theta_grid", "grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw ConfigError("lo.theta_grid", "grid must be strictly increasing");

  LossTable table(std::vector<double>(grid.begin(), grid.end()), network.node_count());
  const double count = static_cast<double>(calibration.size());
  for (auto s : network.servers()) {
    auto& rel = table.reliability_row(s);
    auto& prec = table.precision_row(s);
    rel.assign(grid.size(), 0.0);
    prec.assign(grid.size(), 0.0);
    for (const auto& task : calibration) {
      const ServerView view(task, network.node(s).quality);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        rel[i] += reliability_loss(view, grid[i], reliability_kind);
        prec[i] += precision_loss(view, grid[i], precision_kind);
      }
    }
    for (auto& v : rel) v /= count;
    for (auto& v : prec) v /= count;
  }
  table.enforce_monotone();
  return table;
}

LoSlotDecision solve_slot_lo(const SlotProblem& base, const VirtualQueues& queues,
                             const LossTable& table, std::size_t var_limit) {
  const Network& net = *base.network;
  const std::size_t K = base.users();
  SlotProblem p = base;
  LoSlotDecision best;
  bool have = false;
  for (std::size_t i = 0; i < table.grid().size(); ++i) {
    const double theta = table.grid()[i];
    std::fill(p.thresholds.begin(), p.thresholds.end(), theta);
    for (auto s : net.servers())
      for (std::size_t k = 0; k < K; ++k) {
        p.precision_hat[s * K + k] = table.precision(s, i);
        p.processing_penalty[s * K + k] = queues.weight(k) * table.reliability(s, i);
      }
    SlotActions a = solve_exact(p, var_limit);
    const double obj = slot_objective(p, a);
    bool take = !have || obj < best.objective;
    if (have && obj == best.objective) {
      // same tie-break as the exact solver, then the smaller threshold
      if (a.transmissions() != best.actions.transmissions())
        take = a.transmissions() < best.actions.transmissions();
      else if (a.decisions() != best.actions.decisions())
        take = a.decisions() < best.actions.decisions();
      else
        take = chosen_variables(a) < chosen_variables(best.actions);
    }
    if (take) {
      best.actions = std::move(a);
      best.grid_index = i;
      best.theta = theta;
      best.objective = obj;
      have = true;
    }
  }
  return best;
}

}  // namespace clo
