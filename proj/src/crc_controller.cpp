#include "clo/crc_controller.hpp"

#include <algorithm>
#include <string>

#include "clo/errors.hpp"

namespace clo {

void record_decision(FrameSummary& summary, double loss) {
  if (!(loss >= 0.0 && loss <= 1.0))
    throw ContractViolation("record_decision: loss " + std::to_string(loss) + " outside [0, 1]");
  const double n = static_cast<double>(summary.decisions);
  summary.avg_loss = n / (n + 1.0) * summary.avg_loss + loss / (n + 1.0);
  ++summary.decisions;
}

FrameFeedback::FrameFeedback(std::vector<int> delays)
    : delays_(std::move(delays)), current_(delays_.size()), lines_(delays_.size()) {}

std::vector<std::optional<FrameSummary>> FrameFeedback::close_frame() {
  std::vector<std::optional<FrameSummary>> out(current_.size());
  for (std::size_t k = 0; k < current_.size(); ++k) {
    lines_[k].push_back(current_[k]);
    current_[k] = FrameSummary{};
    if (lines_[k].size() > static_cast<std::size_t>(delays_[k])) {
      out[k] = lines_[k].front();
      lines_[k].pop_front();
    }
  }
  return out;
}

ThresholdState ThresholdState::initial(std::vector<double> theta0, std::vector<double> learning_rate,
                                       std::vector<double> target, std::vector<int> delay) {
  ThresholdState s;
  s.theta = theta0;
  s.min_theta = theta0;
  s.max_theta = theta0;
  s.theta0 = std::move(theta0);
  s.learning_rate = std::move(learning_rate);
  s.target = std::move(target);
  s.delay = std::move(delay);
  return s;
}

void update_thresholds(ThresholdState& state,
                       std::span<const std::optional<FrameSummary>> delayed) {
  for (std::size_t k = 0; k < state.users(); ++k) {
    const auto& fb = delayed[k];
    if (fb && fb->decisions > 0)
      state.theta[k] += state.learning_rate[k] * (state.target[k] - fb->avg_loss);
    state.min_theta[k] = std::min(state.min_theta[k], state.theta[k]);
    state.max_theta[k] = std::max(state.max_theta[k], state.theta[k]);
  }
}

ReliabilityBounds reliability_bounds(double frames, double gamma, double theta0, double target,
                                     int delay, double m, double M) {
  const double d = static_cast<double>(delay);
  ReliabilityBounds b;
  b.lower = target - target * d / frames + (m - gamma - theta0) / (gamma * frames);
  b.upper = target + (M + gamma - theta0) / (gamma * frames) + d * (1.0 - target) / frames;
  return b;
}

BoundConstants posterior_constants(double theta_min, double theta_max, double theta0,
                                   double gamma) {
  return {2.0 * theta0 - theta_max + gamma, 2.0 * theta0 - theta_min - gamma};
}

}  // namespace clo
