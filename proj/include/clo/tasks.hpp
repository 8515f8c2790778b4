#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "clo/rng.hpp"

namespace clo {

struct TaskGenConfig {
  int height = 16;
  int width = 16;
  double contrast = 0.2;       // a: mean confidence is 0.5 +/- a
  double noise = 0.15;         // sigma_task
  double coverage_min = 0.05;  // fraction of pixels in the true mask
  double coverage_max = 0.40;

  bool operator==(const TaskGenConfig&) const = default;
};

/// Stand-in for one inference DU: a confidence map over a pixel grid (or,
/// read as a flat list, over class labels) plus the ground-truth set.
///
/// The base confidence is clamp(m + noise * z), with m = 0.5 + a on the mask
/// and 0.5 - a off it. The unit noise field z is kept so that servers of
/// higher quality can see a less noisy version of the same input.
struct SyntheticTask {
  std::uint64_t id = 0;
  std::size_t owner = 0;
  std::int64_t generated_slot = 0;
  int height = 0;
  int width = 0;
  double contrast = 0.0;
  double noise = 0.0;
  std::vector<std::uint8_t> mask;
  std::vector<double> unit_noise;

  std::size_t pixel_count() const noexcept { return mask.size(); }
  std::size_t true_count() const noexcept;
  double signal(std::size_t i) const noexcept { return mask[i] ? 0.5 + contrast : 0.5 - contrast; }
  double base_confidence(std::size_t i) const noexcept;

  bool operator==(const SyntheticTask&) const = default;
};

/// A task as seen by a server of quality q: the noise is divided by q and the
/// result is sharpened in the logit domain, p_s = sigma(q logit(x)).
/// q = 1 returns the base map; q = +inf returns the mask indicator.
class ServerView {
 public:
  ServerView(const SyntheticTask& task, double quality);

  const SyntheticTask& task() const noexcept { return *task_; }
  double quality() const noexcept { return quality_; }
  std::span<const double> confidence() const noexcept { return confidence_; }

 private:
  const SyntheticTask* task_;
  double quality_;
  std::vector<double> confidence_;
};

enum class LossKind {
  miscoverage,  // 1{y_true not contained in C}
  fnr,          // |y_true \ C| / |y_true|
  set_size,     // |C| / |Y|
  fpr,          // |C \ y_true| / |Y \ y_true|
  relative_fp,  // min(|C \ y_true| / |y_true|, 1)
};

bool is_reliability_loss(LossKind kind) noexcept;
bool is_precision_loss(LossKind kind) noexcept;

/// Independent Bernoulli(lambda^k) arrivals.
std::vector<std::uint8_t> sample_arrivals(std::span<const double> rates, Rng& rng);

/// Arrival process with the optional regime switch: every `period` slots each
/// user independently jumps to the other rate level with probability `p`.
class ArrivalProcess {
 public:
  explicit ArrivalProcess(std::vector<double> rates);
  ArrivalProcess(std::vector<double> rates, int period, double switch_prob,
                 std::vector<double> levels);

  /// Draws A(t) for slot t (1-based).
  std::vector<std::uint8_t> next(std::int64_t slot, Rng& rng);
  const std::vector<double>& rates() const noexcept { return rates_; }

 private:
  std::vector<double> rates_;
  int period_ = 0;
  double switch_prob_ = 0.0;
  std::vector<double> levels_;
};

SyntheticTask generate_task(Rng& rng, const TaskGenConfig& config, std::uint64_t id = 0,
                            std::size_t owner = 0, std::int64_t slot = 0);

/// Indices of pixels with p_s >= theta, ascending.
std::vector<std::size_t> prediction_set(const ServerView& view, double theta);

/// Miscoverage or FNR of the prediction set at theta.
double reliability_loss(const ServerView& view, double theta, LossKind kind);

/// SetSize, FPR or RelativeFP of the prediction set at theta.
double precision_loss(const ServerView& view, double theta, LossKind kind);

}  // namespace clo
