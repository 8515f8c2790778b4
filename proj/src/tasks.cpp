#include "clo/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "clo/errors.hpp"

namespace clo {

namespace {

double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

struct Counts {
  std::size_t in_set = 0;
  std::size_t true_in_set = 0;
  std::size_t truth = 0;
};

Counts count(const ServerView& view, double theta) {
  Counts c;
  const auto conf = view.confidence();
  const auto& mask = view.task().mask;
  for (std::size_t i = 0; i < conf.size(); ++i) {
    const bool in = conf[i] >= theta;
    c.in_set += in;
    c.truth += mask[i];
    c.true_in_set += in && mask[i];
  }
  return c;
}

}  // namespace

std::size_t SyntheticTask::true_count() const noexcept {
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
}

double SyntheticTask::base_confidence(std::size_t i) const noexcept {
  return clamp01(signal(i) + noise * unit_noise[i]);
}

ServerView::ServerView(const SyntheticTask& task, double quality)
    : task_(&task), quality_(quality), confidence_(task.pixel_count()) {
  const std::size_t n = task.pixel_count();
  if (std::isinf(quality)) {
    for (std::size_t i = 0; i < n; ++i) confidence_[i] = task.mask[i] ? 1.0 : 0.0;
    return;
  }
  if (quality == 1.0) {
    for (std::size_t i = 0; i < n; ++i) confidence_[i] = task.base_confidence(i);
    return;
  }
  if (quality <= 0.0) {
    std::fill(confidence_.begin(), confidence_.end(), 0.5);
    return;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double x = clamp01(task.signal(i) + task.noise * task.unit_noise[i] / quality);
    // sigma(q logit x), written so that x in {0, 1} stays exact
    const double a = std::pow(x, quality);
    const double b = std::pow(1.0 - x, quality);
    confidence_[i] = a / (a + b);
  }
}

bool is_reliability_loss(LossKind kind) noexcept {
  return kind == LossKind::miscoverage || kind == LossKind::fnr;
}

bool is_precision_loss(LossKind kind) noexcept { return !is_reliability_loss(kind); }

std::vector<std::uint8_t> sample_arrivals(std::span<const double> rates, Rng& rng) {
  std::vector<std::uint8_t> a(rates.size());
  for (std::size_t k = 0; k < rates.size(); ++k) a[k] = uniform01(rng) < rates[k] ? 1 : 0;
  return a;
}

ArrivalProcess::ArrivalProcess(std::vector<double> rates) : rates_(std::move(rates)) {}

ArrivalProcess::ArrivalProcess(std::vector<double> rates, int period, double switch_prob,
                               std::vector<double> levels)
    : rates_(std::move(rates)), period_(period), switch_prob_(switch_prob), levels_(std::move(levels)) {}

std::vector<std::uint8_t> ArrivalProcess::next(std::int64_t slot, Rng& rng) {
  if (period_ > 0 && levels_.size() >= 2 && slot > 1 && (slot - 1) % period_ == 0) {
    for (auto& rate : rates_) {
      const double u = uniform01(rng);
      const double pick = uniform01(rng);
      if (u >= switch_prob_) continue;
      std::vector<double> others;
      for (double l : levels_)
        if (l != rate) others.push_back(l);
      if (others.empty()) continue;
      const auto idx = std::min(others.size() - 1, static_cast<std::size_t>(pick * others.size()));
      rate = others[idx];
    }
  }
  return sample_arrivals(rates_, rng);
}

SyntheticTask generate_task(Rng& rng, const TaskGenConfig& config, std::uint64_t id,
                            std::size_t owner, std::int64_t slot) {
  if (config.height < 4 || config.width < 4)
    throw ContractViolation("generate_task: grid must be at least 4x4");
  SyntheticTask t;
  t.id = id;
  t.owner = owner;
  t.generated_slot = slot;
  t.height = config.height;
  t.width = config.width;
  t.contrast = config.contrast;
  t.noise = config.noise;

  const int H = config.height;
  const int W = config.width;
  const double area = static_cast<double>(H) * W;
  const auto min_px = static_cast<int>(std::ceil(config.coverage_min * area - 1e-9));
  const auto max_px = static_cast<int>(std::floor(config.coverage_max * area + 1e-9));
  // rectangle with area in [min_px, max_px]
  std::vector<std::pair<int, int>> shapes;
  for (int h = 1; h <= H; ++h)
    for (int w = 1; w <= W; ++w)
      if (h * w >= std::max(1, min_px) && h * w <= max_px) shapes.emplace_back(h, w);
  if (shapes.empty()) shapes.emplace_back(1, 1);
  const auto [h, w] = shapes[std::min(shapes.size() - 1,
                                      static_cast<std::size_t>(uniform01(rng) * shapes.size()))];
  const int top = static_cast<int>(uniform01(rng) * (H - h + 1));
  const int left = static_cast<int>(uniform01(rng) * (W - w + 1));

  t.mask.assign(static_cast<std::size_t>(H) * W, 0);
  for (int r = top; r < top + h; ++r)
    for (int c = left; c < left + w; ++c) t.mask[static_cast<std::size_t>(r) * W + c] = 1;

  std::normal_distribution<double> normal(0.0, 1.0);
  t.unit_noise.resize(t.mask.size());
  for (auto& z : t.unit_noise) z = normal(rng);
  return t;
}

std::vector<std::size_t> prediction_set(const ServerView& view, double theta) {
  std::vector<std::size_t> out;
  const auto conf = view.confidence();
  for (std::size_t i = 0; i < conf.size(); ++i)
    if (conf[i] >= theta) out.push_back(i);
  return out;
}

double reliability_loss(const ServerView& view, double theta, LossKind kind) {
  const Counts c = count(view, theta);
  if (c.truth == 0) throw std::domain_error("reliability_loss: empty ground truth");
  switch (kind) {
    case LossKind::miscoverage:
      return c.true_in_set == c.truth ? 0.0 : 1.0;
    case LossKind::fnr:
      return static_cast<double>(c.truth - c.true_in_set) / static_cast<double>(c.truth);
    default:
      throw std::invalid_argument("reliability_loss: not a reliability loss kind");
  }
}

double precision_loss(const ServerView& view, double theta, LossKind kind) {
  const Counts c = count(view, theta);
  const std::size_t total = view.confidence().size();
  const std::size_t false_pos = c.in_set - c.true_in_set;
  switch (kind) {
    case LossKind::set_size:
      if (total == 0) throw std::domain_error("precision_loss: empty label space");
      return static_cast<double>(c.in_set) / static_cast<double>(total);
    case LossKind::fpr:
      if (total == c.truth) throw std::domain_error("precision_loss: no negatives");
      return static_cast<double>(false_pos) / static_cast<double>(total - c.truth);
    case LossKind::relative_fp:
      if (c.truth == 0) throw std::domain_error("precision_loss: empty ground truth");
      return std::min(1.0, static_cast<double>(false_pos) / static_cast<double>(c.truth));
    default:
      throw std::invalid_argument("precision_loss: not a precision loss kind");
  }
}

}  // namespace clo
