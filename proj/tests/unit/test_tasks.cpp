#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "clo/rng.hpp"
#include "clo/errors.hpp"
#include "clo/tasks.hpp"
#include "oracles/oracles.hpp"

using namespace clo;

namespace {

// 1 x n task whose base map equals `p` exactly (contrast 0, unit noise).
SyntheticTask flat_task(const std::vector<double>& p, const std::vector<std::uint8_t>& mask) {
  SyntheticTask t;
  t.height = 1;
  t.width = static_cast<int>(p.size());
  t.contrast = 0.0;
  t.noise = 1.0;
  t.mask = mask;
  for (double v : p) t.unit_noise.push_back(v - 0.5);
  return t;
}

constexpr LossKind kAll[] = {LossKind::miscoverage, LossKind::fnr, LossKind::set_size, LossKind::fpr,
                             LossKind::relative_fp};

}  // namespace

TEST_SUITE("tasks") {

TEST_CASE("arrival extremes and rate") {
  auto rng = make_stream(3, Stream::arrivals);
  const std::vector<double> rates{0.0, 1.0, 0.5};
  int ones = 0;
  for (int t = 0; t < 10000; ++t) {
    const auto a = sample_arrivals(rates, rng);
    REQUIRE(a[0] == 0);
    REQUIRE(a[1] == 1);
    ones += a[2];
  }
  CHECK(ones >= 4850);
  CHECK(ones <= 5150);
}

TEST_CASE("regime switching stays on the configured levels") {
  auto rng = make_stream(4, Stream::arrivals);
  ArrivalProcess p({0.4, 0.8, 0.4}, 100, 0.5, {0.4, 0.8});
  int switches = 0;
  auto prev = p.rates();
  for (std::int64_t t = 1; t <= 20000; ++t) {
    p.next(t, rng);
    for (double r : p.rates()) REQUIRE((r == 0.4 || r == 0.8));
    if (p.rates() != prev) {
      REQUIRE((t - 1) % 100 == 0);
      ++switches;
    }
    prev = p.rates();
  }
  CHECK(switches > 50);
}

TEST_CASE("noiseless task is perfectly separable") {
  TaskGenConfig c;
  c.noise = 0.0;
  c.contrast = 0.5;
  auto rng = make_stream(1, Stream::tasks);
  const auto t = generate_task(rng, c);
  const ServerView v(t, 1.0);
  for (std::size_t i = 0; i < t.pixel_count(); ++i) REQUIRE(v.confidence()[i] == (t.mask[i] ? 1.0 : 0.0));
  CHECK(reliability_loss(v, 1.0, LossKind::fnr) == 0.0);
  CHECK(precision_loss(v, 1.0, LossKind::fpr) == 0.0);
}

TEST_CASE("task generation is deterministic and respects coverage") {
  TaskGenConfig c;
  auto a = make_stream(8, Stream::tasks);
  auto b = make_stream(8, Stream::tasks);
  for (int i = 0; i < 200; ++i) {
    const auto x = generate_task(a, c, i);
    REQUIRE(x == generate_task(b, c, i));
    const double cov = static_cast<double>(x.true_count()) / x.pixel_count();
    REQUIRE(cov >= c.coverage_min - 1e-12);
    REQUIRE(cov <= c.coverage_max + 1e-12);
    for (std::size_t p = 0; p < x.pixel_count(); ++p) {
      REQUIRE(x.base_confidence(p) >= 0.0);
      REQUIRE(x.base_confidence(p) <= 1.0);
    }
  }
  TaskGenConfig tiny;
  tiny.height = 3;
  CHECK_THROWS_AS(generate_task(a, tiny), ContractViolation);
}

TEST_CASE("mean FNR at 0.5 follows the Gaussian tail") {
  TaskGenConfig c;  // a = 0.2, sigma = 0.15
  auto rng = make_stream(2, Stream::tasks);
  double sum = 0.0;
  const int n = 1000;
  for (int i = 0; i < n; ++i) {
    const auto t = generate_task(rng, c);
    sum += reliability_loss(ServerView(t, 1.0), 0.5, LossKind::fnr);
  }
  const double expected = oracle::gaussian_tail_fnr(0.2, 0.15, 0.5);
  CHECK(expected == doctest::Approx(0.091).epsilon(0.01));
  CHECK(sum / n == doctest::Approx(expected).epsilon(0.05));
}

TEST_CASE("prediction set examples") {
  const auto t = flat_task({0.9, 0.6, 0.4, 0.1}, {1, 1, 0, 0});
  const ServerView v(t, 1.0);
  CHECK(prediction_set(v, 0.5) == std::vector<std::size_t>{0, 1});
  CHECK(prediction_set(v, 0.0).size() == 4);
  CHECK(prediction_set(v, 1.1).empty());
}

TEST_CASE("loss examples by direct count") {
  // 4 true pixels, 3 covered; 2 false positives
  const auto t = flat_task({0.9, 0.9, 0.9, 0.1, 0.9, 0.9, 0.1, 0.1, 0.1, 0.1}, {1, 1, 1, 1, 0, 0, 0, 0, 0, 0});
  const ServerView v(t, 1.0);
  CHECK(reliability_loss(v, 0.5, LossKind::fnr) == 0.25);
  CHECK(reliability_loss(v, 0.5, LossKind::miscoverage) == 1.0);
  CHECK(precision_loss(v, 0.5, LossKind::relative_fp) == 0.5);
  CHECK(precision_loss(v, 0.5, LossKind::fpr) == doctest::Approx(2.0 / 6.0));

  // ten classes, three in the set
  const auto cls = flat_task({0.9, 0.8, 0.7, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1}, {1, 0, 0, 0, 0, 0, 0, 0, 0, 0});
  CHECK(precision_loss(ServerView(cls, 1.0), 0.5, LossKind::set_size) == doctest::Approx(0.3));
  CHECK(reliability_loss(ServerView(cls, 1.0), 0.5, LossKind::miscoverage) == 0.0);
}

TEST_CASE("boundary anchors and domain errors") {
  const auto t = flat_task({0.9, 0.2, 0.1, 0.1}, {1, 0, 0, 0});
  const ServerView v(t, 1.0);
  CHECK(reliability_loss(v, 0.0, LossKind::fnr) == 0.0);
  CHECK(reliability_loss(v, 0.0, LossKind::miscoverage) == 0.0);
  CHECK(precision_loss(v, 0.0, LossKind::fpr) == 1.0);
  CHECK(precision_loss(v, 0.0, LossKind::set_size) == 1.0);
  CHECK(precision_loss(v, 0.0, LossKind::relative_fp) == 1.0);  // min(3/1, 1)

  const auto empty = flat_task({0.9, 0.2}, {0, 0});
  CHECK_THROWS_AS(reliability_loss(ServerView(empty, 1.0), 0.5, LossKind::fnr), std::domain_error);
  CHECK_THROWS_AS(precision_loss(ServerView(empty, 1.0), 0.5, LossKind::relative_fp), std::domain_error);
  const auto full = flat_task({0.9, 0.2}, {1, 1});
  CHECK_THROWS_AS(precision_loss(ServerView(full, 1.0), 0.5, LossKind::fpr), std::domain_error);
}

TEST_CASE("server views") {
  TaskGenConfig c;
  auto rng = make_stream(6, Stream::tasks);
  const auto t = generate_task(rng, c);
  const ServerView perfect(t, std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < t.pixel_count(); ++i) REQUIRE(perfect.confidence()[i] == (t.mask[i] ? 1.0 : 0.0));
  const ServerView base(t, 1.0);
  for (std::size_t i = 0; i < t.pixel_count(); ++i) REQUIRE(base.confidence()[i] == t.base_confidence(i));
  for (double q : {0.0, 0.5, 2.0, 7.0}) {
    const ServerView v(t, q);
    for (double p : v.confidence()) {
      REQUIRE(p >= 0.0);
      REQUIRE(p <= 1.0);
    }
  }
}

TEST_CASE("property: monotonicity over random tasks and thresholds") {
  TaskGenConfig c;
  auto rng = make_stream(10, Stream::tasks);
  for (int i = 0; i < 100; ++i) {
    const auto t = generate_task(rng, c);
    for (double q : {0.8, 1.0, 3.0}) {
      const ServerView v(t, q);
      auto prev_set = prediction_set(v, 0.0);
      std::vector<double> prev(5);
      for (std::size_t j = 0; j < 5; ++j)
        prev[j] = is_reliability_loss(kAll[j]) ? reliability_loss(v, 0.0, kAll[j]) : precision_loss(v, 0.0, kAll[j]);
      for (int s = 1; s <= 20; ++s) {
        const double th = s / 20.0;
        const auto set = prediction_set(v, th);
        REQUIRE(std::includes(prev_set.begin(), prev_set.end(), set.begin(), set.end()));
        for (std::size_t j = 0; j < 5; ++j) {
          const bool rel = is_reliability_loss(kAll[j]);
          const double l = rel ? reliability_loss(v, th, kAll[j]) : precision_loss(v, th, kAll[j]);
          REQUIRE(l >= 0.0);
          REQUIRE(l <= 1.0);
          if (rel) REQUIRE(l >= prev[j]);
          else REQUIRE(l <= prev[j]);
          prev[j] = l;
        }
        prev_set = set;
      }
    }
  }
}

}
