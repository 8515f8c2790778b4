#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>

#include "clo/channel.hpp"
#include "clo/lo_benchmarks.hpp"
#include "clo/rng.hpp"
#include "clo/slot_optimizer.hpp"
#include "clo/tasks.hpp"
#include "oracles/oracles.hpp"
#include "support/fixtures.hpp"

using namespace clo;
using fixtures::ed_node;
using fixtures::edge;
using fixtures::server_node;

namespace {

const double kN0 = std::pow(10.0, -20.4);

struct Pair {
  Network net;
  QueueState q;
  ChannelMatrix ch;
};

// ED1 -> S1 with gain 1e-9
std::unique_ptr<Pair> pair_network(int q_ed, int q_s) {
  auto p = std::make_unique<Pair>();
  NetworkConfig c;
  c.nodes = {ed_node("ED1"), server_node("S1")};
  c.edges = {edge("ED1", "S1")};
  p->net = build_network(c);
  p->q = QueueState(2, 1);
  DuId id = 1;
  fixtures::fill(p->q, 0, 0, q_ed, id);
  fixtures::fill(p->q, 1, 0, q_s, id);
  p->ch.gain = {1e-9};
  return p;
}

}  // namespace

TEST_SUITE("slot-optimizer") {

TEST_CASE("objective examples") {
  auto p = pair_network(0, 5);
  auto prob = make_slot_problem(p->net, p->q, p->ch, 200.0, 0.0, 0.05, kN0);
  SlotActions a(1, 2, 1);
  CHECK(slot_objective(prob, a) == 0.0);
  a.set_process(1, 0, true);
  CHECK(slot_objective(prob, a) == -5.0);

  auto r = pair_network(3, 0);
  auto rp = make_slot_problem(r->net, r->q, r->ch, 200.0, 0.5, 0.05, kN0);
  SlotActions tx(1, 2, 1);
  tx.set_route(0, 0, true);
  const auto terms = objective_terms(rp, tx);
  CHECK(terms.energy == doctest::Approx(0.308e-3).epsilon(2e-3));
  CHECK(terms.total == doctest::Approx(200.0 * terms.energy - 3.0));
  CHECK(terms.total == doctest::Approx(-2.94).epsilon(2e-3));

  r->ch.gain = {0.0};
  CHECK(std::isinf(slot_objective(rp, tx)));
}

TEST_CASE("exact solver small cases") {
  auto empty = pair_network(0, 0);
  auto ep = make_slot_problem(empty->net, empty->q, empty->ch, 200.0, 0.5, 0.05, kN0);
  CHECK(solve_exact(ep) == SlotActions(1, 2, 1));

  auto one = pair_network(1, 0);
  auto op = make_slot_problem(one->net, one->q, one->ch, 200.0, 0.5, 0.05, kN0);
  const auto a = solve_exact(op);
  CHECK(a.route(0, 0));
  CHECK(a.power(0) > 0.0);

  // V E > 1 flips the choice
  auto costly = make_slot_problem(one->net, one->q, one->ch, 1e5, 0.5, 0.05, kN0);
  CHECK_FALSE(solve_exact(costly).route(0, 0));
}

TEST_CASE("exact solver refuses oversized blocks") {
  std::mt19937_64 rng(5);
  const auto s = oracle::random_instance(rng, 12);
  auto b = fixtures::build(s);
  for (int n = 0; n < s.nodes; ++n)
    for (int k = 0; k < s.users; ++k) b->queues.fifo(n, k).push_back({999, 1});
  const auto vars = largest_block_variables(b->problem);
  REQUIRE(vars > 0);
  CHECK_THROWS_AS(solve_exact(b->problem, vars - 1), ExactLimitExceeded);
  CHECK_NOTHROW(solve_exact(b->problem, vars));
}

TEST_CASE("property: exact equals the brute-force optimum; greedy is never better") {
  std::mt19937_64 rng(2024);
  int solved = 0;
  for (int i = 0; i < 300; ++i) {
    const auto s = oracle::random_instance(rng, 12);
    auto b = fixtures::build(s);
    const auto exact = solve_exact(b->problem);
    const auto greedy = solve_greedy(b->problem);
    REQUIRE(feasibility_violations(b->problem, exact).empty());
    REQUIRE(feasibility_violations(b->problem, greedy).empty());
    const auto ref = oracle::brute_force(s);
    const double ve = oracle::evaluate(s, fixtures::to_bits(s, exact));
    const double vg = oracle::evaluate(s, fixtures::to_bits(s, greedy));
    REQUIRE(ve == ref.value);
    REQUIRE(vg >= ve);
    REQUIRE(slot_objective(b->problem, exact) == doctest::Approx(ve).epsilon(1e-9));
    ++solved;
  }
  CHECK(solved == 300);
}

TEST_CASE("greedy trivial cases") {
  auto p = pair_network(2, 0);
  auto huge = make_slot_problem(p->net, p->q, p->ch, 1e9, 0.5, 0.05, kN0);
  CHECK(solve_greedy(huge) == SlotActions(1, 2, 1));

  auto s = pair_network(0, 4);
  auto sp = make_slot_problem(s->net, s->q, s->ch, 200.0, 0.5, 0.05, kN0);
  CHECK(solve_greedy(sp) == solve_exact(sp));
  CHECK(solve_greedy(sp).process(1, 0));
}

TEST_CASE("property: a larger eta never raises the optimum's precision term") {
  std::mt19937_64 rng(77);
  for (int i = 0; i < 100; ++i) {
    auto s = oracle::random_instance(rng, 12);
    auto b = fixtures::build(s);
    double prev = oracle::kInf;
    for (double eta : {0.0, 0.001, 0.01, 0.05, 0.2, 1.0, 5.0}) {
      b->problem.eta = eta;
      const double f = objective_terms(b->problem, solve_exact(b->problem)).precision;
      REQUIRE(f <= prev + 1e-12);
      prev = f;
    }
  }
}

TEST_CASE("predictors") {
  const auto o = PrecisionPredictor::oracle();
  CHECK(o.estimate(0.37, 1, 2, 0.5) == 0.37);

  const auto n = PrecisionPredictor::noisy(0.1, 0.3, 42);
  const auto n2 = PrecisionPredictor::noisy(0.1, 0.3, 42);
  double diff = 0.0;
  for (DuId du = 0; du < 500; ++du) {
    const double e = n.estimate(0.5, du, 1, 0.5);
    REQUIRE(e >= 0.0);
    REQUIRE(e <= 1.0);
    REQUIRE(e == n2.estimate(0.5, du, 1, 0.5));
    diff += e - 0.5;
  }
  CHECK(diff / 500 == doctest::Approx(0.1).epsilon(0.5));
  CHECK(PrecisionPredictor::noisy(0.0, 0.0, 1).estimate(0.25, 3, 1, 0.5) == 0.25);

  auto table = std::make_shared<LossTable>(std::vector<double>{0.2, 0.8}, 2);
  table->precision_row(1) = {0.6, 0.2};
  table->reliability_row(1) = {0.0, 0.5};
  const auto t = PrecisionPredictor::table(table);
  CHECK(t.estimate(0.99, 7, 1, 0.5) == doctest::Approx(0.4));
}

TEST_CASE("oracle predictor matches the realized precision loss") {
  NetworkConfig c;
  c.nodes = {ed_node("ED1"), ed_node("ED2"), server_node("S1", 0.8), server_node("S2", 2.0)};
  c.edges = {edge("ED1", "S1"), edge("ED2", "S1"), edge("S1", "S2")};
  const auto net = build_network(c);
  auto rng = make_stream(3, Stream::tasks);
  TaskGenConfig tc;
  std::vector<SyntheticTask> tasks;
  QueueState q(4, 2);
  for (std::size_t n = 2; n < 4; ++n)
    for (std::size_t k = 0; k < 2; ++k)
      for (int i = 0; i < 3; ++i) {
        tasks.push_back(generate_task(rng, tc, tasks.size() + 1, k));
        q.fifo(n, k).push_back({tasks.back().id, 1});
      }
  ChannelMatrix ch{{1e-9, 1e-9, 1e-9}};
  auto prob = make_slot_problem(net, q, ch, 200.0, 2.0, 0.05, kN0);
  prob.thresholds = {0.45, 0.6};
  const auto pred = PrecisionPredictor::oracle();
  auto loss_of = [&](std::size_t n, std::size_t k, DuId du) {
    return precision_loss(ServerView(tasks.at(du - 1), net.node(n).quality), prob.thresholds[k],
                          LossKind::relative_fp);
  };
  for (std::size_t n = 2; n < 4; ++n)
    for (std::size_t k = 0; k < 2; ++k) {
      const auto du = q.head(n, k).id;
      prob.precision_hat[n * 2 + k] = pred.estimate(loss_of(n, k, du), du, n, prob.thresholds[k]);
    }
  const auto a = solve_exact(prob);
  const double predicted = objective_terms(prob, a).precision;
  auto after = q;
  const auto decided = apply_slot(after, net, a, std::vector<std::uint8_t>{0, 0}, std::vector<QueuedDu>(2));
  REQUIRE(!decided.empty());
  double realized = 0.0;
  for (const auto& d : decided) realized += loss_of(d.server, d.user, d.du.id);
  CHECK(realized == predicted);
}

TEST_CASE("LDPP diagnostic") {
  auto p = pair_network(0, 0);
  auto prob = make_slot_problem(p->net, p->q, p->ch, 200.0, 0.5, 0.05, kN0);
  const double D = drift_constant(p->net, 1);
  SlotActions none(1, 2, 1);
  const auto z = ldpp_diagnostic(prob, none, std::vector<std::uint8_t>{0}, 0.0, D);
  CHECK(z.realized == 0.0);
  CHECK(z.bound >= 0.0);
  const auto birth = ldpp_diagnostic(prob, none, std::vector<std::uint8_t>{1}, 0.0, D);
  CHECK(birth.g_after - birth.g_before == 0.5);
  CHECK(birth.realized <= birth.bound);
}

TEST_CASE("property: realized drift-plus-penalty stays under the bound") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const auto s = oracle::random_instance(rng, 12);
    auto b = fixtures::build(s);
    const auto a = u(rng) < 0.5 ? solve_exact(b->problem) : solve_greedy(b->problem);
    std::vector<std::uint8_t> arr(s.users);
    for (auto& x : arr) x = u(rng) < 0.5;
    const double realized_f = objective_terms(b->problem, a).precision;
    const auto r = ldpp_diagnostic(b->problem, a, arr, realized_f, drift_constant(b->net, s.users));
    REQUIRE(r.realized <= r.bound + 1e-9);
  }
}

}
