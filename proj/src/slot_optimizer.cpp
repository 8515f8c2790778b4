#include "clo/slot_optimizer.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "clo/errors.hpp"
#include "clo/lo_benchmarks.hpp"
#include "clo/rng.hpp"

namespace clo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Mask = std::uint64_t;

struct Option {
  Mask users = 0;
  double cost = 0.0;
  double power = 0.0;
};

// Variables owned by one node: its outgoing links and, for servers, its
// processing decisions. No constraint or cost term crosses node boundaries.
struct NodeBlock {
  std::size_t node = 0;
  std::vector<std::size_t> links;
  std::vector<std::vector<Option>> link_options;  // first entry is "idle"
  std::vector<Option> process_options;            // first entry is "idle"
  std::vector<int> q;
  double p_max = 0.0;
  std::size_t variables = 0;
};

struct Choice {
  double cost = 0.0;
  int transmissions = 0;
  int decisions = 0;
  std::vector<std::size_t> link_pick;
  std::size_t process_pick = 0;
};

double route_reward(const SlotProblem& p, std::size_t e, Mask users) {
  double r = 0.0;
  for (std::size_t k = 0; k < p.users(); ++k)
    if (users >> k & 1) r += differential_backlog(*p.queues, *p.network, e, k);
  return r;
}

double bits_of(const SlotProblem& p, Mask users) {
  double bits = 0.0;
  for (std::size_t k = 0; k < p.users(); ++k)
    if (users >> k & 1) bits += p.du_bits[k];
  return bits;
}

double link_energy_for(const SlotProblem& p, std::size_t e, double bits, double power) {
  const auto& l = p.network->link(e);
  return link_energy(power, bits,
                     capacity(power, p.channels->gain[e], l.bandwidth_hz, p.noise_w_per_hz));
}

double process_cost(const SlotProblem& p, std::size_t n, std::size_t k) {
  return p.V * p.eta * p.precision_at(n, k) + p.penalty_at(n, k) -
         (static_cast<double>(p.queues->length(n, k)) + p.bonus_at(k));
}

// Non-empty submasks of `eligible` with at most `cap` members, ascending.
std::vector<Mask> submasks(Mask eligible, int cap) {
  std::vector<Mask> out;
  for (Mask s = eligible; s; s = (s - 1) & eligible)
    if (std::popcount(s) <= cap) out.push_back(s);
  std::sort(out.begin(), out.end());
  return out;
}

NodeBlock make_block(const SlotProblem& p, std::size_t n) {
  const Network& net = *p.network;
  const std::size_t K = p.users();
  NodeBlock b;
  b.node = n;
  b.p_max = net.node(n).p_max_w;
  b.q.resize(K);
  Mask eligible = 0;
  for (std::size_t k = 0; k < K; ++k) {
    b.q[k] = p.queues->length(n, k);
    if (b.q[k] > 0) eligible |= Mask{1} << k;
  }
  for (auto e : net.out_links(n)) {
    std::vector<Option> opts{Option{}};
    Mask alive = 0;
    for (std::size_t k = 0; k < K; ++k) {
      if (!(eligible >> k & 1)) continue;
      if (link_power(p, e, p.du_bits[k])) alive |= Mask{1} << k;
    }
    b.variables += static_cast<std::size_t>(std::popcount(alive));
    for (Mask s : submasks(alive, net.link(e).r_max)) {
      const double bits = bits_of(p, s);
      const auto power = link_power(p, e, bits);
      if (!power) continue;
      const double cost = p.V * link_energy_for(p, e, bits, *power) - route_reward(p, e, s);
      opts.push_back({s, cost, *power});
    }
    b.links.push_back(e);
    b.link_options.push_back(std::move(opts));
  }
  b.process_options.push_back(Option{});
  if (net.is_server(n)) {
    b.variables += static_cast<std::size_t>(std::popcount(eligible));
    for (Mask s : submasks(eligible, net.node(n).i_max)) {
      double cost = 0.0;
      for (std::size_t k = 0; k < K; ++k)
        if (s >> k & 1) cost += process_cost(p, n, k);
      b.process_options.push_back({s, cost, 0.0});
    }
  }
  return b;
}

std::vector<std::size_t> chosen_vars(const SlotProblem& p, const NodeBlock& b, const Choice& c) {
  const std::size_t K = p.users();
  const std::size_t L = p.network->link_count();
  std::vector<std::size_t> vars;
  for (std::size_t i = 0; i < b.links.size(); ++i) {
    const Mask m = b.link_options[i][c.link_pick[i]].users;
    for (std::size_t k = 0; k < K; ++k)
      if (m >> k & 1) vars.push_back(b.links[i] * K + k);
  }
  const Mask m = b.process_options[c.process_pick].users;
  for (std::size_t k = 0; k < K; ++k)
    if (m >> k & 1) vars.push_back(L * K + b.node * K + k);
  std::sort(vars.begin(), vars.end());
  return vars;
}

bool better(const SlotProblem& p, const NodeBlock& b, const Choice& a, const Choice& c) {
  if (a.cost != c.cost) return a.cost < c.cost;
  if (a.transmissions != c.transmissions) return a.transmissions < c.transmissions;
  if (a.decisions != c.decisions) return a.decisions < c.decisions;
  return chosen_vars(p, b, a) < chosen_vars(p, b, c);
}

struct Search {
  const SlotProblem& p;
  const NodeBlock& b;
  Choice current;
  Choice best;
  bool have_best = false;
  std::vector<int> used;
  double power = 0.0;

  void run() {
    current.link_pick.assign(b.links.size(), 0);
    used.assign(p.users(), 0);
    dfs(0);
  }

  bool take(Mask m, int sign) {
    bool ok = true;
    for (std::size_t k = 0; k < p.users(); ++k)
      if (m >> k & 1) {
        used[k] += sign;
        if (used[k] > b.q[k]) ok = false;
      }
    return ok;
  }

  void dfs(std::size_t i) {
    if (i == b.links.size()) {
      for (std::size_t j = 0; j < b.process_options.size(); ++j) {
        const auto& o = b.process_options[j];
        const bool ok = take(o.users, +1);
        if (ok) {
          Choice c = current;
          c.process_pick = j;
          c.cost += o.cost;
          c.decisions = std::popcount(o.users);
          if (!have_best || better(p, b, c, best)) {
            best = std::move(c);
            have_best = true;
          }
        }
        take(o.users, -1);
      }
      return;
    }
    for (std::size_t j = 0; j < b.link_options[i].size(); ++j) {
      const auto& o = b.link_options[i][j];
      const double saved_power = power;
      const double saved_cost = current.cost;
      const int saved_tx = current.transmissions;
      const bool ok = take(o.users, +1);
      power += o.power;
      if (ok && power <= b.p_max) {
        current.link_pick[i] = j;
        current.cost += o.cost;
        current.transmissions += std::popcount(o.users);
        dfs(i + 1);
      }
      take(o.users, -1);
      power = saved_power;
      current.cost = saved_cost;
      current.transmissions = saved_tx;
      current.link_pick[i] = 0;
    }
  }
};

void write_choice(const SlotProblem& p, const NodeBlock& b, const Choice& c, SlotActions& a) {
  for (std::size_t i = 0; i < b.links.size(); ++i) {
    const auto& o = b.link_options[i][c.link_pick[i]];
    for (std::size_t k = 0; k < p.users(); ++k)
      if (o.users >> k & 1) a.set_route(b.links[i], k, true);
    a.set_power(b.links[i], o.power);
  }
  const auto& o = b.process_options[c.process_pick];
  for (std::size_t k = 0; k < p.users(); ++k)
    if (o.users >> k & 1) a.set_process(b.node, k, true);
}

void check_problem(const SlotProblem& p) {
  if (!p.network || !p.queues || !p.channels) throw ContractViolation("slot problem is incomplete");
  if (p.users() > 64) throw ContractViolation("at most 64 users are supported");
  if (!(p.V > 0.0) || !(p.eta >= 0.0)) throw ContractViolation("slot problem needs V > 0, eta >= 0");
}

}  // namespace

PrecisionPredictor PrecisionPredictor::oracle() { return {}; }

PrecisionPredictor PrecisionPredictor::noisy(double bias, double stddev, std::uint64_t seed) {
  PrecisionPredictor p;
  p.mode_ = PredictorMode::noisy;
  p.bias_ = bias;
  p.stddev_ = stddev;
  p.seed_ = seed;
  return p;
}

PrecisionPredictor PrecisionPredictor::table(std::shared_ptr<const LossTable> table) {
  PrecisionPredictor p;
  p.mode_ = PredictorMode::table;
  p.table_ = std::move(table);
  return p;
}

double PrecisionPredictor::estimate(double true_loss, DuId du, std::size_t server,
                                    double theta) const {
  switch (mode_) {
    case PredictorMode::oracle:
      return true_loss;
    case PredictorMode::noisy:
      return std::clamp(true_loss + bias_ + stddev_ * keyed_normal(seed_, du, server), 0.0, 1.0);
    case PredictorMode::table:
      return table_->precision_at(server, theta);
  }
  return true_loss;
}

double SlotProblem::precision_at(std::size_t n, std::size_t k) const {
  return precision_hat.empty() ? 0.0 : precision_hat[n * users() + k];
}

double SlotProblem::penalty_at(std::size_t n, std::size_t k) const {
  return processing_penalty.empty() ? 0.0 : processing_penalty[n * users() + k];
}

double SlotProblem::bonus_at(std::size_t k) const {
  return backlog_bonus.empty() ? 0.0 : backlog_bonus[k];
}

SlotProblem make_slot_problem(const Network& network, const QueueState& queues,
                              const ChannelMatrix& channels, double V, double eta,
                              double slot_s, double noise_w_per_hz) {
  SlotProblem p;
  p.network = &network;
  p.queues = &queues;
  p.channels = &channels;
  p.V = V;
  p.eta = eta;
  p.slot_s = slot_s;
  p.noise_w_per_hz = noise_w_per_hz;
  const std::size_t K = network.user_count();
  const std::size_t N = network.node_count();
  p.thresholds.assign(K, 0.5);
  p.du_bits.resize(K);
  for (std::size_t k = 0; k < K; ++k) {
    p.du_bits[k] = network.node(network.user_node(k)).user.du_bits;
    p.thresholds[k] = network.node(network.user_node(k)).user.theta0;
  }
  p.precision_hat.assign(N * K, 0.0);
  p.processing_penalty.assign(N * K, 0.0);
  p.backlog_bonus.assign(K, 0.0);
  return p;
}

std::optional<double> link_power(const SlotProblem& problem, std::size_t e, double bits) {
  const auto& l = problem.network->link(e);
  return min_power_for_slot(bits, problem.channels->gain[e], l.bandwidth_hz,
                            problem.noise_w_per_hz, problem.slot_s,
                            problem.network->node(l.from).p_max_w);
}

ObjectiveTerms objective_terms(const SlotProblem& p, const SlotActions& a) {
  const Network& net = *p.network;
  const std::size_t K = p.users();
  ObjectiveTerms t;
  for (std::size_t e = 0; e < net.link_count(); ++e) {
    Mask m = 0;
    for (std::size_t k = 0; k < K; ++k)
      if (a.route(e, k)) {
        m |= Mask{1} << k;
        t.routing_reward += differential_backlog(*p.queues, net, e, k);
      }
    if (!m) continue;
    const double bits = bits_of(p, m);
    const auto power = link_power(p, e, bits);
    if (!power) {
      t.energy = kInf;
      continue;
    }
    t.energy += link_energy_for(p, e, bits, *power);
  }
  for (std::size_t n = 0; n < net.node_count(); ++n)
    for (std::size_t k = 0; k < K; ++k) {
      if (!a.process(n, k)) continue;
      t.precision += p.precision_at(n, k);
      t.penalty += p.penalty_at(n, k);
      t.processing_reward += static_cast<double>(p.queues->length(n, k)) + p.bonus_at(k);
    }
  t.total = p.V * (t.energy + p.eta * t.precision) + t.penalty - t.routing_reward -
            t.processing_reward;
  return t;
}

double slot_objective(const SlotProblem& problem, const SlotActions& actions) {
  return objective_terms(problem, actions).total;
}

std::vector<std::string> feasibility_violations(const SlotProblem& p, const SlotActions& a) {
  const Network& net = *p.network;
  const std::size_t K = p.users();
  std::vector<std::string> out;
  for (std::size_t e = 0; e < net.link_count(); ++e)
    if (a.link_load(e) > net.link(e).r_max)
      out.push_back("link " + std::to_string(e) + " exceeds r_max");
  for (std::size_t n = 0; n < net.node_count(); ++n) {
    int decided = 0;
    for (std::size_t k = 0; k < K; ++k) {
      decided += a.process(n, k);
      if (a.uses(net, n, k) > p.queues->length(n, k))
        out.push_back("node " + net.node(n).id + " user " + std::to_string(k) +
                      " departs more DUs than queued");
    }
    if (decided > 0 && !net.is_server(n)) out.push_back("node " + net.node(n).id + " is not a server");
    if (net.is_server(n) && decided > net.node(n).i_max)
      out.push_back("server " + net.node(n).id + " exceeds i_max");
    double power = 0.0;
    for (auto e : net.out_links(n)) {
      Mask m = 0;
      for (std::size_t k = 0; k < K; ++k)
        if (a.route(e, k)) m |= Mask{1} << k;
      if (!m) continue;
      const auto pw = link_power(p, e, bits_of(p, m));
      if (!pw) {
        out.push_back("link " + std::to_string(e) + " cannot deliver within one slot");
        continue;
      }
      power += *pw;
    }
    if (power > net.node(n).p_max_w) out.push_back("node " + net.node(n).id + " exceeds p_max");
  }
  return out;
}

ExactLimitExceeded::ExactLimitExceeded(std::size_t variables, std::size_t limit)
    : std::runtime_error("exact solver: block has " + std::to_string(variables) +
                         " free binary variables, limit is " + std::to_string(limit) +
                         "; use the greedy solver"),
      variables_(variables) {}

std::size_t largest_block_variables(const SlotProblem& problem) {
  check_problem(problem);
  std::size_t best = 0;
  for (std::size_t n = 0; n < problem.network->node_count(); ++n)
    best = std::max(best, make_block(problem, n).variables);
  return best;
}

std::size_t active_variables(const SlotProblem& problem) {
  check_problem(problem);
  std::size_t total = 0;
  for (std::size_t n = 0; n < problem.network->node_count(); ++n)
    total += make_block(problem, n).variables;
  return total;
}

SlotActions solve_exact(const SlotProblem& problem, std::size_t var_limit) {
  check_problem(problem);
  const Network& net = *problem.network;
  SlotActions actions(net.link_count(), net.node_count(), problem.users());
  std::vector<NodeBlock> blocks;
  blocks.reserve(net.node_count());
  for (std::size_t n = 0; n < net.node_count(); ++n) {
    blocks.push_back(make_block(problem, n));
    if (blocks.back().variables > var_limit)
      throw ExactLimitExceeded(blocks.back().variables, var_limit);
  }
  for (const auto& b : blocks) {
    Search s{problem, b, {}, {}, false, {}, 0.0};
    s.run();
    write_choice(problem, b, s.best, actions);
  }
  return actions;
}

std::vector<std::size_t> chosen_variables(const SlotActions& actions) {
  const std::size_t K = actions.users();
  const std::size_t L = actions.links();
  std::vector<std::size_t> vars;
  for (std::size_t e = 0; e < L; ++e)
    for (std::size_t k = 0; k < K; ++k)
      if (actions.route(e, k)) vars.push_back(e * K + k);
  for (std::size_t n = 0; n < actions.nodes(); ++n)
    for (std::size_t k = 0; k < K; ++k)
      if (actions.process(n, k)) vars.push_back(L * K + n * K + k);
  return vars;
}

SlotActions solve_greedy(const SlotProblem& problem) {
  check_problem(problem);
  const Network& net = *problem.network;
  const std::size_t K = problem.users();
  const std::size_t L = net.link_count();
  SlotActions actions(L, net.node_count(), K);

  // Actions of different nodes never interact, so greedy runs node by node.
  for (std::size_t n = 0; n < net.node_count(); ++n) {
    const auto& outs = net.out_links(n);
    std::vector<Mask> link_users(outs.size(), 0);
    std::vector<double> link_cost(outs.size(), 0.0);
    std::vector<double> link_pow(outs.size(), 0.0);
    Mask proc = 0;
    std::vector<int> used(K, 0);
    for (;;) {
      double best_delta = 0.0;
      std::size_t best_var = 0;
      bool found = false;
      double best_cost = 0.0;
      double best_pow = 0.0;
      auto consider = [&](std::size_t var, double delta, double cost, double pw) {
        if (!(delta < 0.0)) return;
        if (!found || delta < best_delta || (delta == best_delta && var < best_var)) {
          best_delta = delta;
          best_var = var;
          best_cost = cost;
          best_pow = pw;
          found = true;
        }
      };
      double power_sum = 0.0;
      for (double pw : link_pow) power_sum += pw;
      for (std::size_t i = 0; i < outs.size(); ++i) {
        const std::size_t e = outs[i];
        if (std::popcount(link_users[i]) >= net.link(e).r_max) continue;
        for (std::size_t k = 0; k < K; ++k) {
          if (link_users[i] >> k & 1) continue;
          if (used[k] + 1 > problem.queues->length(n, k)) continue;
          const Mask m = link_users[i] | Mask{1} << k;
          const double bits = bits_of(problem, m);
          const auto pw = link_power(problem, e, bits);
          if (!pw || power_sum - link_pow[i] + *pw > net.node(n).p_max_w) continue;
          const double cost =
              problem.V * link_energy_for(problem, e, bits, *pw) - route_reward(problem, e, m);
          consider(e * K + k, cost - link_cost[i], cost, *pw);
        }
      }
      if (net.is_server(n) && std::popcount(proc) < net.node(n).i_max) {
        for (std::size_t k = 0; k < K; ++k) {
          if (proc >> k & 1) continue;
          if (used[k] + 1 > problem.queues->length(n, k)) continue;
          const double c = process_cost(problem, n, k);
          consider(L * K + n * K + k, c, c, 0.0);
        }
      }
      if (!found) break;
      if (best_var >= L * K) {
        const std::size_t k = best_var - L * K - n * K;
        proc |= Mask{1} << k;
        ++used[k];
      } else {
        const std::size_t e = best_var / K;
        const std::size_t k = best_var % K;
        const auto i = static_cast<std::size_t>(std::find(outs.begin(), outs.end(), e) - outs.begin());
        link_users[i] |= Mask{1} << k;
        link_cost[i] = best_cost;
        link_pow[i] = best_pow;
        ++used[k];
      }
    }
    for (std::size_t i = 0; i < outs.size(); ++i) {
      for (std::size_t k = 0; k < K; ++k)
        if (link_users[i] >> k & 1) actions.set_route(outs[i], k, true);
      actions.set_power(outs[i], link_pow[i]);
    }
    for (std::size_t k = 0; k < K; ++k)
      if (proc >> k & 1) actions.set_process(n, k, true);
  }
  return actions;
}

LdppReport ldpp_diagnostic(const SlotProblem& problem, const SlotActions& actions,
                           std::span<const std::uint8_t> arrivals,
                           double realized_precision_total, double drift_const) {
  const Network& net = *problem.network;
  const std::size_t K = problem.users();
  const auto before = problem.queues->lengths();
  const auto after = next_lengths(before, net, actions, arrivals);
  LdppReport r;
  r.g_before = lyapunov_value(std::span<const int>(before));
  r.g_after = lyapunov_value(std::span<const int>(after));
  const auto terms = objective_terms(problem, actions);
  r.penalty = problem.V * (terms.energy + problem.eta * realized_precision_total);
  r.realized = r.g_after - r.g_before + r.penalty;
  double cross = 0.0;
  for (std::size_t n = 0; n < net.node_count(); ++n)
    for (std::size_t k = 0; k < K; ++k) {
      int in = 0;
      int out = 0;
      for (auto e : net.in_links(n)) in += actions.route(e, k);
      for (auto e : net.out_links(n)) out += actions.route(e, k);
      if (net.is_server(n)) out += actions.process(n, k);
      if (net.is_ed(n) && net.user_node(k) == n) in += arrivals[k];
      cross += static_cast<double>(before[n * K + k]) * (in - out);
    }
  r.bound = drift_const + cross + r.penalty;
  return r;
}

}  // namespace clo
