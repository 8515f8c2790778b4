#pragma once

// Independent reference computations used only by tests. Nothing here calls
// into the solver, channel or loss code it is meant to check.

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <utility>
#include <vector>

namespace oracle {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// ---- channel ---------------------------------------------------------------

inline double shannon(double power, double gain, double bandwidth, double n0) {
  return bandwidth * std::log(1.0 + power * gain / (bandwidth * n0)) / std::log(2.0);
}

/// Smallest power whose capacity carries `bits` in `slot` seconds, found by
/// bisection on the capacity curve. Returns +inf when the gain is zero.
inline double bisect_min_power(double bits, double gain, double bandwidth, double n0, double slot) {
  if (gain <= 0.0) return kInf;
  const double need = bits / slot;
  double lo = 0.0, hi = 1.0;
  while (shannon(hi, gain, bandwidth, n0) < need) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (shannon(mid, gain, bandwidth, n0) < need ? lo : hi) = mid;
  }
  return hi;
}

// ---- graph constant ---------------------------------------------------------

/// N K + K sum_n (out_n^2 + in_n^2) / 2 from a raw edge list.
inline double degree_sum_drift(int nodes, const std::vector<std::pair<int, int>>& edges, int users) {
  std::vector<int> out(nodes, 0), in(nodes, 0);
  for (auto [a, b] : edges) {
    ++out[a];
    ++in[b];
  }
  double s = 0.0;
  for (int n = 0; n < nodes; ++n) s += out[n] * out[n] + in[n] * in[n];
  return static_cast<double>(nodes) * users + users * s / 2.0;
}

// ---- losses ----------------------------------------------------------------

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

/// Expected FNR of an unsharpened map at threshold theta: the probability
/// that a mask pixel with mean 0.5 + a and noise sigma falls below theta.
inline double gaussian_tail_fnr(double contrast, double sigma, double theta) {
  return normal_cdf((theta - (0.5 + contrast)) / sigma);
}

inline double batch_mean(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

// ---- per-slot problem --------------------------------------------------------

/// Self-contained description of one slot, mirroring the model equations
/// without reference to the library types.
struct SlotInstance {
  int nodes = 0;
  int users = 0;
  std::vector<bool> server;
  std::vector<int> user_node;  // ED node of each user
  std::vector<std::pair<int, int>> links;
  std::vector<int> r_max;
  std::vector<int> i_max;
  std::vector<double> p_max;
  std::vector<double> bandwidth;
  std::vector<double> gain;
  std::vector<int> q;          // [n * users + k]
  std::vector<double> bits;    // per user
  std::vector<double> fhat;    // [n * users + k]
  std::vector<double> penalty; // [n * users + k]
  std::vector<double> bonus;   // per user
  double V = 1.0;
  double eta = 0.0;
  double slot = 0.05;
  double n0 = 0.0;

  int route_vars() const { return static_cast<int>(links.size()) * users; }
  int vars() const { return route_vars() + nodes * users; }
};

/// Assignment over the canonical variable order: route (e, k) at e K + k,
/// then process (n, k) at L K + n K + k.
using Bits = std::vector<std::uint8_t>;

/// Objective of an assignment, +inf when any constraint fails. Link power is
/// the closed-form inverse of the Shannon rate for the total bits carried.
inline double evaluate(const SlotInstance& s, const Bits& x) {
  const int K = s.users;
  const int L = static_cast<int>(s.links.size());
  std::vector<int> uses(static_cast<std::size_t>(s.nodes) * K, 0);
  std::vector<double> node_power(s.nodes, 0.0);
  double energy = 0.0, reward = 0.0, precision = 0.0, penalty = 0.0;
  for (int e = 0; e < L; ++e) {
    const auto [from, to] = s.links[e];
    int load = 0;
    double bits = 0.0;
    for (int k = 0; k < K; ++k) {
      if (!x[e * K + k]) continue;
      ++load;
      bits += s.bits[k];
      ++uses[from * K + k];
      reward += s.q[from * K + k] - s.q[to * K + k];
    }
    if (load == 0) continue;
    if (load > s.r_max[e]) return kInf;
    if (s.gain[e] <= 0.0) return kInf;
    const double p = (std::pow(2.0, bits / (s.slot * s.bandwidth[e])) - 1.0) * s.bandwidth[e] * s.n0 / s.gain[e];
    node_power[from] += p;
    energy += p * s.slot;
  }
  for (int n = 0; n < s.nodes; ++n) {
    int decided = 0;
    for (int k = 0; k < K; ++k) {
      if (!x[L * K + n * K + k]) continue;
      if (!s.server[n]) return kInf;
      ++decided;
      ++uses[n * K + k];
      precision += s.fhat[n * K + k];
      penalty += s.penalty[n * K + k];
      reward += s.q[n * K + k] + s.bonus[k];
    }
    if (decided > s.i_max[n]) return kInf;
    if (node_power[n] > s.p_max[n]) return kInf;
  }
  for (int i = 0; i < s.nodes * K; ++i)
    if (uses[i] > s.q[i]) return kInf;
  return s.V * (energy + s.eta * precision) + penalty - reward;
}

struct BruteResult {
  double value = kInf;
  Bits best;
};

/// Exhaustive search over all 2^vars assignments.
inline BruteResult brute_force(const SlotInstance& s) {
  const int n = s.vars();
  BruteResult r;
  Bits x(n, 0);
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
    for (int i = 0; i < n; ++i) x[i] = (m >> i) & 1;
    const double v = evaluate(s, x);
    if (v < r.value) {
      r.value = v;
      r.best = x;
    }
  }
  return r;
}

/// Random connected-ish instance with at most `max_vars` binary variables.
inline SlotInstance random_instance(std::mt19937_64& rng, int max_vars = 12) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> qd(0, 6);
  for (;;) {
    SlotInstance s;
    s.users = 1 + static_cast<int>(u(rng) * 2.0);  // 1 or 2
    const int eds = s.users;
    const int servers = 1 + static_cast<int>(u(rng) * 3.0);
    s.nodes = eds + servers;
    for (int n = 0; n < s.nodes; ++n) s.server.push_back(n >= eds);
    for (int k = 0; k < s.users; ++k) s.user_node.push_back(k);
    // each ED reaches at least one server; servers may chain
    for (int k = 0; k < eds; ++k) s.links.push_back({k, eds + static_cast<int>(u(rng) * servers)});
    for (int a = 0; a < s.nodes; ++a)
      for (int b = eds; b < s.nodes; ++b) {
        if (a == b) continue;
        bool dup = false;
        for (auto l : s.links) dup = dup || (l.first == a && l.second == b);
        if (!dup && u(rng) < 0.25) s.links.push_back({a, b});
      }
    if (s.vars() > max_vars) continue;
    const double noise = std::pow(10.0, -20.4);
    for (std::size_t e = 0; e < s.links.size(); ++e) {
      s.r_max.push_back(1 + static_cast<int>(u(rng) * 2.0));
      s.bandwidth.push_back(20e6);
      // mix of good, fading and dead links
      const double pl = u(rng) < 0.1 ? 0.0 : std::pow(10.0, -(70.0 + 30.0 * u(rng)) / 10.0);
      s.gain.push_back(pl * -std::log(1.0 - u(rng)));
    }
    for (int n = 0; n < s.nodes; ++n) {
      s.i_max.push_back(1 + static_cast<int>(u(rng) * 2.0));
      s.p_max.push_back(u(rng) < 0.2 ? 0.01 : 3.5);
    }
    s.q.resize(static_cast<std::size_t>(s.nodes) * s.users);
    s.fhat.resize(s.q.size());
    s.penalty.resize(s.q.size());
    for (std::size_t i = 0; i < s.q.size(); ++i) {
      s.q[i] = u(rng) < 0.3 ? 0 : qd(rng);
      s.fhat[i] = u(rng);
      s.penalty[i] = u(rng) < 0.5 ? 0.0 : 3.0 * u(rng);
    }
    for (int k = 0; k < s.users; ++k) {
      s.bits.push_back(u(rng) < 0.5 ? 6291456.0 : 1572864.0);
      s.bonus.push_back(u(rng) < 0.5 ? 0.0 : 2.0 * u(rng));
    }
    s.V = std::pow(10.0, 4.0 * u(rng));
    s.eta = u(rng) < 0.2 ? 0.0 : 0.02 * u(rng);
    s.slot = 0.05;
    s.n0 = noise;
    return s;
  }
}

}  // namespace oracle
