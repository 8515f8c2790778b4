#include "clo/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <memory>
#include <numeric>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include "clo/channel.hpp"
#include "clo/errors.hpp"
#include "clo/queueing.hpp"
#include "clo/rng.hpp"

namespace clo {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

class Engine {
 public:
  Engine(const ScenarioConfig& cfg, std::uint64_t seed, const RunOptions& opt)
      : cfg_(cfg),
        opt_(opt),
        net_(build_network(cfg.network)),
        N_(net_.node_count()),
        K_(net_.user_count()),
        arrival_rng_(make_stream(seed, Stream::arrivals)),
        channel_rng_(make_stream(seed, Stream::channels)),
        task_rng_(make_stream(seed, Stream::tasks)),
        arrivals_(rates()),
        queues_(N_, K_),
        feedback_(delays()),
        noise_(dbm_per_hz_to_w_per_hz(cfg.channel.noise_dbm_per_hz)),
        drift_(drift_constant(net_, K_)) {
    if (cfg.nonstationary.enabled)
      arrivals_ = ArrivalProcess(rates(), cfg.nonstationary.period, cfg.nonstationary.switch_prob,
                                 cfg.nonstationary.levels);
    std::vector<double> theta0, gamma, target;
    for (std::size_t k = 0; k < K_; ++k) {
      const auto& u = user(k);
      theta0.push_back(u.theta0);
      gamma.push_back(u.learning_rate);
      target.push_back(u.target);
    }
    thresholds_ = ThresholdState::initial(theta0, gamma, target, delays());

    const bool lo = cfg.policy != Policy::clo;
    if (lo || cfg.predictor.mode == PredictorMode::table)
      table_ = std::make_shared<LossTable>(calibrate_table(cfg, seed));
    switch (cfg.predictor.mode) {
      case PredictorMode::oracle: predictor_ = PrecisionPredictor::oracle(); break;
      case PredictorMode::noisy:
        predictor_ = PrecisionPredictor::noisy(cfg.predictor.bias, cfg.predictor.stddev,
                                               mix64(seed ^ mix64(static_cast<std::uint64_t>(Stream::predictor))));
        break;
      case PredictorMode::table: predictor_ = PrecisionPredictor::table(table_); break;
    }

    vq_.use_z = cfg.policy == Policy::lo_avg;
    vq_.use_y = cfg.policy == Policy::lo_outage;
    vq_.z.assign(K_, 0.0);
    vq_.y.assign(K_, 0.0);
    vq_.step_z.assign(K_, cfg.lo.step_z);
    vq_.step_y.assign(K_, cfg.lo.step_y);
    vq_.epsilon.assign(K_, cfg.lo.epsilon);
    for (std::size_t k = 0; k < K_; ++k) {
      vq_.target.push_back(user(k).target);
      l_max_.push_back(cfg.lo.l_max.value_or(1.1 * user(k).target));
    }
    vq_.l_max = l_max_;
    latency_q_.assign(K_, 0.0);

    m_.scenario = cfg.name;
    m_.policy = cfg.policy;
    m_.seed = seed;
    m_.frame_size = cfg.run.frame;
    m_.slot_s = cfg.channel.slot_s;
    for (std::size_t k = 0; k < K_; ++k) {
      const auto& u = user(k);
      m_.users.push_back({net_.node(net_.user_node(k)).id, u.target, u.learning_rate, u.theta0,
                          u.delay_frames, u.arrival_prob});
    }
    for (const auto& n : net_.nodes()) m_.node_ids.push_back(n.id);
    m_.node_decisions.assign(N_, 0);
  }

  RunMetrics run() {
    const std::int64_t S = cfg_.run.frame;
    const std::int64_t F = cfg_.run.slots / S;
    m_.slots.reserve(static_cast<std::size_t>(cfg_.run.slots));
    m_.frames.reserve(static_cast<std::size_t>(F) * K_);
    cum_active_.assign(K_, 0.0);
    cum_all_.assign(K_, 0.0);
    active_.assign(K_, 0);
    for (std::int64_t f = 0; f < F; ++f) {
      std::vector<double> backlog_sum(K_, 0.0);
      std::vector<double> theta_sum(K_, 0.0);
      for (std::int64_t s = 1; s <= S; ++s) {
        const std::int64_t t = f * S + s;
        try {
          slot(t, f, backlog_sum, theta_sum);
        } catch (const std::exception& e) {
          throw std::runtime_error("slot " + std::to_string(t) + ": " + e.what());
        }
      }
      end_frame(f, backlog_sum, theta_sum);
    }
    m_.theta_min = thresholds_.min_theta;
    m_.theta_max = thresholds_.max_theta;
    m_.final_lengths = queues_.lengths();
    return std::move(m_);
  }

 private:
  const UserParams& user(std::size_t k) const { return net_.node(net_.user_node(k)).user; }

  std::vector<double> rates() const {
    std::vector<double> r;
    for (auto n : net_.users()) r.push_back(net_.node(n).user.arrival_prob);
    return r;
  }

  std::vector<int> delays() const {
    std::vector<int> d;
    for (auto n : net_.users()) d.push_back(net_.node(n).user.delay_frames);
    return d;
  }

  const ServerView& view(DuId du, std::size_t server) {
    const std::uint64_t key = du * N_ + server;
    auto it = views_.find(key);
    if (it == views_.end())
      it = views_.emplace(key, ServerView(tasks_.at(du), net_.node(server).quality)).first;
    return it->second;
  }

  void forget(DuId du) {
    for (std::size_t n = 0; n < N_; ++n) views_.erase(du * N_ + n);
    tasks_.erase(du);
  }

  void slot(std::int64_t t, std::int64_t f, std::vector<double>& backlog_sum,
            std::vector<double>& theta_sum) {
    const auto arrivals = arrivals_.next(t, arrival_rng_);
    const auto channels =
        sample_channels(net_, channel_rng_, cfg_.channel.fading ? Fading::rayleigh : Fading::none);
    SlotProblem problem = make_slot_problem(net_, queues_, channels, cfg_.effective_V(),
                                            cfg_.effective_eta(), cfg_.channel.slot_s, noise_);
    if (cfg_.latency.enabled) problem.backlog_bonus = latency_q_;

    SlotActions actions;
    std::optional<double> shared;
    if (cfg_.policy == Policy::clo) {
      problem.thresholds = thresholds_.theta;
      for (auto n : net_.servers())
        for (std::size_t k = 0; k < K_; ++k) {
          if (queues_.length(n, k) == 0) continue;
          const DuId du = queues_.head(n, k).id;
          const double theta = problem.thresholds[k];
          const double truth = predictor_.mode() == PredictorMode::table
                                   ? 0.0
                                   : precision_loss(view(du, n), theta, cfg_.losses.precision);
          problem.precision_hat[n * K_ + k] = predictor_.estimate(truth, du, n, theta);
        }
      actions = cfg_.run.solver == SolverKind::exact
                    ? solve_exact(problem, static_cast<std::size_t>(cfg_.run.exact_var_limit))
                    : solve_greedy(problem);
    } else {
      const auto d = solve_slot_lo(problem, vq_, *table_, static_cast<std::size_t>(cfg_.run.exact_var_limit));
      actions = d.actions;
      shared = d.theta;
      std::fill(problem.thresholds.begin(), problem.thresholds.end(), d.theta);
      for (auto n : net_.servers())
        for (std::size_t k = 0; k < K_; ++k) {
          problem.precision_hat[n * K_ + k] = table_->precision(n, d.grid_index);
          problem.processing_penalty[n * K_ + k] = vq_.weight(k) * table_->reliability(n, d.grid_index);
        }
    }
    for (std::size_t k = 0; k < K_; ++k) theta_sum[k] += problem.thresholds[k];

    if (opt_.assert_feasible) {
      const auto bad = feasibility_violations(problem, actions);
      if (!bad.empty()) throw ContractViolation("solver returned an infeasible action: " + bad.front());
    }

    SlotRecord rec;
    rec.slot = t;
    rec.frame = f;
    rec.shared_theta = shared;
    rec.energy_j = objective_terms(problem, actions).energy;

    // Realized losses of the DUs about to be decided (processing pops the head).
    struct Pending {
      std::size_t n, k;
      double rel, prec;
    };
    std::vector<Pending> pending;
    for (auto n : net_.servers())
      for (std::size_t k = 0; k < K_; ++k) {
        if (!actions.process(n, k)) continue;
        const DuId du = queues_.head(n, k).id;
        const double theta = problem.thresholds[k];
        const auto& v = view(du, n);
        pending.push_back({n, k, reliability_loss(v, theta, cfg_.losses.reliability),
                           precision_loss(v, theta, cfg_.losses.precision)});
        rec.precision_loss += pending.back().prec;
        rec.reliability_loss += pending.back().rel;
      }
    if (opt_.record_ldpp) {
      const auto r = ldpp_diagnostic(problem, actions, arrivals, rec.precision_loss, drift_);
      rec.ldpp_realized = r.realized;
      rec.ldpp_bound = r.bound;
      if (r.realized > r.bound) ++m_.ldpp_violations;
    }

    std::vector<QueuedDu> fresh(K_);
    for (std::size_t k = 0; k < K_; ++k) {
      if (!arrivals[k]) continue;
      const DuId id = next_id_++;
      tasks_.emplace(id, generate_task(task_rng_, cfg_.tasks, id, k, t));
      fresh[k] = {id, t};
      ++m_.arrivals;
    }

    const auto decided = apply_slot(queues_, net_, actions, arrivals, fresh);
    if (decided.size() != pending.size()) throw ContractViolation("decision bookkeeping mismatch");
    for (std::size_t i = 0; i < decided.size(); ++i) {
      const auto& d = decided[i];
      const auto& p = pending[i];
      feedback_.record(d.user, p.rel);
      ++m_.node_decisions[d.server];
      ++m_.decided;
      if (opt_.record_decisions)
        m_.decisions.push_back({t, f, d.user, d.server, d.du.id, d.du.generated_slot,
                                problem.thresholds[d.user], p.rel, p.prec});
      forget(d.du.id);
    }
    rec.decisions = static_cast<int>(decided.size());
    rec.backlog = queues_.total_backlog();
    rec.user_backlog.resize(K_);
    for (std::size_t k = 0; k < K_; ++k) {
      rec.user_backlog[k] = queues_.user_backlog(k);
      backlog_sum[k] += rec.user_backlog[k];
    }
    m_.slots.push_back(std::move(rec));
  }

  void end_frame(std::int64_t f, const std::vector<double>& backlog_sum,
                 const std::vector<double>& theta_sum) {
    std::vector<FrameSummary> current(K_);
    for (std::size_t k = 0; k < K_; ++k) current[k] = feedback_.current(k);
    const std::vector<double> theta_before = thresholds_.theta;
    const auto delayed = feedback_.close_frame();

    if (cfg_.policy == Policy::clo) {
      update_thresholds(thresholds_, delayed);
    } else {
      std::vector<double> loss(K_, 0.0);
      bool any = false;
      for (std::size_t k = 0; k < K_; ++k)
        if (delayed[k]) {
          loss[k] = delayed[k]->avg_loss;
          any = true;
        }
      // users whose feedback has not arrived yet keep their queues
      if (any) {
        VirtualQueues before = vq_;
        vq_.update(loss);
        for (std::size_t k = 0; k < K_; ++k)
          if (!delayed[k]) {
            vq_.z[k] = before.z[k];
            vq_.y[k] = before.y[k];
          }
      }
    }
    const double S = static_cast<double>(cfg_.run.frame);
    if (cfg_.latency.enabled)
      for (std::size_t k = 0; k < K_; ++k)
        latency_q_[k] = latency_virtual_queue_update(latency_q_[k], cfg_.latency.step,
                                                     backlog_sum[k] / S, cfg_.latency.q_avg);

    for (std::size_t k = 0; k < K_; ++k) {
      const auto& u = user(k);
      FrameRecord r;
      r.frame = f;
      r.user = k;
      r.decisions = current[k].decisions;
      r.avg_loss = current[k].avg_loss;
      if (cfg_.policy == Policy::clo) {
        r.theta = theta_before[k];
        r.theta_next = thresholds_.theta[k];
      } else {
        r.theta = theta_sum[k] / S;
        r.theta_next = kNaN;
      }
      cum_all_[k] += r.avg_loss;
      if (r.decisions > 0) {
        cum_active_[k] += r.avg_loss;
        ++active_[k];
      }
      r.active_frames = active_[k];
      r.cum_avg_all = cum_all_[k] / static_cast<double>(f + 1);
      r.cum_avg_active = active_[k] ? cum_active_[k] / static_cast<double>(active_[k]) : 0.0;
      const double frames = static_cast<double>(active_[k]);
      if (active_[k] > 0) {
        const auto worst = reliability_bounds(frames, u.learning_rate, u.theta0, u.target, u.delay_frames, 0.0, 1.0);
        r.lower_worst = worst.lower;
        r.upper_worst = worst.upper;
        if (cfg_.policy == Policy::clo) {
          const auto c = posterior_constants(thresholds_.min_theta[k], thresholds_.max_theta[k], u.theta0,
                                             u.learning_rate);
          const auto b = reliability_bounds(frames, u.learning_rate, u.theta0, u.target, u.delay_frames, c.m, c.M);
          r.lower = b.lower;
          r.upper = b.upper;
        } else {
          r.lower = r.upper = kNaN;
        }
      } else {
        r.lower = r.upper = r.lower_worst = r.upper_worst = kNaN;
      }
      r.z = vq_.z[k];
      r.y = vq_.y[k];
      r.latency_queue = latency_q_[k];
      r.outage = r.decisions > 0 && r.avg_loss > l_max_[k];
      m_.frames.push_back(r);
    }
  }

  const ScenarioConfig& cfg_;
  RunOptions opt_;
  Network net_;
  std::size_t N_;
  std::size_t K_;
  Rng arrival_rng_;
  Rng channel_rng_;
  Rng task_rng_;
  ArrivalProcess arrivals_;
  QueueState queues_;
  FrameFeedback feedback_;
  ThresholdState thresholds_;
  VirtualQueues vq_;
  std::vector<double> l_max_;
  std::vector<double> latency_q_;
  std::shared_ptr<LossTable> table_;
  PrecisionPredictor predictor_;
  double noise_;
  double drift_;
  DuId next_id_ = 1;
  std::unordered_map<DuId, SyntheticTask> tasks_;
  std::unordered_map<std::uint64_t, ServerView> views_;
  std::vector<double> cum_active_;
  std::vector<double> cum_all_;
  std::vector<std::int64_t> active_;
  RunMetrics m_;
};

double mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stddev(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double mu = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - mu) * (x - mu);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

std::vector<double> ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t q = i; q <= j; ++q) r[idx[q]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

const FrameRecord& RunMetrics::frame_row(std::int64_t f, std::size_t k) const {
  return frames.at(static_cast<std::size_t>(f) * users.size() + k);
}

std::int64_t RunMetrics::frame_count() const noexcept {
  return users.empty() ? 0 : static_cast<std::int64_t>(frames.size() / users.size());
}

RunMetrics run_scenario(const ScenarioConfig& config, std::uint64_t seed, const RunOptions& options) {
  const auto issues = validate_scenario(config);
  if (!issues.empty()) throw ConfigError(issues);
  Engine engine(config, seed, options);
  return engine.run();
}

RunMetrics run_lo_algorithm(const ScenarioConfig& config, std::uint64_t seed, const RunOptions& options) {
  if (config.policy == Policy::clo)
    throw ConfigError("policy", "run_lo_algorithm needs lo_avg or lo_outage");
  return run_scenario(config, seed, options);
}

std::vector<RunMetrics> run_batch(const ScenarioConfig& config, std::span<const std::uint64_t> seeds,
                                  const RunOptions& options) {
  std::vector<RunMetrics> out(seeds.size());
  std::vector<std::exception_ptr> errors(seeds.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < seeds.size(); i = next++) {
      try {
        out[i] = run_scenario(config, seeds[i], options);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads =
      std::min<std::size_t>(seeds.size(), std::max(1u, std::thread::hardware_concurrency()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

std::vector<SyntheticTask> calibration_tasks(const ScenarioConfig& config, std::uint64_t seed) {
  Rng rng = make_stream(seed, Stream::calibration);
  std::vector<SyntheticTask> out;
  out.reserve(static_cast<std::size_t>(config.lo.calibration_tasks));
  for (int i = 0; i < config.lo.calibration_tasks; ++i)
    out.push_back(generate_task(rng, config.tasks, static_cast<std::uint64_t>(i)));
  return out;
}

LossTable calibrate_table(const ScenarioConfig& config, std::uint64_t seed) {
  const Network net = build_network(config.network);
  const auto tasks = calibration_tasks(config, seed);
  return build_loss_table(net, config.lo.theta_grid, tasks, config.losses.reliability,
                          config.losses.precision);
}

std::vector<UserHistory> user_histories(const RunMetrics& m) {
  std::vector<UserHistory> out;
  for (std::size_t k = 0; k < m.user_count(); ++k) {
    UserHistory h;
    h.id = m.users[k].id;
    h.target = m.users[k].target;
    h.learning_rate = m.users[k].learning_rate;
    h.theta0 = m.users[k].theta0;
    h.delay = m.users[k].delay;
    h.theta.push_back(h.theta0);
    for (std::int64_t f = 0; f < m.frame_count(); ++f) {
      const auto& r = m.frame_row(f, k);
      h.theta.push_back(r.theta_next);
      h.frames.push_back({r.decisions, r.avg_loss});
    }
    out.push_back(std::move(h));
  }
  return out;
}

CertificateReport certificate_check(std::span<const UserHistory> users, double slack) {
  CertificateReport rep;
  for (const auto& h : users) {
    double lo = h.theta.empty() ? h.theta0 : h.theta.front();
    double hi = lo;
    double sum = 0.0;
    std::int64_t active = 0;
    for (std::size_t f = 0; f < h.frames.size(); ++f) {
      if (f + 1 < h.theta.size()) {
        lo = std::min(lo, h.theta[f + 1]);
        hi = std::max(hi, h.theta[f + 1]);
      }
      if (h.frames[f].decisions > 0) {
        sum += h.frames[f].avg_loss;
        ++active;
      }
      if (active == 0) continue;
      const double frames = static_cast<double>(active);
      const double value = sum / frames;
      const auto c = posterior_constants(lo, hi, h.theta0, h.learning_rate);
      const auto b = reliability_bounds(frames, h.learning_rate, h.theta0, h.target, h.delay, c.m, c.M);
      ++rep.checks;
      if (value < b.lower - slack || value > b.upper + slack) {
        rep.pass = false;
        rep.failures.push_back({h.id, static_cast<std::int64_t>(f + 1), value, b.lower, b.upper});
      }
    }
  }
  return rep;
}

CertificateReport certificate_check(const RunMetrics& metrics, double slack) {
  const auto h = user_histories(metrics);
  return certificate_check(std::span<const UserHistory>(h), slack);
}

ConvergedStats converged_stats(const RunMetrics& m, int window) {
  ConvergedStats s;
  if (m.slots.empty()) return s;
  const std::size_t w = std::min(m.slots.size(), static_cast<std::size_t>(std::max(window, 1)));
  double prec = 0.0;
  double rel = 0.0;
  double lat = 0.0;
  for (std::size_t i = m.slots.size() - w; i < m.slots.size(); ++i) {
    const auto& r = m.slots[i];
    s.energy += r.energy_j;
    prec += r.precision_loss;
    rel += r.reliability_loss;
    s.decisions += r.decisions;
    double l = 0.0;
    for (std::size_t k = 0; k < m.user_count(); ++k)
      l += littles_law_latency(r.user_backlog[k], m.users[k].arrival_prob, m.slot_s);
    lat += m.user_count() ? l / static_cast<double>(m.user_count()) : 0.0;
  }
  s.energy /= static_cast<double>(w);
  s.latency_s = lat / static_cast<double>(w);
  if (s.decisions > 0) {
    s.precision = 1.0 - prec / static_cast<double>(s.decisions);
    s.fnr = rel / static_cast<double>(s.decisions);
  }
  return s;
}

double littles_law_latency(double queue_length, double arrival_prob, double slot_s) {
  if (queue_length <= 0.0) return 0.0;
  if (!(arrival_prob > 0.0)) return std::numeric_limits<double>::infinity();
  return queue_length / (arrival_prob / slot_s);
}

std::vector<double> latency_tracking(const RunMetrics& m) {
  std::vector<double> out;
  out.reserve(m.slots.size());
  for (const auto& r : m.slots) {
    double l = 0.0;
    for (std::size_t k = 0; k < m.user_count(); ++k)
      l += littles_law_latency(r.user_backlog[k], m.users[k].arrival_prob, m.slot_s);
    out.push_back(m.user_count() ? l / static_cast<double>(m.user_count()) : 0.0);
  }
  return out;
}

double latency_virtual_queue_update(double ql, double step, double frame_avg, double q_avg) {
  return std::max(0.0, ql + step * (frame_avg - q_avg));
}

std::int64_t time_to_target(const RunMetrics& m, double tol) {
  const std::int64_t F = m.frame_count();
  std::int64_t last_bad = -1;
  for (std::int64_t f = 0; f < F; ++f)
    for (std::size_t k = 0; k < m.user_count(); ++k) {
      const auto& r = m.frame_row(f, k);
      if (r.active_frames == 0 || std::abs(r.cum_avg_active - m.users[k].target) > tol) last_bad = f;
    }
  if (last_bad == F - 1) return -1;
  return (last_bad + 2) * m.frame_size;
}

std::vector<double> decision_shares(const RunMetrics& m) {
  std::vector<double> out(m.node_decisions.size(), 0.0);
  const auto total = std::accumulate(m.node_decisions.begin(), m.node_decisions.end(), std::int64_t{0});
  if (total == 0) return out;
  for (std::size_t n = 0; n < out.size(); ++n)
    out[n] = static_cast<double>(m.node_decisions[n]) / static_cast<double>(total);
  return out;
}

TradeoffRow summarize(double eta, Policy policy, std::span<const RunMetrics> runs, int window) {
  TradeoffRow row;
  row.eta = eta;
  row.policy = policy;
  std::vector<double> e, p, fnr;
  for (const auto& r : runs) {
    const auto s = converged_stats(r, window);
    e.push_back(s.energy);
    p.push_back(s.precision);
    fnr.push_back(s.fnr);
    const auto sh = decision_shares(r);
    if (row.shares.empty()) row.shares.assign(sh.size(), 0.0);
    for (std::size_t n = 0; n < sh.size(); ++n) row.shares[n] += sh[n] / static_cast<double>(runs.size());
  }
  row.energy_mean = mean(e);
  row.energy_std = stddev(e);
  row.precision_mean = mean(p);
  row.precision_std = stddev(p);
  row.fnr_mean = mean(fnr);
  return row;
}

std::vector<TradeoffRow> tradeoff_sweep(const ScenarioConfig& base, std::span<const double> etas,
                                        std::span<const std::uint64_t> seeds) {
  RunOptions opt;
  opt.record_decisions = false;
  opt.record_ldpp = false;
  std::vector<TradeoffRow> out;
  for (double eta : etas) {
    ScenarioConfig c = base;
    c.run.eta = eta;
    c.run.beta.reset();
    const auto runs = run_batch(c, seeds, opt);
    out.push_back(summarize(eta, c.policy, runs, c.run.converged_window));
  }
  return out;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("spearman: need two equal-length series");
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  const double mx = mean(rx);
  const double my = mean(ry);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace clo
