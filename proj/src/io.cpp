#include "clo/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace clo {

std::string format_double(double value) {
  if (std::isnan(value)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

namespace {

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& s) {
  if (s.empty()) return std::nan("");
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::runtime_error("malformed number '" + s + "'");
  return v;
}

}  // namespace

void write_slots_csv(std::ostream& out, const RunMetrics& m) {
  out << "slot,frame,energy_j,precision_loss,reliability_loss,decisions,backlog,ldpp_realized,ldpp_bound,"
         "shared_theta\n";
  for (const auto& r : m.slots)
    out << r.slot << ',' << r.frame << ',' << format_double(r.energy_j) << ','
        << format_double(r.precision_loss) << ',' << format_double(r.reliability_loss) << ','
        << r.decisions << ',' << r.backlog << ',' << format_double(r.ldpp_realized) << ','
        << format_double(r.ldpp_bound) << ',' << opt(r.shared_theta) << '\n';
}

void write_frames_csv(std::ostream& out, const RunMetrics& m) {
  out << "frame,user,user_id,target,learning_rate,theta0,delay,theta,theta_next,decisions,avg_loss,"
         "cum_avg_active,cum_avg_all,active_frames,lower,upper,lower_worst,upper_worst,z,y,"
         "latency_queue,outage\n";
  for (const auto& r : m.frames) {
    const auto& u = m.users.at(r.user);
    out << r.frame << ',' << r.user << ',' << u.id << ',' << format_double(u.target) << ','
        << format_double(u.learning_rate) << ',' << format_double(u.theta0) << ',' << u.delay << ','
        << format_double(r.theta) << ',' << format_double(r.theta_next) << ',' << r.decisions << ','
        << format_double(r.avg_loss) << ',' << format_double(r.cum_avg_active) << ','
        << format_double(r.cum_avg_all) << ',' << r.active_frames << ',' << format_double(r.lower) << ','
        << format_double(r.upper) << ',' << format_double(r.lower_worst) << ','
        << format_double(r.upper_worst) << ',' << format_double(r.z) << ',' << format_double(r.y) << ','
        << format_double(r.latency_queue) << ',' << (r.outage ? 1 : 0) << '\n';
  }
}

void write_decisions_csv(std::ostream& out, const RunMetrics& m) {
  out << "slot,frame,user,server,du,generated_slot,theta,reliability_loss,precision_loss\n";
  for (const auto& d : m.decisions)
    out << d.slot << ',' << d.frame << ',' << m.users.at(d.user).id << ',' << m.node_ids.at(d.server) << ','
        << d.du << ',' << d.generated_slot << ',' << format_double(d.theta) << ','
        << format_double(d.reliability_loss) << ',' << format_double(d.precision_loss) << '\n';
}

void write_table_csv(std::ostream& out, const LossTable& table, const std::vector<std::string>& node_ids) {
  out << "server,theta,reliability,precision\n";
  for (std::size_t n = 0; n < table.nodes(); ++n) {
    if (table.reliability_row(n).empty()) continue;
    for (std::size_t i = 0; i < table.grid().size(); ++i)
      out << node_ids.at(n) << ',' << format_double(table.grid()[i]) << ','
          << format_double(table.reliability(n, i)) << ',' << format_double(table.precision(n, i)) << '\n';
  }
}

void write_tradeoff_csv(std::ostream& out, std::span<const TradeoffRow> rows,
                        const std::vector<std::string>& node_ids) {
  out << "eta,policy,energy_mean,energy_std,precision_mean,precision_std,fnr_mean";
  for (const auto& id : node_ids) out << ",share_" << id;
  out << '\n';
  for (const auto& r : rows) {
    out << format_double(r.eta) << ',' << to_string(r.policy) << ',' << format_double(r.energy_mean) << ','
        << format_double(r.energy_std) << ',' << format_double(r.precision_mean) << ','
        << format_double(r.precision_std) << ',' << format_double(r.fnr_mean);
    for (std::size_t n = 0; n < node_ids.size(); ++n)
      out << ',' << format_double(n < r.shares.size() ? r.shares[n] : 0.0);
    out << '\n';
  }
}

std::vector<UserHistory> read_frames_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("frames file is empty");
  const auto header = split(line);
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
  for (const char* need : {"frame", "user", "user_id", "target", "learning_rate", "theta0", "delay",
                           "theta_next", "decisions", "avg_loss"})
    if (!col.count(need)) throw std::runtime_error(std::string("frames file lacks column '") + need + "'");

  std::map<std::size_t, UserHistory> users;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size())
      throw std::runtime_error("frames file row " + std::to_string(row) + " has the wrong column count");
    const auto k = static_cast<std::size_t>(std::stoul(cells[col["user"]]));
    auto& h = users[k];
    if (h.theta.empty()) {
      h.id = cells[col["user_id"]];
      h.target = parse_number(cells[col["target"]]);
      h.learning_rate = parse_number(cells[col["learning_rate"]]);
      h.theta0 = parse_number(cells[col["theta0"]]);
      h.delay = std::stoi(cells[col["delay"]]);
      h.theta.push_back(h.theta0);
    }
    const double next = parse_number(cells[col["theta_next"]]);
    if (std::isnan(next))
      throw std::runtime_error("frames file has no threshold trajectory (not a CLO run)");
    h.theta.push_back(next);
    h.frames.push_back({std::stoi(cells[col["decisions"]]), parse_number(cells[col["avg_loss"]])});
  }
  std::vector<UserHistory> out;
  for (auto& [k, h] : users) out.push_back(std::move(h));
  return out;
}

std::string run_prefix(const RunMetrics& m) {
  return m.scenario + "_" + to_string(m.policy) + "_seed" + std::to_string(m.seed);
}

std::vector<std::string> write_run(const std::string& dir, const RunMetrics& m) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const std::string base = (fs::path(dir) / run_prefix(m)).string();
  std::vector<std::string> paths{base + "_slots.csv", base + "_frames.csv", base + "_decisions.csv"};
  auto open = [](const std::string& p) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + p);
    return f;
  };
  {
    auto f = open(paths[0]);
    write_slots_csv(f, m);
  }
  {
    auto f = open(paths[1]);
    write_frames_csv(f, m);
  }
  {
    auto f = open(paths[2]);
    write_decisions_csv(f, m);
  }
  return paths;
}

nlohmann::json run_summary(const RunMetrics& m, int window) {
  const auto s = converged_stats(m, window);
  const auto cert = certificate_check(m);
  nlohmann::json users = nlohmann::json::array();
  for (std::size_t k = 0; k < m.user_count(); ++k) {
    nlohmann::json u{{"id", m.users[k].id}, {"target", m.users[k].target}};
    if (m.frame_count() > 0) {
      const auto& last = m.frame_row(m.frame_count() - 1, k);
      u["cum_avg_active"] = last.cum_avg_active;
      u["final_theta"] = std::isnan(last.theta_next) ? nlohmann::json(nullptr) : nlohmann::json(last.theta_next);
      u["upper"] = std::isnan(last.upper) ? nlohmann::json(nullptr) : nlohmann::json(last.upper);
      u["lower"] = std::isnan(last.lower) ? nlohmann::json(nullptr) : nlohmann::json(last.lower);
    }
    users.push_back(u);
  }
  int max_q = 0;
  for (int q : m.final_lengths) max_q = std::max(max_q, q);
  nlohmann::json j{{"seed", m.seed},
                   {"policy", to_string(m.policy)},
                   {"energy_j", s.energy},
                   {"precision", s.precision},
                   {"fnr", s.fnr},
                   {"latency_s", s.latency_s},
                   {"arrivals", m.arrivals},
                   {"decided", m.decided},
                   {"max_final_queue", max_q},
                   {"ldpp_violations", m.ldpp_violations},
                   {"decision_shares", decision_shares(m)},
                   {"users", users}};
  if (m.policy == Policy::clo) {
    j["certificate"] = cert.pass ? "PASS" : "FAIL";
    j["certificate_failures"] = cert.failures.size();
  }
  return j;
}

nlohmann::json batch_summary(const ScenarioConfig& config, std::span<const RunMetrics> runs) {
  nlohmann::json seeds = nlohmann::json::array();
  std::vector<double> e, p, f;
  bool all_pass = true;
  for (const auto& r : runs) {
    auto s = run_summary(r, config.run.converged_window);
    e.push_back(s["energy_j"].get<double>());
    p.push_back(s["precision"].get<double>());
    f.push_back(s["fnr"].get<double>());
    if (s.contains("certificate") && s["certificate"] != "PASS") all_pass = false;
    seeds.push_back(std::move(s));
  }
  auto stats = [](const std::vector<double>& v) {
    double mu = 0.0;
    for (double x : v) mu += x;
    mu /= v.empty() ? 1.0 : static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mu) * (x - mu);
    const double sd = v.size() > 1 ? std::sqrt(var / static_cast<double>(v.size() - 1)) : 0.0;
    return nlohmann::json{{"mean", mu}, {"std", sd}};
  };
  nlohmann::json j{{"scenario", config.name},
                   {"policy", to_string(config.policy)},
                   {"eta", config.effective_eta()},
                   {"V", config.effective_V()},
                   {"energy_j", stats(e)},
                   {"precision", stats(p)},
                   {"fnr", stats(f)},
                   {"runs", seeds}};
  if (config.policy == Policy::clo) j["certificate"] = all_pass ? "PASS" : "FAIL";
  return j;
}

}  // namespace clo
