#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "clo/errors.hpp"
#include "clo/harness.hpp"
#include "clo/io.hpp"
#include "clo/scenario.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kFault = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (part.empty()) continue;
    try {
      const auto dash = part.find('-');
      if (dash == std::string::npos) {
        out.push_back(std::stoull(part));
      } else {
        const auto a = std::stoull(part.substr(0, dash));
        const auto b = std::stoull(part.substr(dash + 1));
        if (b < a) throw UsageError("bad seed range '" + part + "'");
        for (auto s = a; s <= b; ++s) out.push_back(s);
      }
    } catch (const std::logic_error&) {
      throw UsageError("bad seed list '" + text + "'");
    }
  }
  if (out.empty()) throw UsageError("empty seed list");
  return out;
}

clo::Policy parse_policy(const std::string& s) {
  if (s == "clo") return clo::Policy::clo;
  if (s == "lo_avg") return clo::Policy::lo_avg;
  if (s == "lo_outage") return clo::Policy::lo_outage;
  throw UsageError("unknown policy '" + s + "' (clo, lo_avg, lo_outage)");
}

struct Common {
  std::string config;
  std::string out;
  std::string seeds;
  std::string policy;
  bool quiet = false;

  clo::ScenarioConfig load() const {
    clo::ScenarioConfig c = clo::default_scenario();
    if (!config.empty()) {
      if (!fs::exists(config)) throw UsageError("config file not found: " + config);
      c = clo::load_scenario(config);
    }
    if (!seeds.empty()) c.run.seeds = parse_seeds(seeds);
    if (!policy.empty()) c.policy = parse_policy(policy);
    return c;
  }

  std::string out_dir() const {
    std::string dir = out;
    if (dir.empty()) {
      const char* env = std::getenv("CLO_OUT_DIR");
      dir = env && *env ? env : "results";
    }
    std::error_code ec;
    fs::create_directories(dir, ec);
    const fs::path probe = fs::path(dir) / ".clo_write_probe";
    std::ofstream f(probe);
    if (ec || !f) throw UsageError("output directory is not writable: " + dir);
    f.close();
    fs::remove(probe, ec);
    return dir;
  }

  void say(const std::string& msg) const {
    if (!quiet) std::cout << msg << '\n';
  }
};

void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << j.dump(2) << '\n';
}

int cmd_run(const Common& o) {
  const auto cfg = o.load();
  const auto dir = o.out_dir();
  const auto runs = clo::run_batch(cfg, cfg.run.seeds);
  for (const auto& r : runs) {
    for (const auto& p : clo::write_run(dir, r)) o.say("wrote " + p);
  }
  write_json((fs::path(dir) / "summary.json").string(), clo::batch_summary(cfg, runs));
  o.say("wrote " + (fs::path(dir) / "summary.json").string());
  return kOk;
}

int cmd_sweep(const Common& o) {
  const auto cfg = o.load();
  const auto dir = o.out_dir();
  const auto rows = clo::tradeoff_sweep(cfg, cfg.sweep.etas, cfg.run.seeds);
  const auto net = clo::build_network(cfg.network);
  std::vector<std::string> ids;
  for (const auto& n : net.nodes()) ids.push_back(n.id);
  const auto path = (fs::path(dir) / (cfg.name + "_" + clo::to_string(cfg.policy) + "_sweep.csv")).string();
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  clo::write_tradeoff_csv(f, rows, ids);
  std::vector<double> e, p;
  for (const auto& r : rows) {
    e.push_back(r.energy_mean);
    p.push_back(r.precision_mean);
  }
  nlohmann::json j{{"scenario", cfg.name}, {"policy", clo::to_string(cfg.policy)}, {"etas", cfg.sweep.etas},
                   {"energy", e},          {"precision", p}};
  if (rows.size() >= 2) j["spearman_precision_energy"] = clo::spearman(p, e);
  write_json((fs::path(dir) / "summary.json").string(), j);
  o.say("wrote " + path);
  return kOk;
}

int cmd_certify(const Common& o, const std::vector<std::string>& inputs) {
  std::vector<std::string> files;
  for (const auto& in : inputs) {
    if (fs::is_directory(in)) {
      for (const auto& e : fs::directory_iterator(in)) {
        const auto name = e.path().filename().string();
        if (name.size() > 11 && name.compare(name.size() - 11, 11, "_frames.csv") == 0)
          files.push_back(e.path().string());
      }
    } else if (fs::exists(in)) {
      files.push_back(in);
    } else {
      throw UsageError("no such file or directory: " + in);
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw UsageError("no frames CSV files to certify");
  bool all = true;
  for (const auto& path : files) {
    std::ifstream f(path);
    std::vector<clo::UserHistory> users;
    try {
      users = clo::read_frames_csv(f);
    } catch (const std::exception& e) {
      std::cout << path << ": FAIL (" << e.what() << ")\n";
      all = false;
      continue;
    }
    for (const auto& u : users) {
      const auto rep = clo::certificate_check(std::span<const clo::UserHistory>(&u, 1));
      all = all && rep.pass;
      std::cout << path << " " << u.id << ": " << (rep.pass ? "PASS" : "FAIL");
      if (!rep.pass) {
        const auto& fl = rep.failures.front();
        std::cout << " (first failure at F=" << fl.frames << ": " << clo::format_double(fl.value) << " not in ["
                  << clo::format_double(fl.lower) << ", " << clo::format_double(fl.upper) << "])";
      }
      std::cout << '\n';
    }
  }
  return all ? kOk : kFault;
}

int cmd_compare(const Common& o) {
  const auto base = o.load();
  const auto dir = o.out_dir();
  nlohmann::json summary = nlohmann::json::array();
  for (auto policy : {clo::Policy::clo, clo::Policy::lo_avg, clo::Policy::lo_outage}) {
    auto cfg = base;
    cfg.policy = policy;
    const auto runs = clo::run_batch(cfg, cfg.run.seeds);
    for (const auto& r : runs)
      for (const auto& p : clo::write_run(dir, r)) o.say("wrote " + p);
    summary.push_back(clo::batch_summary(cfg, runs));
  }
  write_json((fs::path(dir) / "summary.json").string(), summary);
  return kOk;
}

int cmd_calibrate(const Common& o) {
  const auto cfg = o.load();
  const auto dir = o.out_dir();
  const auto net = clo::build_network(cfg.network);
  std::vector<std::string> ids;
  for (const auto& n : net.nodes()) ids.push_back(n.id);
  for (auto seed : cfg.run.seeds) {
    const auto table = clo::calibrate_table(cfg, seed);
    const auto path = (fs::path(dir) / (cfg.name + "_seed" + std::to_string(seed) + "_table.csv")).string();
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    clo::write_table_csv(f, table, ids);
    o.say("wrote " + path);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conformal Lyapunov optimization simulator"};
  app.require_subcommand(1);
  Common o;
  app.add_flag("-q,--quiet", o.quiet, "Suppress progress output");

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", o.config, "Scenario JSON (defaults to the built-in single-hop scenario)");
    sub->add_option("-o,--out", o.out, "Output directory (default: $CLO_OUT_DIR or ./results)");
    sub->add_option("-s,--seeds", o.seeds, "Seeds, e.g. 1,2,5-8");
    sub->add_option("-p,--policy", o.policy, "clo | lo_avg | lo_outage");
    sub->add_flag("-q,--quiet", o.quiet, "Suppress progress output");
  };
  auto* run = app.add_subcommand("run", "Run one scenario for every seed");
  add_common(run);
  auto* sweep = app.add_subcommand("sweep", "Energy-precision sweep over sweep.etas");
  add_common(sweep);
  auto* compare = app.add_subcommand("compare", "CLO against both LO benchmarks on shared seeds");
  add_common(compare);
  auto* calibrate = app.add_subcommand("calibrate-table", "Build the LO loss tables");
  add_common(calibrate);
  auto* certify = app.add_subcommand("certify", "Re-check reliability certificates from frames CSVs");
  std::vector<std::string> inputs;
  certify->add_option("inputs", inputs, "Frames CSV files or directories")->required();
  certify->add_flag("-q,--quiet", o.quiet, "Suppress progress output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*run) return cmd_run(o);
    if (*sweep) return cmd_sweep(o);
    if (*compare) return cmd_compare(o);
    if (*calibrate) return cmd_calibrate(o);
    if (*certify) return cmd_certify(o, inputs);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const clo::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "fault: " << e.what() << '\n';
    return kFault;
  }
  return kUsage;
}
